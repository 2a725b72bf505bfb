#include "motionspc/stats.hpp"

#include "motionspc/error.hpp"
#include "motionspc/hotelling.hpp"

#include <algorithm>
#include <cmath>

namespace motionspc {

SummaryStats summarize(std::span<const double> values, std::optional<double> ucl) {
    if (values.empty()) throw Error(ErrorCode::EmptySeries, "cannot summarize an empty series");

    SummaryStats out;
    out.count = values.size();
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double x : values) {
        ++k;
        const double delta = x - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (x - mean);
    }
    out.mean = mean;
    out.std_dev = out.count > 1 ? std::sqrt(m2 / static_cast<double>(out.count - 1)) : 0.0;

    std::vector<double> sorted(values.begin(), values.end());
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    const double upper = sorted[mid];
    if (sorted.size() % 2 == 1) {
        out.median = upper;
    } else {
        const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
        out.median = lower + (upper - lower) / 2.0;
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    out.min = *lo;
    out.max = *hi;
    if (ucl) out.warnings = warning_count(values, *ucl);
    return out;
}

CorrelationReport pearson(std::span<const double> a, std::span<const double> b,
                          std::pair<std::string, std::string> labels) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, "series lengths differ (" + std::to_string(a.size()) + " vs " +
                                                   std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) throw Error(ErrorCode::LengthMismatch, "correlation needs at least 2 pairs");

    // Symmetric single-pass co-moment update on values taken relative to the
    // first pair.
    // Constant input yields exactly zero spread; an exactly representable shift
    // or power-of-two scale of either series leaves the result bit-identical.
    const double ref_a = a[0], ref_b = b[0];
    double mean_a = 0.0, mean_b = 0.0;
    double m2_a = 0.0, m2_b = 0.0, co = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto k = static_cast<double>(i + 1);
        const double xa = a[i] - ref_a;
        const double xb = b[i] - ref_b;
        const double da = xa - mean_a;
        const double db = xb - mean_b;
        const double w = (k - 1.0) / k;
        mean_a += da / k;
        mean_b += db / k;
        m2_a += w * (da * da);
        m2_b += w * (db * db);
        co += w * (da * db);
    }
    if (!(m2_a > 0.0)) throw Error(ErrorCode::ZeroVariance, "series '" + labels.first + "' is constant");
    if (!(m2_b > 0.0)) throw Error(ErrorCode::ZeroVariance, "series '" + labels.second + "' is constant");

    const double r = co / (std::sqrt(m2_a) * std::sqrt(m2_b));
    return {std::clamp(r, -1.0, 1.0), a.size(), std::move(labels)};
}

std::string_view to_string(ComparisonMethod method) {
    return method == ComparisonMethod::Pooled ? "pooled" : "per-task-mean";
}

ComparisonMethod parse_comparison_method(std::string_view text) {
    if (text == "pooled") return ComparisonMethod::Pooled;
    if (text == "per-task-mean") return ComparisonMethod::PerTaskMean;
    throw Error(ErrorCode::InvalidArgument, "unknown comparison method '" + std::string(text) + "'");
}

namespace {

void finish(ComparisonReport& report) {
    if (report.small_tasks == 0 || report.large_tasks == 0) {
        throw Error(ErrorCode::MissingClass, "comparison needs at least one S task and one L task");
    }
    if (report.large_pcc == 0.0) throw Error(ErrorCode::ZeroVariance, "L-class correlation is zero");
    report.percent_difference = 100.0 * (report.small_pcc - report.large_pcc) / report.large_pcc;
}

}  // namespace

ComparisonReport compare_task_correlations(std::span<const std::pair<TaskCode, CorrelationReport>> reports) {
    ComparisonReport out;
    out.method = ComparisonMethod::PerTaskMean;
    double small_sum = 0.0, large_sum = 0.0;
    for (const auto& [task, report] : reports) {
        if (task.size == ObjectSize::Small) {
            small_sum += report.pcc;
            ++out.small_tasks;
        } else {
            large_sum += report.pcc;
            ++out.large_tasks;
        }
    }
    if (out.small_tasks) out.small_pcc = small_sum / static_cast<double>(out.small_tasks);
    if (out.large_tasks) out.large_pcc = large_sum / static_cast<double>(out.large_tasks);
    finish(out);
    return out;
}

ComparisonReport compare_pooled_correlations(std::span<const TaskSeries> series) {
    ComparisonReport out;
    out.method = ComparisonMethod::Pooled;
    std::vector<double> small_a, small_b, large_a, large_b;
    for (const auto& s : series) {
        if (s.a.size() != s.b.size()) {
            throw Error(ErrorCode::LengthMismatch, "task " + s.task.to_string() + " has misaligned series");
        }
        auto& dst_a = s.task.size == ObjectSize::Small ? small_a : large_a;
        auto& dst_b = s.task.size == ObjectSize::Small ? small_b : large_b;
        dst_a.insert(dst_a.end(), s.a.begin(), s.a.end());
        dst_b.insert(dst_b.end(), s.b.begin(), s.b.end());
        ++(s.task.size == ObjectSize::Small ? out.small_tasks : out.large_tasks);
    }
    if (out.small_tasks == 0 || out.large_tasks == 0) {
        throw Error(ErrorCode::MissingClass, "comparison needs at least one S task and one L task");
    }
    out.small_pcc = pearson(small_a, small_b, {"S", "S"}).pcc;
    out.large_pcc = pearson(large_a, large_b, {"L", "L"}).pcc;
    finish(out);
    return out;
}

}  // namespace motionspc
