#pragma once

#include "motionspc/landmark.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace motionspc {

/// One column of a summary table. `std_dev` is the sample (n - 1) deviation;
/// it is 0 for a single value.
struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::optional<std::size_t> warnings;

    friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

/// Median of an even count is the midpoint of the two central values.
/// `warnings` is filled only when `ucl` is given. Throws Error(EmptySeries).
SummaryStats summarize(std::span<const double> values, std::optional<double> ucl = std::nullopt);

struct CorrelationReport {
    double pcc = 0.0;
    std::size_t n_pairs = 0;
    std::pair<std::string, std::string> series_labels;

    friend bool operator==(const CorrelationReport&, const CorrelationReport&) = default;
};

/// Pearson product-moment correlation.
/// Throws Error(LengthMismatch) for unequal lengths or fewer than 2 pairs,
/// Error(ZeroVariance) when either series is constant.
CorrelationReport pearson(std::span<const double> a, std::span<const double> b,
                          std::pair<std::string, std::string> labels = {"a", "b"});

enum class ComparisonMethod { PerTaskMean, Pooled };
std::string_view to_string(ComparisonMethod method);
ComparisonMethod parse_comparison_method(std::string_view text);

struct ComparisonReport {
    ComparisonMethod method = ComparisonMethod::PerTaskMean;
    double small_pcc = 0.0;
    double large_pcc = 0.0;
    std::size_t small_tasks = 0;
    std::size_t large_tasks = 0;
    /// 100 * (small - large) / large
    double percent_difference = 0.0;

    friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

/// Averages the per-task PCCs of each size class.
/// Throws Error(MissingClass) unless both classes are present,
/// Error(ZeroVariance) when the large-class mean is 0.
ComparisonReport compare_task_correlations(std::span<const std::pair<TaskCode, CorrelationReport>> reports);

/// Aligned series pair for one recording.
struct TaskSeries {
    TaskCode task;
    std::vector<double> a;
    std::vector<double> b;
};

/// Concatenates the series of each size class and correlates the pooled
/// pairs. Same errors as compare_task_correlations plus those of pearson.
ComparisonReport compare_pooled_correlations(std::span<const TaskSeries> series);

}  // namespace motionspc
