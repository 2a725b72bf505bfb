#include "motionspc/analysis.hpp"

#include "motionspc/canonical_json.hpp"
#include "motionspc/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace motionspc {

PreparedStream prepare_stream(const LandmarkStream& raw, const AnalysisConfig& config) {
    validate_config(config);
    LandmarkSelection selection = resolve_selection(config, raw.metadata());
    require_ordered(raw);
    LandmarkStream filled =
        apply_gap_policy(raw, selection, GapOptions{config.gap_policy, config.visibility_threshold});
    return {std::move(filled), std::move(selection)};
}

std::int64_t phase_boundary(const LandmarkStream& stream, double phase1_fraction) {
    const auto n = stream.size();
    const auto k = static_cast<std::size_t>(std::floor(phase1_fraction * static_cast<double>(n)));
    if (k < 1 || k >= n) {
        throw Error(ErrorCode::InsufficientData, "phase split of " + std::to_string(n) + " frames at fraction " +
                                                     std::to_string(phase1_fraction) + " leaves a phase empty");
    }
    return stream.frames()[k].frame_index();
}

FeatureMatrix monitored_features(const LandmarkStream& stream, const LandmarkSelection& selection,
                                 FeatureKind kind, StepSpec step) {
    return kind == FeatureKind::Positions ? select_features(stream, selection)
                                          : motion_feature_matrix(stream, selection, step);
}

FeatureSplit split_at(const FeatureMatrix& features, std::int64_t boundary) {
    const auto cut = static_cast<Eigen::Index>(
        std::lower_bound(features.frame_indices.begin(), features.frame_indices.end(), boundary) -
        features.frame_indices.begin());
    FeatureSplit out;
    out.phase1.values = features.values.topRows(cut);
    out.phase1.frame_indices.assign(features.frame_indices.begin(), features.frame_indices.begin() + cut);
    out.phase1.columns = features.columns;
    out.phase2.values = features.values.bottomRows(features.rows() - cut);
    out.phase2.frame_indices.assign(features.frame_indices.begin() + cut, features.frame_indices.end());
    out.phase2.columns = features.columns;
    return out;
}

Phase1Options phase1_options(const AnalysisConfig& config, StepSpec step) {
    Phase1Options options;
    options.alpha = config.alpha;
    options.estimator = config.estimator;
    options.limit_family = config.limit_family;
    options.feature_kind = config.feature_kind;
    if (config.feature_kind == FeatureKind::MotionVectors) options.feature_step = step.step();
    return options;
}

AlignedPairs align_by_frame(const std::vector<std::int64_t>& frames_a, const std::vector<double>& a,
                            const std::vector<std::int64_t>& frames_b, const std::vector<double>& b) {
    AlignedPairs out;
    std::size_t i = 0, j = 0;
    while (i < frames_a.size() && j < frames_b.size()) {
        if (frames_a[i] < frames_b[j]) {
            ++i;
        } else if (frames_b[j] < frames_a[i]) {
            ++j;
        } else {
            out.a.push_back(a[i]);
            out.b.push_back(b[j]);
            out.frame_indices.push_back(frames_a[i]);
            ++i;
            ++j;
        }
    }
    return out;
}

namespace {

TsquaredSeries concat(const TsquaredSeries& first, const TsquaredSeries& second) {
    TsquaredSeries out = first;
    out.values.insert(out.values.end(), second.values.begin(), second.values.end());
    out.frame_indices.insert(out.frame_indices.end(), second.frame_indices.begin(), second.frame_indices.end());
    return out;
}

CorrelationOutcome correlate(const MotionSeries& motion, const TsquaredSeries& tsq, AlignedPairs* pairs_out) {
    CorrelationOutcome outcome;
    AlignedPairs pairs = align_by_frame(motion.frame_indices(), motion.amounts(), tsq.frame_indices, tsq.values);
    try {
        outcome.report = pearson(pairs.a, pairs.b, {"motion_amount", "tsquared"});
    } catch (const Error& e) {
        outcome.error = e.what();
    }
    if (pairs_out) *pairs_out = std::move(pairs);
    return outcome;
}

}  // namespace

StepAnalysis analyze_step(const PreparedStream& prepared, const AnalysisConfig& config, StepSpec step) {
    const auto& stream = prepared.stream;
    MotionSeries motion = motion_series(stream, prepared.selection, step);
    const FeatureMatrix features = monitored_features(stream, prepared.selection, config.feature_kind, step);
    const FeatureSplit split = split_at(features, phase_boundary(stream, config.phase1_fraction));

    PhaseIModel model = fit_phase1(split.phase1, phase1_options(config, step));
    const TsquaredSeries phase1 = tsquared_series(model, split.phase1, Phase::I);
    TsquaredSeries phase2;
    phase2.phase = Phase::II;
    if (split.phase2.rows() > 0) phase2 = tsquared_series(model, split.phase2, Phase::II);

    StepResult result;
    result.step = step.step();
    result.lag = step.lag();
    const auto amounts = motion.amounts();
    result.motion_amount = summarize(amounts);
    result.velocity = summarize(motion.velocities());
    if (const auto accel = motion.accelerations(); !accel.empty()) result.acceleration = summarize(accel);
    result.rmsd = rmsd(amounts);
    result.model = ModelSummary::of(model);
    result.phase1_tsquared = summarize(phase1.values, model.ucl());
    if (!phase2.values.empty()) {
        result.phase2_tsquared = summarize(phase2.values, model.ucl());
        result.phase2_warnings = warnings_in(phase2, model.ucl());
    }

    TsquaredSeries all = concat(phase1, phase2);
    result.correlation = correlate(motion, all, nullptr);
    return {std::move(result), std::move(motion), std::move(model), std::move(all)};
}

std::vector<StepAnalysis> analyze_steps(const PreparedStream& prepared, const AnalysisConfig& config,
                                        bool parallel) {
    std::vector<StepAnalysis> out;
    out.reserve(config.steps.size());
    if (!parallel) {
        for (int s : config.steps) out.push_back(analyze_step(prepared, config, StepSpec(s)));
        return out;
    }
    std::vector<std::future<StepAnalysis>> jobs;
    for (int s : config.steps) {
        jobs.push_back(std::async(std::launch::async,
                                  [&prepared, &config, s] { return analyze_step(prepared, config, StepSpec(s)); }));
    }
    for (auto& job : jobs) out.push_back(job.get());
    return out;
}

ResultBundle analyze(const LandmarkStream& raw, const AnalysisConfig& config, bool parallel) {
    const PreparedStream prepared = prepare_stream(raw, config);
    ResultBundle bundle;
    bundle.config = config;
    bundle.input.source = raw.metadata().source;
    bundle.input.participant = raw.metadata().participant;
    bundle.input.task = config.task ? config.task : raw.metadata().task;
    bundle.input.unit_label = raw.metadata().unit_label;
    bundle.input.fps = raw.fps();
    bundle.input.frame_count = static_cast<std::int64_t>(raw.size());
    for (LandmarkId id : prepared.selection.ids()) bundle.input.landmarks.push_back(id.index());
    for (auto& step : analyze_steps(prepared, config, parallel)) bundle.steps.push_back(std::move(step.result));
    return bundle;
}

StreamCorrelation correlate_stream(const LandmarkStream& raw, const AnalysisConfig& config) {
    const PreparedStream prepared = prepare_stream(raw, config);
    StreamCorrelation out;
    out.source = raw.metadata().source;
    out.task = config.task ? config.task : raw.metadata().task;
    for (int s : config.steps) {
        StepCorrelation sc;
        sc.step = s;
        try {
            const StepSpec step(s);
            const MotionSeries motion = motion_series(prepared.stream, prepared.selection, step);
            const auto amounts = motion.amounts();
            if (std::all_of(amounts.begin(), amounts.end(), [&](double v) { return v == amounts.front(); })) {
                throw Error(ErrorCode::ZeroVariance, "motion amount is constant at step " + std::to_string(s));
            }
            const FeatureMatrix features = monitored_features(prepared.stream, prepared.selection,
                                                              config.feature_kind, step);
            const FeatureSplit split = split_at(features, phase_boundary(prepared.stream, config.phase1_fraction));
            const PhaseIModel model = fit_phase1(split.phase1, phase1_options(config, step));
            TsquaredSeries all = tsquared_series(model, features, Phase::I);
            sc.outcome = correlate(motion, all, &sc.pairs);
        } catch (const Error& e) {
            sc.outcome.error = e.what();
        }
        out.steps.push_back(std::move(sc));
    }
    return out;
}

std::vector<StepComparison> compare_streams(const std::vector<StreamCorrelation>& streams,
                                            const AnalysisConfig& config, ComparisonMethod method) {
    std::vector<StepComparison> out;
    for (std::size_t k = 0; k < config.steps.size(); ++k) {
        StepComparison cmp;
        cmp.step = config.steps[k];
        std::vector<std::pair<TaskCode, CorrelationReport>> reports;
        std::vector<TaskSeries> series;
        for (const auto& s : streams) {
            if (!s.task || k >= s.steps.size() || !s.steps[k].outcome.report) continue;
            reports.emplace_back(*s.task, *s.steps[k].outcome.report);
            series.push_back({*s.task, s.steps[k].pairs.a, s.steps[k].pairs.b});
        }
        try {
            cmp.report = method == ComparisonMethod::Pooled ? compare_pooled_correlations(series)
                                                            : compare_task_correlations(reports);
        } catch (const Error& e) {
            cmp.error = e.what();
        }
        out.push_back(std::move(cmp));
    }
    return out;
}

std::string write_correlation_report(const AnalysisConfig& config, ComparisonMethod method,
                                     const std::vector<StreamCorrelation>& streams,
                                     const std::vector<StepComparison>& comparisons) {
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["version"] = "motionspc/1";
    doc["config"] = config_to_json(config);
    ordered_json items = ordered_json::array();
    for (const auto& s : streams) {
        ordered_json item;
        item["source"] = s.source;
        if (s.task) item["task"] = s.task->to_string();
        ordered_json steps = ordered_json::array();
        for (const auto& st : s.steps) {
            ordered_json entry;
            entry["step"] = st.step;
            entry.update(correlation_to_json(st.outcome));
            steps.push_back(std::move(entry));
        }
        item["steps"] = std::move(steps);
        items.push_back(std::move(item));
    }
    doc["streams"] = std::move(items);
    if (!comparisons.empty()) {
        ordered_json cmp = ordered_json::object();
        cmp["method"] = std::string(to_string(method));
        ordered_json steps = ordered_json::array();
        for (const auto& c : comparisons) {
            ordered_json entry;
            entry["step"] = c.step;
            if (c.report) {
                entry["small_pcc"] = c.report->small_pcc;
                entry["large_pcc"] = c.report->large_pcc;
                entry["small_tasks"] = c.report->small_tasks;
                entry["large_tasks"] = c.report->large_tasks;
                entry["percent_difference"] = c.report->percent_difference;
            }
            if (c.error) entry["error"] = *c.error;
            steps.push_back(std::move(entry));
        }
        cmp["steps"] = std::move(steps);
        doc["comparison"] = std::move(cmp);
    }
    return canonical_dump(doc, 2) + "\n";
}

LiveMonitor::LiveMonitor(const PhaseIModel& model, LandmarkSelection selection, FeatureKind kind, StepSpec step,
                         GapOptions gap)
    : monitor_(model),
      selection_(selection),
      kind_(kind),
      step_(step),
      filler_(selection, gap),
      tracker_(selection, step) {}

std::optional<Eigen::VectorXd> LiveMonitor::features(const LandmarkFrame& frame) {
    const LandmarkFrame filled = filler_.fill(frame);
    if (kind_ == FeatureKind::Positions) return frame_features(filled, selection_);
    return tracker_.push(filled);
}

void LiveMonitor::prime(const LandmarkFrame& frame) { features(frame); }

std::optional<Phase2Monitor::Outcome> LiveMonitor::push(const LandmarkFrame& frame) {
    auto x = features(frame);
    if (!x) return std::nullopt;
    return monitor_.observe(frame.frame_index(), *x);
}

PhaseIModel fit_baseline(const PreparedStream& baseline, const AnalysisConfig& config, StepSpec step) {
    const FeatureMatrix features = monitored_features(baseline.stream, baseline.selection, config.feature_kind, step);
    return fit_phase1(features, phase1_options(config, step));
}

}  // namespace motionspc
