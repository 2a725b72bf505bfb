#pragma once

#include "motionspc/config.hpp"
#include "motionspc/hotelling.hpp"
#include "motionspc/landmark.hpp"
#include "motionspc/motion.hpp"
#include "motionspc/results.hpp"
#include "motionspc/stats.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace motionspc {

/// Gap-filled stream plus the landmark selection it was filled for.
struct PreparedStream {
    LandmarkStream stream;
    LandmarkSelection selection;
};

PreparedStream prepare_stream(const LandmarkStream& raw, const AnalysisConfig& config);

/// Rows taken at frame positions [0, floor(fraction * n)) belong to Phase I.
/// Returns the first frame index of Phase II. Throws Error(InsufficientData)
/// when either part would be empty.
std::int64_t phase_boundary(const LandmarkStream& stream, double phase1_fraction);

/// Positions, or motion vectors at `step`.
FeatureMatrix monitored_features(const LandmarkStream& stream, const LandmarkSelection& selection,
                                 FeatureKind kind, StepSpec step);

struct FeatureSplit {
    FeatureMatrix phase1;
    FeatureMatrix phase2;
};

/// Rows with frame_index < boundary go to Phase I.
FeatureSplit split_at(const FeatureMatrix& features, std::int64_t boundary);

Phase1Options phase1_options(const AnalysisConfig& config, StepSpec step);

/// Pairs a-values and b-values that share a frame index (both inputs sorted).
struct AlignedPairs {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<std::int64_t> frame_indices;
};
AlignedPairs align_by_frame(const std::vector<std::int64_t>& frames_a, const std::vector<double>& a,
                            const std::vector<std::int64_t>& frames_b, const std::vector<double>& b);

/// Everything computed for one step. `tsquared` covers Phase I and II rows
/// evaluated against the Phase I model.
struct StepAnalysis {
    StepResult result;
    MotionSeries motion;
    PhaseIModel model;
    TsquaredSeries tsquared;
};

StepAnalysis analyze_step(const PreparedStream& prepared, const AnalysisConfig& config, StepSpec step);

/// Runs every configured step; with `parallel` the steps run concurrently
/// and are reported in configuration order.
ResultBundle analyze(const LandmarkStream& raw, const AnalysisConfig& config, bool parallel = false);
std::vector<StepAnalysis> analyze_steps(const PreparedStream& prepared, const AnalysisConfig& config,
                                        bool parallel = false);

struct StepCorrelation {
    int step = 0;
    CorrelationOutcome outcome;
    AlignedPairs pairs;  ///< motion amount (a) and T^2 (b)
};

struct StreamCorrelation {
    std::string source;
    std::optional<TaskCode> task;
    std::vector<StepCorrelation> steps;
};

/// Per-step PCC between motion amount and T^2 over shared frames. Failures
/// such as ZeroVariance are recorded per step.
StreamCorrelation correlate_stream(const LandmarkStream& raw, const AnalysisConfig& config);

struct StepComparison {
    int step = 0;
    std::optional<ComparisonReport> report;
    std::optional<std::string> error;
};

/// S-vs-L comparison per configured step across several recordings.
std::vector<StepComparison> compare_streams(const std::vector<StreamCorrelation>& streams,
                                            const AnalysisConfig& config, ComparisonMethod method);

/// Structured correlation document: the effective config, per-stream step
/// outcomes and, when `comparisons` is non-empty, the S-vs-L comparison.
std::string write_correlation_report(const AnalysisConfig& config, ComparisonMethod method,
                                     const std::vector<StreamCorrelation>& streams,
                                     const std::vector<StepComparison>& comparisons);

/// Online Phase II evaluation of landmark frames: gap filling, feature
/// extraction and T^2 against a fixed model.
class LiveMonitor {
public:
    LiveMonitor(const PhaseIModel& model, LandmarkSelection selection, FeatureKind kind, StepSpec step,
                GapOptions gap);

    /// Updates history without evaluating (frames preceding Phase II).
    void prime(const LandmarkFrame& frame);

    /// T^2 and possible warning for the feature vector ending at `frame`;
    /// nullopt while motion history is still filling. Throws
    /// Error(MissingLandmark) or Error(DimensionMismatch).
    std::optional<Phase2Monitor::Outcome> push(const LandmarkFrame& frame);

    StepSpec step() const noexcept { return step_; }

private:
    std::optional<Eigen::VectorXd> features(const LandmarkFrame& frame);

    Phase2Monitor monitor_;
    LandmarkSelection selection_;
    FeatureKind kind_;
    StepSpec step_;
    GapFiller filler_;
    MotionTracker tracker_;
};

/// Fits the Phase I model for one step on a whole (prepared) baseline.
PhaseIModel fit_baseline(const PreparedStream& baseline, const AnalysisConfig& config, StepSpec step);

}  // namespace motionspc
