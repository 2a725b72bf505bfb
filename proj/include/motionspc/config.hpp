#pragma once

#include "motionspc/hotelling.hpp"
#include "motionspc/landmark.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionspc {

/// Everything that determines an analysis run besides the input stream.
struct AnalysisConfig {
    std::optional<TaskCode> task;
    /// Explicit landmark indices; takes precedence over the task code.
    std::optional<std::vector<int>> landmarks;
    std::vector<int> steps{0, 2, 4};
    double alpha = 0.0027;
    CovarianceEstimator estimator = CovarianceEstimator::Sample;
    LimitFamily limit_family = LimitFamily::F;
    FeatureKind feature_kind = FeatureKind::MotionVectors;
    double phase1_fraction = 0.5;
    double visibility_threshold = 0.5;
    GapPolicy gap_policy = GapPolicy::CarryForward;
    std::uint64_t seed = 7;

    friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

/// Throws Error(InvalidArgument) naming the offending field.
void validate_config(const AnalysisConfig& config);

/// Explicit landmarks, else the config task, else the stream's task.
/// Throws Error(InvalidArgument) when none is available.
LandmarkSelection resolve_selection(const AnalysisConfig& config, const StreamMetadata& metadata);

std::string_view to_string(GapPolicy policy);
GapPolicy parse_gap_policy(std::string_view text);

nlohmann::ordered_json config_to_json(const AnalysisConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
/// Throws Error(ParseError).
AnalysisConfig config_from_json(const nlohmann::json& doc);

std::string write_config(const AnalysisConfig& config);
AnalysisConfig read_config(std::string_view text);

}  // namespace motionspc
