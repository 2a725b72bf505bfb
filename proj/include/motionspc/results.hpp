#pragma once

#include "motionspc/config.hpp"
#include "motionspc/hotelling.hpp"
#include "motionspc/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionspc {

struct ModelSummary {
    std::int64_t p = 0;
    std::int64_t rank = 0;
    std::int64_t n = 0;
    double alpha = 0.0;
    double ucl = 0.0;
    double lcl = 0.0;
    CovarianceEstimator estimator = CovarianceEstimator::Sample;
    LimitFamily limit_family = LimitFamily::F;
    InverseMethod inverse_method = InverseMethod::Exact;
    FeatureKind feature_kind = FeatureKind::MotionVectors;
    std::optional<int> feature_step;

    static ModelSummary of(const PhaseIModel& model);
    friend bool operator==(const ModelSummary&, const ModelSummary&) = default;
};

/// Either a correlation or the reason it could not be computed.
struct CorrelationOutcome {
    std::optional<CorrelationReport> report;
    std::optional<std::string> error;

    friend bool operator==(const CorrelationOutcome&, const CorrelationOutcome&) = default;
};

/// Statistics for one frame step. Motion summaries use the sample standard
/// deviation; `rmsd` is the population deviation of the motion amounts.
struct StepResult {
    int step = 0;
    int lag = 1;
    SummaryStats motion_amount;
    SummaryStats velocity;
    std::optional<SummaryStats> acceleration;
    double rmsd = 0.0;
    ModelSummary model;
    SummaryStats phase1_tsquared;
    std::optional<SummaryStats> phase2_tsquared;
    std::vector<WarningEvent> phase2_warnings;
    CorrelationOutcome correlation;

    friend bool operator==(const StepResult&, const StepResult&) = default;
};

struct InputSummary {
    std::string source;
    std::string participant;
    std::optional<TaskCode> task;
    std::string unit_label;
    double fps = 0.0;
    std::int64_t frame_count = 0;
    std::vector<int> landmarks;

    friend bool operator==(const InputSummary&, const InputSummary&) = default;
};

struct ResultBundle {
    std::string version = "motionspc/1";
    AnalysisConfig config;
    InputSummary input;
    std::vector<StepResult> steps;

    friend bool operator==(const ResultBundle&, const ResultBundle&) = default;
};

nlohmann::ordered_json summary_to_json(const SummaryStats& stats);
nlohmann::ordered_json warning_to_json(const WarningEvent& warning);
WarningEvent warning_from_json(const nlohmann::json& doc);
nlohmann::ordered_json correlation_to_json(const CorrelationOutcome& outcome);
CorrelationOutcome correlation_from_json(const nlohmann::json& doc);
SummaryStats summary_from_json(const nlohmann::json& doc);

/// Structured document with one block per step. Throws
/// Error(SerializationError) when a number is not finite.
std::string write_results(const ResultBundle& bundle);
/// Throws Error(ParseError), Error(SchemaVersionError).
ResultBundle read_results(std::string_view text);

/// Fixed-width text tables: motion amount, velocity and acceleration per
/// step, then the control-chart statistics.
std::string render_results_table(const ResultBundle& bundle);

}  // namespace motionspc
