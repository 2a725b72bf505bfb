#include "motionspc/config.hpp"

#include "motionspc/canonical_json.hpp"
#include "motionspc/error.hpp"

#include <set>

namespace motionspc {

using nlohmann::json;
using nlohmann::ordered_json;

void validate_config(const AnalysisConfig& config) {
    auto fail = [](const std::string& why) { return Error(ErrorCode::InvalidArgument, "config: " + why); };
    if (config.steps.empty()) throw fail("'steps' must not be empty");
    for (int s : config.steps)
        if (s < 0) throw fail("'steps' entries must be non-negative");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw fail("'alpha' must lie in (0, 1)");
    if (!(config.phase1_fraction > 0.0 && config.phase1_fraction < 1.0)) {
        throw fail("'phase1_fraction' must lie in (0, 1)");
    }
    if (!(config.visibility_threshold >= 0.0 && config.visibility_threshold <= 1.0)) {
        throw fail("'visibility_threshold' must lie in [0, 1]");
    }
    if (config.landmarks) {
        std::vector<LandmarkId> ids;
        for (int i : *config.landmarks) ids.emplace_back(i);
        LandmarkSelection check(std::move(ids));
    }
}

LandmarkSelection resolve_selection(const AnalysisConfig& config, const StreamMetadata& metadata) {
    if (config.landmarks) {
        std::vector<LandmarkId> ids;
        for (int i : *config.landmarks) ids.emplace_back(i);
        return LandmarkSelection(std::move(ids), "custom");
    }
    if (config.task) return selection_for_task(*config.task);
    if (metadata.task) return selection_for_task(*metadata.task);
    throw Error(ErrorCode::InvalidArgument, "no task code or landmark list given and the stream header names no task");
}

std::string_view to_string(GapPolicy policy) { return policy == GapPolicy::None ? "none" : "carry-forward"; }

GapPolicy parse_gap_policy(std::string_view text) {
    if (text == "none") return GapPolicy::None;
    if (text == "carry-forward") return GapPolicy::CarryForward;
    throw Error(ErrorCode::InvalidArgument, "unknown gap policy '" + std::string(text) + "'");
}

ordered_json config_to_json(const AnalysisConfig& c) {
    ordered_json doc;
    doc["task_code"] = c.task ? ordered_json(c.task->to_string()) : ordered_json(nullptr);
    doc["landmarks"] = c.landmarks ? ordered_json(*c.landmarks) : ordered_json(nullptr);
    doc["steps"] = c.steps;
    doc["alpha"] = c.alpha;
    doc["estimator"] = std::string(to_string(c.estimator));
    doc["limit_family"] = std::string(to_string(c.limit_family));
    doc["feature_kind"] = std::string(to_string(c.feature_kind));
    doc["phase1_fraction"] = c.phase1_fraction;
    doc["visibility_threshold"] = c.visibility_threshold;
    doc["gap_policy"] = std::string(to_string(c.gap_policy));
    doc["seed"] = c.seed;
    return doc;
}

AnalysisConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::ParseError, "config must be an object");
    static const std::set<std::string> known = {"task_code",       "landmarks",    "steps",
                                                "alpha",           "estimator",    "limit_family",
                                                "feature_kind",    "phase1_fraction", "visibility_threshold",
                                                "gap_policy",      "seed"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) throw Error(ErrorCode::ParseError, "config: unknown key '" + key + "'");
    }

    AnalysisConfig c;
    try {
        if (auto it = doc.find("task_code"); it != doc.end() && !it->is_null()) {
            c.task = parse_task_code(it->get<std::string>());
        }
        if (auto it = doc.find("landmarks"); it != doc.end() && !it->is_null()) {
            c.landmarks = it->get<std::vector<int>>();
        }
        if (auto it = doc.find("steps"); it != doc.end()) c.steps = it->get<std::vector<int>>();
        if (auto it = doc.find("alpha"); it != doc.end()) c.alpha = it->get<double>();
        if (auto it = doc.find("estimator"); it != doc.end()) c.estimator = parse_estimator(it->get<std::string>());
        if (auto it = doc.find("limit_family"); it != doc.end()) {
            c.limit_family = parse_limit_family(it->get<std::string>());
        }
        if (auto it = doc.find("feature_kind"); it != doc.end()) {
            c.feature_kind = parse_feature_kind(it->get<std::string>());
        }
        if (auto it = doc.find("phase1_fraction"); it != doc.end()) c.phase1_fraction = it->get<double>();
        if (auto it = doc.find("visibility_threshold"); it != doc.end()) c.visibility_threshold = it->get<double>();
        if (auto it = doc.find("gap_policy"); it != doc.end()) c.gap_policy = parse_gap_policy(it->get<std::string>());
        if (auto it = doc.find("seed"); it != doc.end()) c.seed = it->get<std::uint64_t>();
        validate_config(c);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return c;
}

std::string write_config(const AnalysisConfig& config) { return canonical_dump(config_to_json(config), 2) + "\n"; }

AnalysisConfig read_config(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::ParseError, "config is not valid JSON");
    return config_from_json(doc);
}

}  // namespace motionspc
