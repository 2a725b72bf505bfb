#include "motionspc/results.hpp"

#include "motionspc/canonical_json.hpp"
#include "motionspc/error.hpp"
#include "motionspc/stream_io.hpp"

#include <charconv>
#include <cmath>

namespace motionspc {

using nlohmann::json;
using nlohmann::ordered_json;

ModelSummary ModelSummary::of(const PhaseIModel& model) {
    ModelSummary s;
    s.p = model.dimension();
    s.rank = model.rank();
    s.n = model.sample_size();
    s.alpha = model.alpha();
    s.ucl = model.ucl();
    s.lcl = model.lcl();
    s.estimator = model.estimator();
    s.limit_family = model.limit_family();
    s.inverse_method = model.inverse_method();
    s.feature_kind = model.feature_kind();
    s.feature_step = model.feature_step();
    return s;
}

namespace {

InverseMethod parse_inverse_method(std::string_view text) {
    if (text == "exact") return InverseMethod::Exact;
    if (text == "pseudo-inverse") return InverseMethod::PseudoInverse;
    throw Error(ErrorCode::ParseError, "unknown inverse method '" + std::string(text) + "'");
}

ordered_json model_to_json(const ModelSummary& m) {
    ordered_json doc;
    doc["p"] = m.p;
    doc["rank"] = m.rank;
    doc["n"] = m.n;
    doc["alpha"] = m.alpha;
    doc["ucl"] = m.ucl;
    doc["lcl"] = m.lcl;
    doc["estimator"] = std::string(to_string(m.estimator));
    doc["limit_family"] = std::string(to_string(m.limit_family));
    doc["inverse_method"] = std::string(to_string(m.inverse_method));
    doc["feature_kind"] = std::string(to_string(m.feature_kind));
    if (m.feature_step) doc["feature_step"] = *m.feature_step;
    return doc;
}

ModelSummary model_from_json(const json& doc) {
    ModelSummary m;
    m.p = doc.at("p").get<std::int64_t>();
    m.rank = doc.at("rank").get<std::int64_t>();
    m.n = doc.at("n").get<std::int64_t>();
    m.alpha = doc.at("alpha").get<double>();
    m.ucl = doc.at("ucl").get<double>();
    m.lcl = doc.at("lcl").get<double>();
    m.estimator = parse_estimator(doc.at("estimator").get<std::string>());
    m.limit_family = parse_limit_family(doc.at("limit_family").get<std::string>());
    m.inverse_method = parse_inverse_method(doc.at("inverse_method").get<std::string>());
    m.feature_kind = parse_feature_kind(doc.at("feature_kind").get<std::string>());
    if (doc.contains("feature_step")) m.feature_step = doc.at("feature_step").get<int>();
    return m;
}

}  // namespace

ordered_json warning_to_json(const WarningEvent& w) {
    ordered_json doc;
    doc["frame_index"] = w.frame_index;
    doc["tsquared"] = w.tsquared;
    doc["ucl"] = w.ucl;
    doc["excess_ratio"] = w.excess_ratio;
    return doc;
}

WarningEvent warning_from_json(const json& doc) {
    return {doc.at("frame_index").get<std::int64_t>(), doc.at("tsquared").get<double>(), doc.at("ucl").get<double>(),
            doc.at("excess_ratio").get<double>()};
}

ordered_json correlation_to_json(const CorrelationOutcome& c) {
    ordered_json doc;
    if (c.report) {
        doc["pcc"] = c.report->pcc;
        doc["n_pairs"] = c.report->n_pairs;
        doc["series_labels"] = {c.report->series_labels.first, c.report->series_labels.second};
    }
    if (c.error) doc["error"] = *c.error;
    return doc;
}

CorrelationOutcome correlation_from_json(const json& doc) {
    CorrelationOutcome c;
    if (doc.contains("pcc")) {
        const auto& labels = doc.at("series_labels");
        c.report = CorrelationReport{doc.at("pcc").get<double>(), doc.at("n_pairs").get<std::size_t>(),
                                     {labels.at(0).get<std::string>(), labels.at(1).get<std::string>()}};
    }
    if (doc.contains("error")) c.error = doc.at("error").get<std::string>();
    return c;
}

namespace {

ordered_json step_to_json(const StepResult& s) {
    ordered_json doc;
    doc["step"] = s.step;
    doc["lag"] = s.lag;
    doc["motion_amount"] = summary_to_json(s.motion_amount);
    doc["velocity"] = summary_to_json(s.velocity);
    if (s.acceleration) doc["acceleration"] = summary_to_json(*s.acceleration);
    doc["rmsd"] = s.rmsd;
    doc["model"] = model_to_json(s.model);
    doc["phase1_tsquared"] = summary_to_json(s.phase1_tsquared);
    if (s.phase2_tsquared) doc["phase2_tsquared"] = summary_to_json(*s.phase2_tsquared);
    ordered_json warnings = ordered_json::array();
    for (const auto& w : s.phase2_warnings) warnings.push_back(warning_to_json(w));
    doc["phase2_warnings"] = std::move(warnings);
    doc["correlation"] = correlation_to_json(s.correlation);
    return doc;
}

StepResult step_from_json(const json& doc) {
    StepResult s;
    s.step = doc.at("step").get<int>();
    s.lag = doc.at("lag").get<int>();
    s.motion_amount = summary_from_json(doc.at("motion_amount"));
    s.velocity = summary_from_json(doc.at("velocity"));
    if (doc.contains("acceleration")) s.acceleration = summary_from_json(doc.at("acceleration"));
    s.rmsd = doc.at("rmsd").get<double>();
    s.model = model_from_json(doc.at("model"));
    s.phase1_tsquared = summary_from_json(doc.at("phase1_tsquared"));
    if (doc.contains("phase2_tsquared")) s.phase2_tsquared = summary_from_json(doc.at("phase2_tsquared"));
    for (const auto& w : doc.at("phase2_warnings")) s.phase2_warnings.push_back(warning_from_json(w));
    s.correlation = correlation_from_json(doc.at("correlation"));
    return s;
}

ordered_json input_to_json(const InputSummary& in) {
    ordered_json doc;
    doc["source"] = in.source;
    doc["participant"] = in.participant;
    doc["task_code"] = in.task ? ordered_json(in.task->to_string()) : ordered_json(nullptr);
    doc["unit_label"] = in.unit_label;
    doc["fps"] = in.fps;
    doc["frame_count"] = in.frame_count;
    doc["landmarks"] = in.landmarks;
    return doc;
}

InputSummary input_from_json(const json& doc) {
    InputSummary in;
    in.source = doc.at("source").get<std::string>();
    in.participant = doc.at("participant").get<std::string>();
    if (!doc.at("task_code").is_null()) in.task = parse_task_code(doc.at("task_code").get<std::string>());
    in.unit_label = doc.at("unit_label").get<std::string>();
    in.fps = doc.at("fps").get<double>();
    in.frame_count = doc.at("frame_count").get<std::int64_t>();
    in.landmarks = doc.at("landmarks").get<std::vector<int>>();
    return in;
}

}  // namespace

ordered_json summary_to_json(const SummaryStats& s) {
    ordered_json doc;
    doc["count"] = s.count;
    doc["mean"] = s.mean;
    doc["median"] = s.median;
    doc["std_dev"] = s.std_dev;
    doc["min"] = s.min;
    doc["max"] = s.max;
    if (s.warnings) doc["warnings"] = *s.warnings;
    return doc;
}

SummaryStats summary_from_json(const json& doc) {
    SummaryStats s;
    s.count = doc.at("count").get<std::size_t>();
    s.mean = doc.at("mean").get<double>();
    s.median = doc.at("median").get<double>();
    s.std_dev = doc.at("std_dev").get<double>();
    s.min = doc.at("min").get<double>();
    s.max = doc.at("max").get<double>();
    if (doc.contains("warnings")) s.warnings = doc.at("warnings").get<std::size_t>();
    return s;
}

std::string write_results(const ResultBundle& bundle) {
    ordered_json doc;
    doc["version"] = bundle.version;
    doc["config"] = config_to_json(bundle.config);
    doc["input"] = input_to_json(bundle.input);
    ordered_json steps = ordered_json::array();
    for (const auto& s : bundle.steps) steps.push_back(step_to_json(s));
    doc["steps"] = std::move(steps);
    return canonical_dump(doc, 2) + "\n";
}

ResultBundle read_results(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::ParseError, "results document is not a JSON object");
    ResultBundle bundle;
    try {
        bundle.version = doc.at("version").get<std::string>();
        check_version(bundle.version);
        bundle.config = config_from_json(doc.at("config"));
        bundle.input = input_from_json(doc.at("input"));
        for (const auto& s : doc.at("steps")) bundle.steps.push_back(step_from_json(s));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("results: ") + e.what());
    }
    return bundle;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed(double value, int precision) {
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::fixed, precision);
    if (ec != std::errc()) return "?";
    return std::string(buffer, end);
}

std::string pad(std::string text, std::size_t width) {
    if (text.size() < width) text.insert(0, width - text.size(), ' ');
    return text;
}

struct Row {
    std::string label;
    std::vector<std::string> cells;
};

void table(std::string& out, const std::string& title, const std::vector<std::string>& header,
           const std::vector<Row>& rows) {
    constexpr std::size_t label_width = 16;
    constexpr std::size_t cell_width = 14;
    out += title + "\n";
    std::string line = pad("", label_width);
    for (const auto& h : header) line += pad(h, cell_width);
    out += line + "\n";
    out += std::string(line.size(), '-') + "\n";
    for (const auto& row : rows) {
        std::string text = row.label;
        text.resize(label_width, ' ');
        for (const auto& c : row.cells) text += pad(c, cell_width);
        out += text + "\n";
    }
    out += "\n";
}

std::vector<Row> summary_rows(const std::vector<const SummaryStats*>& columns, int precision) {
    std::vector<Row> rows = {{"Count", {}}, {"Mean", {}}, {"Median", {}}, {"Std. Deviation", {}},
                             {"Minimum", {}}, {"Maximum", {}}};
    for (const auto* s : columns) {
        if (!s) {
            for (auto& r : rows) r.cells.push_back("-");
            continue;
        }
        rows[0].cells.push_back(std::to_string(s->count));
        rows[1].cells.push_back(fixed(s->mean, precision));
        rows[2].cells.push_back(fixed(s->median, precision));
        rows[3].cells.push_back(fixed(s->std_dev, precision));
        rows[4].cells.push_back(fixed(s->min, precision));
        rows[5].cells.push_back(fixed(s->max, precision));
    }
    return rows;
}

}  // namespace

std::string render_results_table(const ResultBundle& bundle) {
    std::string out;
    const std::string task = bundle.input.task ? bundle.input.task->to_string() : std::string("-");
    out += "Task " + task + ", " + std::to_string(bundle.input.frame_count) + " frames at " +
           fixed(bundle.input.fps, 2) + " fps, units: " + bundle.input.unit_label + "\n\n";

    std::vector<std::string> header;
    std::vector<const SummaryStats*> amount, velocity, accel;
    for (const auto& s : bundle.steps) {
        header.push_back("Step " + std::to_string(s.step));
        amount.push_back(&s.motion_amount);
        velocity.push_back(&s.velocity);
        accel.push_back(s.acceleration ? &*s.acceleration : nullptr);
    }
    table(out, "Motion amount", header, summary_rows(amount, 6));
    table(out, "Velocity (units/s)", header, summary_rows(velocity, 6));
    table(out, "Acceleration (units/s^2)", header, summary_rows(accel, 6));

    std::vector<Row> extra = {{"RMSD", {}}, {"UCL", {}}};
    for (const auto& s : bundle.steps) {
        extra[0].cells.push_back(fixed(s.rmsd, 6));
        extra[1].cells.push_back(fixed(s.model.ucl, 4));
    }
    table(out, "Dispersion and control limit", header, extra);

    out += "Control chart statistics\n";
    const std::vector<std::string> cols = {"Phase", "Step", "Count", "Mean", "Median", "Max", "Min", "Std Dev", "Warnings"};
    std::string line;
    for (const auto& c : cols) line += pad(c, 10);
    out += line + "\n" + std::string(line.size(), '-') + "\n";
    auto chart_row = [&](const char* phase, int step, const SummaryStats& s) {
        std::string text = pad(phase, 10) + pad(std::to_string(step), 10) + pad(std::to_string(s.count), 10) +
                           pad(fixed(s.mean, 2), 10) + pad(fixed(s.median, 2), 10) + pad(fixed(s.max, 2), 10) +
                           pad(fixed(s.min, 2), 10) + pad(fixed(s.std_dev, 2), 10) +
                           pad(s.warnings ? std::to_string(*s.warnings) : "-", 10);
        out += text + "\n";
    };
    for (const auto& s : bundle.steps) {
        chart_row("I", s.step, s.phase1_tsquared);
        if (s.phase2_tsquared) chart_row("II", s.step, *s.phase2_tsquared);
    }
    out += "\nCorrelation of motion amount with T^2\n";
    for (const auto& s : bundle.steps) {
        out += "  step " + std::to_string(s.step) + ": ";
        if (s.correlation.report) {
            out += "pcc " + fixed(s.correlation.report->pcc, 4) + " over " +
                   std::to_string(s.correlation.report->n_pairs) + " frames\n";
        } else {
            out += s.correlation.error.value_or("not computed") + "\n";
        }
    }
    return out;
}

}  // namespace motionspc
