// motionspc: command-line front end for the motionspc library.

#include "motionspc/analysis.hpp"
#include "motionspc/canonical_json.hpp"
#include "motionspc/chart.hpp"
#include "motionspc/config.hpp"
#include "motionspc/error.hpp"
#include "motionspc/results.hpp"
#include "motionspc/stream_io.hpp"
#include "motionspc/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace motionspc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAnalysis = 2;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::SchemaVersionError:
        case ErrorCode::IoError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidTaskCode:
        case ErrorCode::InvalidSpec:
            return kExitUsage;
        default:
            return kExitAnalysis;
    }
}

/// Flag values as given; unset flags leave the config-file value alone.
struct ConfigFlags {
    std::string config_path;
    std::optional<std::string> task;
    std::vector<int> steps;
    std::vector<int> landmarks;
    std::optional<double> alpha;
    std::optional<std::string> estimator;
    std::optional<std::string> limit_family;
    std::optional<std::string> feature_kind;
    std::optional<double> phase1_fraction;
    std::optional<double> visibility_threshold;
    std::optional<std::string> gap_policy;
    std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& f) {
    cmd.add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd.add_option("--task", f.task, "task code such as SGI or LFO");
    cmd.add_option("--steps", f.steps, "comma-separated frame steps")->delimiter(',');
    cmd.add_option("--landmarks", f.landmarks, "comma-separated landmark indices")->delimiter(',');
    cmd.add_option("--alpha", f.alpha, "false-alarm level");
    cmd.add_option("--estimator", f.estimator, "sample | successive-differences");
    cmd.add_option("--limit-family", f.limit_family, "f | beta");
    cmd.add_option("--feature-kind", f.feature_kind, "motion-vectors | positions");
    cmd.add_option("--phase1-fraction", f.phase1_fraction, "leading share of frames used for Phase I");
    cmd.add_option("--visibility-threshold", f.visibility_threshold, "landmarks below this visibility are gaps");
    cmd.add_option("--gap-policy", f.gap_policy, "carry-forward | none");
    cmd.add_option("--seed", f.seed, "seed recorded in the effective config");
}

AnalysisConfig resolve_config(const ConfigFlags& f) {
    AnalysisConfig config = f.config_path.empty() ? AnalysisConfig{} : read_config(read_text_file(f.config_path));
    if (f.task) config.task = parse_task_code(*f.task);
    if (!f.steps.empty()) config.steps = f.steps;
    if (!f.landmarks.empty()) config.landmarks = f.landmarks;
    if (f.alpha) config.alpha = *f.alpha;
    if (f.estimator) config.estimator = parse_estimator(*f.estimator);
    if (f.limit_family) config.limit_family = parse_limit_family(*f.limit_family);
    if (f.feature_kind) config.feature_kind = parse_feature_kind(*f.feature_kind);
    if (f.phase1_fraction) config.phase1_fraction = *f.phase1_fraction;
    if (f.visibility_threshold) config.visibility_threshold = *f.visibility_threshold;
    if (f.gap_policy) config.gap_policy = parse_gap_policy(*f.gap_policy);
    if (f.seed) config.seed = *f.seed;
    validate_config(config);
    return config;
}

std::string stem_of(const std::string& path) {
    if (path == "-") return "stdin";
    std::string name = fs::path(path).filename().string();
    for (std::string_view suffix : {".lmks.jsonl", ".jsonl"}) {
        if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
    }
    const std::string s = fs::path(name).stem().string();
    return s.empty() ? name : s;
}

LandmarkStream load(const std::string& path, ReadOptions options = {}) {
    if (path == "-") return read_stream(std::cin, options);
    return read_stream_file(path, options);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
}

void report(const std::string& where, const Error& e) { std::cerr << "motionspc: " << where << ": " << e.what() << "\n"; }

// ---------------------------------------------------------------------------

int run_analyze(const std::vector<std::string>& inputs, const AnalysisConfig& config, const fs::path& out_dir,
                bool parallel) {
    ensure_dir(out_dir);
    struct Job {
        std::optional<ResultBundle> bundle;
        std::optional<Error> error;
    };
    auto work = [&config, parallel](const std::string& path) {
        Job job;
        try {
            job.bundle = analyze(load(path), config, parallel);
        } catch (const Error& e) {
            job.error = e;
        }
        return job;
    };

    std::vector<Job> jobs;
    if (parallel) {
        std::vector<std::future<Job>> pending;
        for (const auto& path : inputs) pending.push_back(std::async(std::launch::async, work, path));
        for (auto& p : pending) jobs.push_back(p.get());
    } else {
        for (const auto& path : inputs) jobs.push_back(work(path));
    }

    int status = kExitOk;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (jobs[i].error) {
            report(inputs[i], *jobs[i].error);
            status = std::max(status, exit_code_for(jobs[i].error->code()));
            continue;
        }
        const fs::path base = out_dir / stem_of(inputs[i]);
        const fs::path json_path = base.string() + ".results.json";
        const fs::path text_path = base.string() + ".results.txt";
        write_text_file(json_path, write_results(*jobs[i].bundle));
        write_text_file(text_path, render_results_table(*jobs[i].bundle));
        std::cout << json_path.string() << "\n" << text_path.string() << "\n";
    }
    return status;
}

// ---------------------------------------------------------------------------

void error_line(std::size_t line, std::optional<std::int64_t> frame, const std::string& message) {
    nlohmann::ordered_json doc;
    doc["line"] = line;
    if (frame) doc["frame_index"] = *frame;
    doc["error"] = message;
    std::cerr << canonical_dump(doc) << std::endl;
}

/// Reads every parsable frame; unparsable records are reported and skipped.
template <class OnFrame>
void each_frame(StreamReader& reader, OnFrame&& on_frame) {
    for (;;) {
        std::optional<LandmarkFrame> frame;
        try {
            frame = reader.next();
        } catch (const Error& e) {
            error_line(e.line().value_or(reader.line()), std::nullopt, e.what());
            continue;
        }
        if (!frame) return;
        on_frame(std::move(*frame), reader.line());
    }
}

int run_monitor(const std::string& live_path, const std::string& baseline_path, const AnalysisConfig& config) {
    const StepSpec step(config.steps.front());
    std::ifstream file;
    std::istream* in = &std::cin;
    if (live_path != "-") {
        file.open(live_path);
        if (!file) throw Error(ErrorCode::IoError, "cannot open '" + live_path + "'");
        in = &file;
    }
    StreamReader reader(*in, ReadOptions{true});

    std::cerr << canonical_dump(nlohmann::ordered_json{{"config", config_to_json(config)}}) << std::endl;

    std::optional<PhaseIModel> model;
    std::optional<LandmarkSelection> selection;
    std::vector<std::pair<LandmarkFrame, std::size_t>> pending;
    std::size_t primed = 0;

    auto fit = [&](const LandmarkStream& phase1_raw) {
        try {
            const PreparedStream prepared = prepare_stream(phase1_raw, config);
            selection = prepared.selection;
            model = fit_baseline(prepared, config, step);
        } catch (const Error& e) {
            report("phase I", e);
            return false;
        }
        return true;
    };

    if (!baseline_path.empty()) {
        if (!fit(read_stream_file(baseline_path))) return kExitAnalysis;
    } else {
        each_frame(reader, [&](LandmarkFrame frame, std::size_t line) { pending.emplace_back(std::move(frame), line); });
        std::vector<LandmarkFrame> frames;
        for (const auto& [f, line] : pending) frames.push_back(f);
        const LandmarkStream whole(reader.header().fps, frames, reader.header().metadata);
        try {
            const std::int64_t boundary = phase_boundary(whole, config.phase1_fraction);
            while (primed < frames.size() && frames[primed].frame_index() < boundary) ++primed;
        } catch (const Error& e) {
            report("phase I", e);
            return kExitAnalysis;
        }
        frames.erase(frames.begin() + static_cast<std::ptrdiff_t>(primed), frames.end());
        if (!fit(LandmarkStream(reader.header().fps, std::move(frames), reader.header().metadata))) {
            return kExitAnalysis;
        }
    }

    LiveMonitor monitor(*model, *selection, config.feature_kind, step,
                        GapOptions{config.gap_policy, config.visibility_threshold});
    auto evaluate = [&](const LandmarkFrame& frame, std::size_t line) {
        try {
            const auto outcome = monitor.push(frame);
            if (outcome && outcome->warning) {
                const WarningEvent& w = *outcome->warning;
                nlohmann::ordered_json doc;
                doc["frame_index"] = w.frame_index;
                doc["step"] = step.step();
                doc["tsquared"] = w.tsquared;
                doc["ucl"] = w.ucl;
                doc["excess_ratio"] = w.excess_ratio;
                std::cout << canonical_dump(doc) << std::endl;
            }
        } catch (const Error& e) {
            error_line(line, frame.frame_index(), e.what());
        }
    };

    if (baseline_path.empty()) {
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (i < primed) {
                monitor.prime(pending[i].first);
            } else {
                evaluate(pending[i].first, pending[i].second);
            }
        }
    } else {
        each_frame(reader, evaluate);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

std::string task_label(const std::optional<TaskCode>& task) { return task ? task->to_string() : "stream"; }

int run_chart(const std::string& input, const AnalysisConfig& config, const fs::path& out_dir, bool parallel) {
    const LandmarkStream raw = load(input);
    const PreparedStream prepared = prepare_stream(raw, config);
    const std::string label = task_label(config.task ? config.task : raw.metadata().task);
    const auto steps = analyze_steps(prepared, config, parallel);
    ensure_dir(out_dir);

    for (const auto& s : steps) {
        ChartSpec spec;
        spec.title = label + " T² control chart, step " + std::to_string(s.result.step);
        spec.description = "source: " + raw.metadata().source + "; Phase I rows: " +
                           std::to_string(s.model.sample_size()) + "; alpha: " + format_double(config.alpha);
        const fs::path path = out_dir / (label + "_" + std::to_string(s.result.step) + "_chart.svg");
        write_text_file(path, render_control_chart(s.tsquared, s.model.ucl(), spec));
        std::cout << path.string() << "\n";
    }
    ChartSpec spec;
    spec.title = label + " landmark trajectories";
    spec.height = 520;
    spec.description = "source: " + raw.metadata().source;
    const fs::path path = out_dir / (label + "_trajectory.svg");
    write_text_file(path, render_trajectory(prepared.stream, prepared.selection, spec));
    std::cout << path.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

Vec3 parse_vec3(std::string_view text, std::string_view what) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) return Vec3::Constant(parse_number(parts[0], what));
    if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs one or three values");
    return {parse_number(parts[0], what), parse_number(parts[1], what), parse_number(parts[2], what)};
}

/// start:duration:ax,ay,az:id,id,...
Burst parse_burst(std::string_view text) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) {
        throw Error(ErrorCode::InvalidArgument, "burst '" + std::string(text) + "' must be start:duration:ax,ay,az:ids");
    }
    Burst burst;
    burst.start_frame = static_cast<std::int64_t>(parse_number(parts[0], "burst start"));
    burst.duration = static_cast<std::int64_t>(parse_number(parts[1], "burst duration"));
    burst.amplitude = parse_vec3(parts[2], "burst amplitude");
    for (const auto& id : split(parts[3], ',')) burst.landmarks.emplace_back(static_cast<int>(parse_number(id, "burst landmark")));
    return burst;
}

struct SynthFlags {
    std::uint64_t seed = 7;
    std::int64_t frames = 1100;
    double fps = LandmarkStream::kDefaultFps;
    std::string jitter = "0.002";
    std::optional<std::string> task;
    std::string participant = "synthetic";
    std::vector<int> landmarks;
    std::vector<std::string> bursts;
    std::string output = "-";
};

int run_synth(const SynthFlags& f) {
    SynthSpec spec;
    spec.seed = f.seed;
    spec.n_frames = f.frames;
    spec.fps = f.fps;
    spec.jitter_std = parse_vec3(f.jitter, "jitter");
    if (f.task) spec.task = parse_task_code(*f.task);
    spec.participant = f.participant;
    if (!f.landmarks.empty()) {
        std::vector<LandmarkId> ids;
        for (int i : f.landmarks) ids.emplace_back(i);
        spec.selection = LandmarkSelection(std::move(ids));
    }
    for (const auto& b : f.bursts) spec.bursts.push_back(parse_burst(b));
    const std::string text = write_stream(generate(spec));
    if (f.output == "-") {
        std::cout << text;
    } else {
        write_text_file(f.output, text);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

int run_correlate(const std::vector<std::string>& inputs, const AnalysisConfig& config, const fs::path& out_dir,
                  ComparisonMethod method, bool parallel) {
    auto work = [&config](const std::string& path) { return correlate_stream(load(path), config); };
    std::vector<StreamCorrelation> streams;
    if (parallel) {
        std::vector<std::future<StreamCorrelation>> pending;
        for (const auto& path : inputs) pending.push_back(std::async(std::launch::async, work, path));
        for (auto& p : pending) streams.push_back(p.get());
    } else {
        for (const auto& path : inputs) streams.push_back(work(path));
    }
    std::vector<StepComparison> comparisons;
    if (streams.size() > 1) comparisons = compare_streams(streams, config, method);

    ensure_dir(out_dir);
    const fs::path path = out_dir / "correlation.json";
    write_text_file(path, write_correlation_report(config, method, streams, comparisons));

    for (std::size_t i = 0; i < streams.size(); ++i) {
        for (const auto& s : streams[i].steps) {
            std::cout << stem_of(inputs[i]) << " step " << s.step << ": ";
            if (s.outcome.report) {
                std::cout << "pcc " << format_double(s.outcome.report->pcc) << " over " << s.outcome.report->n_pairs
                          << " frames\n";
            } else {
                std::cout << s.outcome.error.value_or("not computed") << "\n";
            }
        }
    }
    for (const auto& c : comparisons) {
        std::cout << "comparison step " << c.step << ": ";
        if (c.report) {
            std::cout << "S " << format_double(c.report->small_pcc) << ", L " << format_double(c.report->large_pcc)
                      << ", difference " << format_double(c.report->percent_difference) << "%\n";
        } else {
            std::cout << c.error.value_or("not computed") << "\n";
        }
    }
    std::cout << path.string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

int run_validate(const std::string& input) {
    const LandmarkStream stream = load(input, ReadOptions{false});
    const ValidationReport report = validate_stream(stream);
    std::cout << write_validation_report(report);
    return report.ok() ? kExitOk : kExitAnalysis;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-motion quantification and Hotelling T² monitoring of body-landmark streams"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(kStreamVersion));

    ConfigFlags flags;
    std::vector<std::string> inputs;
    std::string input;
    std::string out_dir = ".";
    bool parallel = false;
    std::string baseline;
    std::string comparison = "pooled";
    SynthFlags synth;

    auto* analyze_cmd = app.add_subcommand("analyze", "motion and T² statistics per step");
    analyze_cmd->add_option("inputs", inputs, "landmark streams")->required();
    add_config_flags(*analyze_cmd, flags);
    analyze_cmd->add_option("--out-dir", out_dir, "directory for result files");
    analyze_cmd->add_flag("--parallel", parallel, "analyze streams and steps concurrently");

    auto* monitor_cmd = app.add_subcommand("monitor", "stream warning events for live frames");
    monitor_cmd->add_option("input", input, "live stream, '-' for standard input")->default_val("-");
    monitor_cmd->add_option("--baseline", baseline, "stream used to fit Phase I");
    add_config_flags(*monitor_cmd, flags);

    auto* chart_cmd = app.add_subcommand("chart", "render control charts and trajectories");
    chart_cmd->add_option("input", input, "landmark stream")->required();
    add_config_flags(*chart_cmd, flags);
    chart_cmd->add_option("--out-dir", out_dir, "directory for SVG files");
    chart_cmd->add_flag("--parallel", parallel, "render steps concurrently");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic landmark stream");
    synth_cmd->add_option("--seed", synth.seed, "generator seed");
    synth_cmd->add_option("--frames", synth.frames, "number of frames");
    synth_cmd->add_option("--fps", synth.fps, "frame rate");
    synth_cmd->add_option("--jitter", synth.jitter, "jitter standard deviation, one value or x,y,z");
    synth_cmd->add_option("--task", synth.task, "task code written to the header");
    synth_cmd->add_option("--participant", synth.participant, "participant label");
    synth_cmd->add_option("--landmarks", synth.landmarks, "comma-separated landmark indices")->delimiter(',');
    synth_cmd->add_option("--burst", synth.bursts, "start:duration:ax,ay,az:id,id,...");
    synth_cmd->add_option("-o,--output", synth.output, "output path, '-' for standard output");

    auto* correlate_cmd = app.add_subcommand("correlate", "motion amount versus T² correlation");
    correlate_cmd->add_option("inputs", inputs, "landmark streams")->required();
    add_config_flags(*correlate_cmd, flags);
    correlate_cmd->add_option("--out-dir", out_dir, "directory for the correlation report");
    correlate_cmd->add_option("--comparison", comparison, "pooled | per-task-mean");
    correlate_cmd->add_flag("--parallel", parallel, "process streams concurrently");

    auto* validate_cmd = app.add_subcommand("validate", "check a landmark stream");
    validate_cmd->add_option("input", input, "landmark stream, '-' for standard input")->default_val("-");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*synth_cmd) return run_synth(synth);
        if (*validate_cmd) return run_validate(input);
        const AnalysisConfig config = resolve_config(flags);
        if (*analyze_cmd) return run_analyze(inputs, config, out_dir, parallel);
        if (*monitor_cmd) return run_monitor(input, baseline, config);
        if (*chart_cmd) return run_chart(input, config, out_dir, parallel);
        if (*correlate_cmd) {
            return run_correlate(inputs, config, out_dir, parse_comparison_method(comparison), parallel);
        }
    } catch (const Error& e) {
        report(app.get_subcommands().front()->get_name(), e);
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "motionspc: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return kExitUsage;
}
