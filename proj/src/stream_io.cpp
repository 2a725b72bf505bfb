#include "motionspc/stream_io.hpp"

#include "motionspc/canonical_json.hpp"
#include "motionspc/error.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace motionspc {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kTimestampTolerance = 1e-6;

Error parse_error(std::size_t line, const std::string& message) {
    return Error(ErrorCode::ParseError, message, line);
}

json parse_object(std::string_view text, std::size_t line, const char* what) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) throw parse_error(line, std::string(what) + " is not valid JSON");
    if (!doc.is_object()) throw parse_error(line, std::string(what) + " must be an object");
    return doc;
}

double number_field(const json& obj, const char* key, std::size_t line, const char* what) {
    auto it = obj.find(key);
    if (it == obj.end()) throw parse_error(line, std::string(what) + ": missing field '" + key + "'");
    if (!it->is_number()) throw parse_error(line, std::string(what) + ": field '" + key + "' must be a number");
    return it->get<double>();
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw parse_error(line, std::string("header: field '") + key + "' must be a string");
    return it->get<std::string>();
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

StreamHeader parse_header(std::string_view text, std::size_t line) {
    json doc = parse_object(text, line, "header");
    StreamHeader header;
    auto version = doc.find("version");
    if (version == doc.end() || !version->is_string()) {
        throw parse_error(line, "header: missing field 'version'");
    }
    header.version = version->get<std::string>();
    check_version(header.version, line);

    header.fps = number_field(doc, "fps", line, "header");
    if (!std::isfinite(header.fps) || header.fps <= 0.0) throw parse_error(line, "header: fps must be positive");

    const std::string task = string_field(doc, "task_code", line);
    if (!task.empty()) {
        try {
            header.metadata.task = parse_task_code(task);
        } catch (const Error& e) {
            throw parse_error(line, std::string("header: ") + e.what());
        }
    }
    header.metadata.participant = string_field(doc, "participant", line);
    header.metadata.source = string_field(doc, "source", line);
    if (doc.contains("unit_label")) header.metadata.unit_label = string_field(doc, "unit_label", line);
    return header;
}

}  // namespace

void check_version(std::string_view version, std::optional<std::size_t> line) {
    constexpr std::string_view prefix = "motionspc/";
    auto fail = [&](const std::string& why) {
        return Error(ErrorCode::SchemaVersionError, "version '" + std::string(version) + "': " + why, line);
    };
    if (version.substr(0, prefix.size()) != prefix) throw fail("not a motionspc document");
    std::string_view rest = version.substr(prefix.size());
    int major = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), major);
    if (ec != std::errc() || ptr == rest.data()) throw fail("malformed version number");
    std::string_view tail(ptr, static_cast<std::size_t>(rest.data() + rest.size() - ptr));
    if (!tail.empty()) {
        int minor = 0;
        if (tail[0] != '.') throw fail("malformed version number");
        auto [p2, ec2] = std::from_chars(tail.data() + 1, tail.data() + tail.size(), minor);
        if (ec2 != std::errc() || p2 != tail.data() + tail.size()) throw fail("malformed version number");
    }
    if (major != kStreamMajorVersion) {
        throw fail("unsupported major version " + std::to_string(major));
    }
}

LandmarkFrame parse_frame_line(std::string_view text, double fps, std::size_t line) {
    json doc = parse_object(text, line, "frame");
    auto idx = doc.find("frame_index");
    if (idx == doc.end()) throw parse_error(line, "frame: missing field 'frame_index'");
    if (!idx->is_number_integer()) throw parse_error(line, "frame: 'frame_index' must be an integer");
    const auto frame_index = idx->get<std::int64_t>();
    if (frame_index < 0) throw parse_error(line, "frame: negative frame_index");

    if (auto ts = doc.find("timestamp_s"); ts != doc.end() && !ts->is_null()) {
        if (!ts->is_number()) throw parse_error(line, "frame: 'timestamp_s' must be a number");
        const double expected = static_cast<double>(frame_index) / fps;
        if (std::abs(ts->get<double>() - expected) > kTimestampTolerance) {
            throw parse_error(line, "frame " + std::to_string(frame_index) + ": timestamp_s disagrees with frame_index / fps");
        }
    }

    auto lms = doc.find("landmarks");
    if (lms == doc.end()) throw parse_error(line, "frame: missing field 'landmarks'");
    if (!lms->is_array()) throw parse_error(line, "frame: 'landmarks' must be an array");

    std::vector<LandmarkPoint> points;
    points.reserve(lms->size());
    for (const auto& tuple : *lms) {
        if (!tuple.is_array() || tuple.size() < 4 || tuple.size() > 5) {
            throw parse_error(line, "frame: landmark entries must be [id, x, y, z, visibility]");
        }
        if (!tuple[0].is_number_integer()) throw parse_error(line, "frame: landmark id must be an integer");
        for (std::size_t k = 1; k < 4; ++k)
            if (!tuple[k].is_number()) throw parse_error(line, "frame: landmark coordinates must be numbers");
        const auto id = tuple[0].get<int>();
        if (id < 0 || id >= LandmarkId::kCount) {
            throw parse_error(line, "frame: landmark id " + std::to_string(id) + " outside [0, 32]");
        }
        std::optional<double> visibility;
        if (tuple.size() == 5 && !tuple[4].is_null()) {
            if (!tuple[4].is_number()) throw parse_error(line, "frame: visibility must be a number or null");
            visibility = tuple[4].get<double>();
        }
        points.push_back({LandmarkId(id),
                          Vec3(tuple[1].get<double>(), tuple[2].get<double>(), tuple[3].get<double>()), visibility});
    }

    std::vector<LandmarkId> filled;
    if (auto f = doc.find("filled"); f != doc.end()) {
        if (!f->is_array()) throw parse_error(line, "frame: 'filled' must be an array of landmark ids");
        for (const auto& v : *f) {
            if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() >= LandmarkId::kCount) {
                throw parse_error(line, "frame: 'filled' must be an array of landmark ids");
            }
            filled.emplace_back(v.get<int>());
        }
    }
    try {
        return LandmarkFrame(frame_index, std::move(points), std::move(filled));
    } catch (const Error& e) {
        throw parse_error(line, e.what());
    }
}

StreamReader::StreamReader(std::istream& in, ReadOptions options) : in_(in), options_(options) {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (blank(text)) continue;
        header_ = parse_header(text, line_);
        return;
    }
    throw parse_error(line_ == 0 ? 1 : line_, "document has no header");
}

std::optional<LandmarkFrame> StreamReader::next() {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (blank(text)) continue;
        LandmarkFrame frame = parse_frame_line(text, header_.fps, line_);
        if (options_.require_ordered && last_index_ && frame.frame_index() <= *last_index_) {
            throw parse_error(line_, "frame_index " + std::to_string(frame.frame_index()) +
                                         " does not exceed previous " + std::to_string(*last_index_));
        }
        last_index_ = frame.frame_index();
        return frame;
    }
    return std::nullopt;
}

LandmarkStream read_stream(std::istream& in, ReadOptions options) {
    StreamReader reader(in, options);
    std::vector<LandmarkFrame> frames;
    while (auto frame = reader.next()) frames.push_back(std::move(*frame));
    return LandmarkStream(reader.header().fps, std::move(frames), reader.header().metadata);
}

LandmarkStream read_stream_file(const std::filesystem::path& path, ReadOptions options) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    return read_stream(in, options);
}

std::string header_line(const LandmarkStream& stream) {
    ordered_json doc;
    doc["version"] = std::string(kStreamVersion);
    doc["fps"] = stream.fps();
    if (stream.metadata().task) doc["task_code"] = stream.metadata().task->to_string();
    doc["unit_label"] = stream.metadata().unit_label;
    doc["source"] = stream.metadata().source;
    doc["participant"] = stream.metadata().participant;
    return canonical_dump(doc);
}

std::string frame_line(const LandmarkFrame& frame, double fps) {
    ordered_json doc;
    doc["frame_index"] = frame.frame_index();
    doc["timestamp_s"] = static_cast<double>(frame.frame_index()) / fps;
    ordered_json landmarks = ordered_json::array();
    for (const auto& p : frame.points()) {
        ordered_json tuple = {p.id.index(), p.position.x(), p.position.y(), p.position.z()};
        if (p.visibility) tuple.push_back(*p.visibility);
        landmarks.push_back(std::move(tuple));
    }
    doc["landmarks"] = std::move(landmarks);
    if (!frame.filled().empty()) {
        ordered_json filled = ordered_json::array();
        for (LandmarkId id : frame.filled()) filled.push_back(id.index());
        doc["filled"] = std::move(filled);
    }
    return canonical_dump(doc);
}

std::string write_stream(const LandmarkStream& stream) {
    if (stream.empty()) throw Error(ErrorCode::SerializationError, "refusing to serialize a stream without frames");
    std::string out = header_line(stream);
    out += '\n';
    for (const auto& frame : stream.frames()) {
        out += frame_line(frame, stream.fps());
        out += '\n';
    }
    return out;
}

void write_stream_file(const LandmarkStream& stream, const std::filesystem::path& path) {
    write_text_file(path, write_stream(stream));
}

std::string write_validation_report(const ValidationReport& report) {
    ordered_json doc;
    doc["ok"] = report.ok();
    doc["frame_count"] = report.frame_count;
    doc["fps"] = report.fps;
    ordered_json issues = ordered_json::array();
    for (const auto& issue : report.issues) {
        ordered_json item;
        item["kind"] = std::string(to_string(issue.kind));
        if (issue.frame_index) item["frame_index"] = *issue.frame_index;
        item["message"] = issue.message;
        issues.push_back(std::move(item));
    }
    doc["issues"] = std::move(issues);
    ordered_json missing = ordered_json::object();
    for (const auto& [id, rate] : report.missing_rate) missing[std::to_string(id.index())] = rate;
    doc["missing_rate"] = std::move(missing);
    ordered_json range = ordered_json::object();
    for (int a = 0; a < 3; ++a) {
        range[std::string(1, axis_char(static_cast<Axis>(a)))] = {report.coordinate_range[a].min,
                                                                  report.coordinate_range[a].max};
    }
    doc["coordinate_range"] = std::move(range);
    return canonical_dump(doc) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace motionspc
