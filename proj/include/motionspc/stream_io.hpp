#pragma once

#include "motionspc/landmark.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace motionspc {

/// Schema identifier written into every stream header.
inline constexpr std::string_view kStreamVersion = "motionspc/1";
inline constexpr int kStreamMajorVersion = 1;

/// Accepts "motionspc/<major>[.<minor>]". Throws Error(SchemaVersionError)
/// for a foreign prefix or an unsupported major.
void check_version(std::string_view version, std::optional<std::size_t> line = std::nullopt);

struct StreamHeader {
    std::string version{kStreamVersion};
    double fps = LandmarkStream::kDefaultFps;
    StreamMetadata metadata;
};

struct ReadOptions {
    /// Reject frames whose index does not exceed the previous one. `validate`
    /// turns this off so it can report the problem instead.
    bool require_ordered = true;
};

/// Line-delimited reader: a header object on the first line, then one frame
/// object per line. Blank lines are skipped; unknown keys are ignored.
/// All failures throw Error(ParseError) carrying the 1-based line number.
class StreamReader {
public:
    explicit StreamReader(std::istream& in, ReadOptions options = {});

    const StreamHeader& header() const noexcept { return header_; }

    /// Next frame, or nullopt at end of input.
    std::optional<LandmarkFrame> next();

    std::size_t line() const noexcept { return line_; }

private:
    std::istream& in_;
    ReadOptions options_;
    StreamHeader header_;
    std::size_t line_ = 0;
    std::optional<std::int64_t> last_index_;
};

/// Parses a single frame line. Exposed for record-level error recovery.
LandmarkFrame parse_frame_line(std::string_view text, double fps, std::size_t line);

LandmarkStream read_stream(std::istream& in, ReadOptions options = {});
LandmarkStream read_stream_file(const std::filesystem::path& path, ReadOptions options = {});

std::string header_line(const LandmarkStream& stream);
std::string frame_line(const LandmarkFrame& frame, double fps);

/// Canonical serialization; byte-stable for equal streams.
/// Throws Error(SerializationError) for an empty frame list.
std::string write_stream(const LandmarkStream& stream);
void write_stream_file(const LandmarkStream& stream, const std::filesystem::path& path);

/// Reads a whole file into a string. Throws Error(IoError) naming the path.
/// Canonical JSON form of a validation report, newline-terminated.
std::string write_validation_report(const ValidationReport& report);

std::string read_text_file(const std::filesystem::path& path);
/// Throws Error(IoError) naming the path.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace motionspc
