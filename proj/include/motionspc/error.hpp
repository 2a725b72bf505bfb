#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace motionspc {

enum class ErrorCode {
    InvalidArgument,
    InvalidTaskCode,
    MissingLandmark,
    EmptyStream,
    StreamTooShort,
    EmptySeries,
    InsufficientData,
    DegenerateCovariance,
    DimensionMismatch,
    InvalidShape,
    LengthMismatch,
    ZeroVariance,
    MissingClass,
    ParseError,
    SchemaVersionError,
    SerializationError,
    InvalidSpec,
    FrameOutOfRange,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `code()` is the machine-readable
/// category; `line()` is set for errors tied to a record in a text document.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

}  // namespace motionspc
