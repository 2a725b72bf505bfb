#include "motionspc/error.hpp"

namespace motionspc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidTaskCode: return "InvalidTaskCode";
        case ErrorCode::MissingLandmark: return "MissingLandmark";
        case ErrorCode::EmptyStream: return "EmptyStream";
        case ErrorCode::StreamTooShort: return "StreamTooShort";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidShape: return "InvalidShape";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::MissingClass: return "MissingClass";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaVersionError: return "SchemaVersionError";
        case ErrorCode::SerializationError: return "SerializationError";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

static std::string decorate(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) out += " (line " + std::to_string(*line) + ")";
    out += ": ";
    out += message;
    return out;
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line) {}

}  // namespace motionspc
