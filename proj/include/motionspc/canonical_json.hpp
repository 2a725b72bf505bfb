#pragma once

#include <json.hpp>

#include <string>

namespace motionspc {

/// Shortest decimal that round-trips the 64-bit value; locale independent.
/// Throws Error(SerializationError) for NaN and infinities.
std::string format_double(double value);

/// Serializes with keys in insertion order and doubles in shortest
/// round-trip form, so equal documents always produce equal bytes.
/// `indent` < 0 writes a single line.
std::string canonical_dump(const nlohmann::ordered_json& doc, int indent = -1);

}  // namespace motionspc
