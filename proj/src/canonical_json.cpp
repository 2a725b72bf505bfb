#include "motionspc/canonical_json.hpp"

#include "motionspc/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace motionspc {

std::string format_double(double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::SerializationError, "non-finite number");
    if (value == 0.0) return "0";  // folds -0 into 0
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc()) throw Error(ErrorCode::SerializationError, "number formatting failed");
    return std::string(buffer, end);
}

namespace {

void emit(const nlohmann::ordered_json& node, int indent, int depth, std::string& out) {
    using value_t = nlohmann::ordered_json::value_t;
    auto newline = [&](int level) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * level), ' ');
    };
    switch (node.type()) {
        case value_t::object: {
            if (node.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (const auto& [key, value] : node.items()) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                out += nlohmann::json(key).dump();
                out += indent < 0 ? ":" : ": ";
                emit(value, indent, depth + 1, out);
            }
            newline(depth);
            out += '}';
            return;
        }
        case value_t::array: {
            if (node.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(node.begin(), node.end(),
                                           [](const auto& v) { return v.is_structured(); });
            out += '[';
            bool first = true;
            for (const auto& value : node) {
                if (!first) out += ',';
                first = false;
                if (!flat) newline(depth + 1);
                emit(value, indent, depth + 1, out);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case value_t::number_float:
            out += format_double(node.get<double>());
            return;
        case value_t::string:
            try {
                out += node.dump();
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::SerializationError, e.what());
            }
            return;
        default:
            out += node.dump();
            return;
    }
}

}  // namespace

std::string canonical_dump(const nlohmann::ordered_json& doc, int indent) {
    std::string out;
    emit(doc, indent, 0, out);
    return out;
}

}  // namespace motionspc
