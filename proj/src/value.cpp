#include "intent/value.hpp"

namespace intent {

std::string_view kind_name(ValueKind kind) {
    switch (kind) {
    case ValueKind::Null: return "None";
    case ValueKind::Bool: return "bool";
    case ValueKind::Int: return "int";
    case ValueKind::Str: return "str";
    case ValueKind::List: return "list";
    }
    return "?";
}

namespace {

void render_into(std::string& out, const Value& v, bool nested) {
    switch (v.kind()) {
    case ValueKind::Null: out += "None"; break;
    case ValueKind::Bool: out += v.as_bool() ? "True" : "False"; break;
    case ValueKind::Int: out += std::to_string(v.as_int()); break;
    case ValueKind::Str:
        if (nested) {
            out += '"';
            out += v.as_str();
            out += '"';
        } else {
            out += v.as_str();
        }
        break;
    case ValueKind::List: {
        out += '[';
        bool first = true;
        for (const auto& item : v.as_list()) {
            if (!first)
                out += ", ";
            first = false;
            render_into(out, item, true);
        }
        out += ']';
        break;
    }
    }
}

} // namespace

std::string render_value(const Value& v) {
    std::string out;
    render_into(out, v, false);
    return out;
}

bool truthiness(const Value& v) {
    switch (v.kind()) {
    case ValueKind::Null: return false;
    case ValueKind::Bool: return v.as_bool();
    case ValueKind::Int: return v.as_int() != 0;
    case ValueKind::Str: return !v.as_str().empty();
    case ValueKind::List: return !v.as_list().empty();
    }
    return false;
}

} // namespace intent
