#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace intent {

enum class ValueKind { Null, Bool, Int, Str, List };

std::string_view kind_name(ValueKind kind);

/// Runtime value of the script interpreter.
///
/// Values have value semantics: assigning a list to a second name copies it.
/// The only in-place mutation is `append` on a list held by a variable.
class Value {
public:
    using List = std::vector<Value>;

    Value() = default;
    Value(std::nullptr_t) {}
    Value(bool b) : data_(b) {}
    Value(std::int64_t i) : data_(i) {}
    Value(int i) : data_(static_cast<std::int64_t>(i)) {}
    Value(std::string s) : data_(std::move(s)) {}
    Value(const char* s) : data_(std::string(s)) {}
    Value(List items) : data_(std::move(items)) {}

    ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }

    bool is_null() const { return kind() == ValueKind::Null; }
    bool is_bool() const { return kind() == ValueKind::Bool; }
    bool is_int() const { return kind() == ValueKind::Int; }
    bool is_str() const { return kind() == ValueKind::Str; }
    bool is_list() const { return kind() == ValueKind::List; }

    bool as_bool() const { return std::get<bool>(data_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    const std::string& as_str() const { return std::get<std::string>(data_); }
    const List& as_list() const { return std::get<List>(data_); }
    List& as_list() { return std::get<List>(data_); }

    friend bool operator==(const Value&, const Value&) = default;

private:
    std::variant<std::monostate, bool, std::int64_t, std::string, List> data_;
};

/// Text form used in traces and by `str()`.
///
/// Strings render verbatim at top level and double-quoted inside lists;
/// `None`, `True` and `False` follow the script's literal spelling.
std::string render_value(const Value& v);

bool truthiness(const Value& v);

} // namespace intent
