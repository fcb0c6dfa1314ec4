#pragma once

#include "intent/function_table.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace intent {

inline constexpr std::string_view kDefaultRole = "You are a Python 3 code generator";

class EmptyIntention : public std::invalid_argument {
public:
    EmptyIntention() : std::invalid_argument("intention must contain a non-whitespace character") {}
};

/// A natural-language user request. Construction rejects blank text.
class Intention {
public:
    explicit Intention(std::string text);

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

struct PromptBundle {
    std::string role{kDefaultRole};
    std::string body;

    friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

/// Renders the API docs of `table` and the intention into the prompt body.
/// The intention is substituted literally between double quotes.
PromptBundle render_prompt(const Intention& intention, const FunctionTable& table);

} // namespace intent
