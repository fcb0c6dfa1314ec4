#include "intent/prompting.hpp"

#include <algorithm>
#include <cctype>

namespace intent {

Intention::Intention(std::string text) : text_(std::move(text)) {
    bool blank = std::ranges::all_of(text_, [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) != 0;
    });
    if (blank)
        throw EmptyIntention();
}

PromptBundle render_prompt(const Intention& intention, const FunctionTable& table) {
    PromptBundle bundle;
    bundle.body = "You have the following application programming interface:\n\n";
    bundle.body += render_docs(table);
    bundle.body += "\n\nWrite Python 3 code only, which uses the application programming "
                   "interface for the instruction\n\"";
    bundle.body += intention.text();
    bundle.body += '"';
    return bundle;
}

} // namespace intent
