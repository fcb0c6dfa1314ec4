#include "intent/function_table.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace intent {

namespace {

std::string_view base_name(BaseType b) {
    switch (b) {
    case BaseType::String: return "String";
    case BaseType::Integer: return "Integer";
    case BaseType::File: return "File";
    case BaseType::Void: return "void";
    }
    return "?";
}

[[noreturn]] void invalid(const std::string& what) {
    throw TableError(TableErrorKind::InvalidSignature, "invalid signature: " + what);
}

bool parse_base(std::string_view text, BaseType& out) {
    if (text == "String")
        out = BaseType::String;
    else if (text == "Integer")
        out = BaseType::Integer;
    else if (text == "File")
        out = BaseType::File;
    else
        return false;
    return true;
}

TypeExpr parse_type(std::string_view text, bool allow_void) {
    if (text == "void") {
        if (!allow_void)
            invalid("void is only allowed as a return type");
        return TypeExpr::plain(BaseType::Void);
    }
    BaseType base{};
    constexpr std::string_view null_suffix = "|null";
    constexpr std::string_view coll_prefix = "Collection<";
    if (text.starts_with(coll_prefix) && text.ends_with(">")) {
        auto inner = text.substr(coll_prefix.size(), text.size() - coll_prefix.size() - 1);
        if (!parse_base(inner, base))
            invalid("bad collection element type '" + std::string(inner) + "'");
        return TypeExpr::collection(base);
    }
    if (text.ends_with(null_suffix)) {
        auto inner = text.substr(0, text.size() - null_suffix.size());
        if (!parse_base(inner, base))
            invalid("bad nullable type '" + std::string(inner) + "'");
        return TypeExpr::nullable(base);
    }
    if (!parse_base(text, base))
        invalid("unknown type '" + std::string(text) + "'");
    return TypeExpr::plain(base);
}

} // namespace

std::string TypeExpr::to_string() const {
    std::string b(base_name(base));
    switch (form) {
    case Form::Base: return b;
    case Form::Nullable: return b + "|null";
    case Form::Collection: return "Collection<" + b + ">";
    }
    return b;
}

bool value_matches(const TypeExpr& type, const Value& v) {
    auto base_ok = [](BaseType b, const Value& x) {
        switch (b) {
        case BaseType::String: return x.is_str();
        case BaseType::Integer:
        case BaseType::File: return x.is_int();
        case BaseType::Void: return x.is_null();
        }
        return false;
    };
    switch (type.form) {
    case TypeExpr::Form::Base: return base_ok(type.base, v);
    case TypeExpr::Form::Nullable: return v.is_null() || base_ok(type.base, v);
    case TypeExpr::Form::Collection:
        if (!v.is_list())
            return false;
        return std::ranges::all_of(v.as_list(),
                                   [&](const Value& item) { return base_ok(type.base, item); });
    }
    return false;
}

std::string FunctionSignature::to_string() const {
    std::string out = "function " + name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i)
            out += ", ";
        out += params[i].name + ": " + params[i].type.to_string();
    }
    out += "): " + return_type.to_string();
    return out;
}

bool is_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front())))
        return false;
    return std::ranges::all_of(s, [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

void validate_signature(const FunctionSignature& sig) {
    if (!is_identifier(sig.name))
        invalid("bad function name '" + sig.name + "'");
    std::set<std::string> seen;
    for (const auto& p : sig.params) {
        if (!is_identifier(p.name))
            invalid("bad parameter name '" + p.name + "' in " + sig.name);
        if (!seen.insert(p.name).second)
            invalid("duplicate parameter '" + p.name + "' in " + sig.name);
        if (p.type.base == BaseType::Void)
            invalid("parameter '" + p.name + "' of " + sig.name + " has type void");
    }
    if (sig.return_type.base == BaseType::Void && !sig.return_type.is_void())
        invalid("void cannot be wrapped in " + sig.name);
}

FunctionSignature parse_signature(std::string_view line) {
    constexpr std::string_view head = "function ";
    if (!line.starts_with(head))
        invalid("expected 'function '");
    line.remove_prefix(head.size());

    auto open = line.find('(');
    auto close = line.rfind("):");
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        invalid("expected 'name(params): type'");

    FunctionSignature sig;
    sig.name = std::string(line.substr(0, open));
    // Hand-written docs sometimes drop the space before the return type.
    auto ret = line.substr(close + 2);
    if (ret.starts_with(' '))
        ret.remove_prefix(1);
    sig.return_type = parse_type(ret, true);

    auto params = line.substr(open + 1, close - open - 1);
    while (!params.empty()) {
        auto comma = params.find(", ");
        auto one = params.substr(0, comma);
        auto colon = one.find(": ");
        if (colon == std::string_view::npos)
            invalid("expected 'name: type' in '" + std::string(one) + "'");
        sig.params.push_back(
            {std::string(one.substr(0, colon)), parse_type(one.substr(colon + 2), false)});
        if (comma == std::string_view::npos)
            break;
        params.remove_prefix(comma + 2);
        if (params.empty())
            invalid("trailing comma");
    }
    validate_signature(sig);
    return sig;
}

TraceEvent make_trace_event(std::string function, std::vector<Value> args) {
    std::string line = "Execute \"" + function + "\" and arguments ";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            line += ", ";
        line += '"';
        line += render_value(args[i]);
        line += '"';
    }
    return {std::move(function), std::move(args), std::move(line)};
}

std::string_view to_string(ConsentMode mode) {
    switch (mode) {
    case ConsentMode::AutoAllow: return "auto-allow";
    case ConsentMode::AutoDeny: return "auto-deny";
    case ConsentMode::Interactive: return "interactive";
    }
    return "?";
}

ConsentMode parse_consent_mode(std::string_view text) {
    if (text == "auto-allow")
        return ConsentMode::AutoAllow;
    if (text == "auto-deny")
        return ConsentMode::AutoDeny;
    if (text == "interactive")
        return ConsentMode::Interactive;
    throw std::invalid_argument("unknown consent mode '" + std::string(text) + "'");
}

bool ConsentPolicy::permits(const FunctionSignature& sig, std::span<const Value> args) {
    switch (mode_) {
    case ConsentMode::AutoAllow: return true;
    case ConsentMode::AutoDeny: return false;
    case ConsentMode::Interactive: break;
    }
    if (auto it = decided_.find(sig.name); it != decided_.end())
        return it->second;
    bool answer = asker_ ? asker_(sig, args) : false;
    decided_.emplace(sig.name, answer);
    return answer;
}

std::string_view to_string(TableErrorKind kind) {
    switch (kind) {
    case TableErrorKind::DuplicateName: return "DuplicateName";
    case TableErrorKind::InvalidSignature: return "InvalidSignature";
    case TableErrorKind::EmptyTable: return "EmptyTable";
    case TableErrorKind::UnknownFunction: return "UnknownFunction";
    case TableErrorKind::ArityMismatch: return "ArityMismatch";
    case TableErrorKind::TypeMismatch: return "TypeMismatch";
    case TableErrorKind::PrivilegedDenied: return "PrivilegedDenied";
    }
    return "?";
}

FunctionTable& FunctionTable::add(FunctionEntry entry) {
    validate_signature(entry.signature);
    if (!entry.doc.empty() && parse_signature(entry.doc) != entry.signature)
        invalid("doc line of " + entry.signature.name + " does not match its signature");
    const auto& name = entry.signature.name;
    if (index_.contains(name))
        throw TableError(TableErrorKind::DuplicateName, "function '" + name + "' already registered");
    index_.emplace(name, entries_.size());
    entries_.push_back(std::move(entry));
    return *this;
}

const FunctionEntry* FunctionTable::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &entries_[it->second];
}

Value FunctionTable::invoke(std::string_view name, std::span<const Value> args,
                            ConsentPolicy& consent, const TraceSink& tracer) const {
    const FunctionEntry* entry = find(name);
    if (!entry)
        throw TableError(TableErrorKind::UnknownFunction,
                         "'" + std::string(name) + "' is not in the function table");
    const auto& sig = entry->signature;
    if (args.size() != sig.params.size())
        throw TableError(TableErrorKind::ArityMismatch,
                         sig.name + "() takes " + std::to_string(sig.params.size()) +
                             " arguments but " + std::to_string(args.size()) + " were given");
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (!value_matches(sig.params[i].type, args[i]))
            throw TableError(TableErrorKind::TypeMismatch,
                             sig.name + "() parameter '" + sig.params[i].name + "' expects " +
                                 sig.params[i].type.to_string() + ", got " +
                                 std::string(kind_name(args[i].kind())));
    }
    if (entry->privileged && !consent.permits(sig, args))
        throw TableError(TableErrorKind::PrivilegedDenied,
                         "call to privileged function '" + sig.name + "' was not permitted");

    Value result = entry->handler ? entry->handler(args) : Value{};
    if (!value_matches(sig.return_type, result))
        throw TableError(TableErrorKind::TypeMismatch,
                         sig.name + "() returned " + std::string(kind_name(result.kind())) +
                             ", declared " + sig.return_type.to_string());
    if (tracer)
        tracer(make_trace_event(sig.name, {args.begin(), args.end()}));
    return result;
}

std::string render_docs(const FunctionTable& table) {
    if (table.empty())
        throw TableError(TableErrorKind::EmptyTable, "function table is empty");
    std::string out;
    for (const auto& e : table.entries()) {
        if (!out.empty())
            out += '\n';
        out += e.doc.empty() ? e.signature.to_string() : e.doc;
    }
    return out;
}

Value stub_reply(const TypeExpr& type) {
    switch (type.form) {
    case TypeExpr::Form::Nullable: return {};
    case TypeExpr::Form::Collection: return Value::List{};
    case TypeExpr::Form::Base: break;
    }
    switch (type.base) {
    case BaseType::String: return std::string();
    case BaseType::Integer:
    case BaseType::File: return 1;
    case BaseType::Void: return {};
    }
    return {};
}

namespace {

FunctionEntry canned(std::string_view line, Value reply, bool privileged = false) {
    return {parse_signature(line), [reply = std::move(reply)](std::span<const Value>) { return reply; },
            privileged, std::string(line)};
}

} // namespace

FunctionTable default_stub_table(const StubReplies& replies) {
    FunctionTable t;
    t.add(canned("function find_file_id(expression: String): Integer|null", 1));
    t.add(canned("function find_contact_id(expression: String): Integer|null", 1));
    t.add(canned("function find_contact_email(contact_id: Integer):String|null",
                 "john.doe@example.com"));
    t.add(canned("function play_voice(text: String): void", {}));
    t.add(canned("function ask_question(question: String): String", replies.ask_question));
    t.add(canned("function play_audio_file(file: File): void", {}));
    t.add(canned("function send_email(email: String, subject: String, text: String, "
                 "attachments: Collection<Integer>): void",
                 {}));
    t.add(canned("function print_screen(text: String): void", {}));
    t.add(canned("function shell(command: String): String", replies.shell, true));
    return t;
}

FunctionTable parse_table_text(std::string_view text) {
    FunctionTable t;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.remove_suffix(1);
        while (!line.empty() && line.front() == ' ')
            line.remove_prefix(1);
        if (line.empty() || line.front() == '#')
            continue;
        bool privileged = false;
        constexpr std::string_view marker = "privileged ";
        if (line.starts_with(marker)) {
            privileged = true;
            line.remove_prefix(marker.size());
        }
        auto sig = parse_signature(line);
        Value reply = stub_reply(sig.return_type);
        t.add({std::move(sig), [reply](std::span<const Value>) { return reply; }, privileged,
               std::string(line)});
    }
    return t;
}

} // namespace intent
