#pragma once

#include "intent/value.hpp"

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace intent {

enum class BaseType { String, Integer, File, Void };

/// A parameter or return type as written in the API docs:
/// `T`, `T|null` or `Collection<T>`.
struct TypeExpr {
    enum class Form { Base, Nullable, Collection };

    Form form = Form::Base;
    BaseType base = BaseType::Void;

    static TypeExpr plain(BaseType b) { return {Form::Base, b}; }
    static TypeExpr nullable(BaseType b) { return {Form::Nullable, b}; }
    static TypeExpr collection(BaseType b) { return {Form::Collection, b}; }

    bool is_void() const { return form == Form::Base && base == BaseType::Void; }
    std::string to_string() const;

    friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

/// Shallow structural check of a runtime value against a declared type.
/// `File` accepts an integer handle.
bool value_matches(const TypeExpr& type, const Value& v);

struct Param {
    std::string name;
    TypeExpr type;

    friend bool operator==(const Param&, const Param&) = default;
};

struct FunctionSignature {
    std::string name;
    std::vector<Param> params;
    TypeExpr return_type;

    /// `function NAME(p1: T1, p2: T2): RET`
    std::string to_string() const;

    friend bool operator==(const FunctionSignature&, const FunctionSignature&) = default;
};

bool is_identifier(std::string_view s);

/// Parses one signature line of the docs grammar. Throws TableError(InvalidSignature).
FunctionSignature parse_signature(std::string_view line);

/// Throws TableError(InvalidSignature) when a type or name invariant is broken.
void validate_signature(const FunctionSignature& sig);

/// One function-table invocation, rendered like
/// `Execute "find_contact_id" and arguments "insurance company"`.
struct TraceEvent {
    std::string function;
    std::vector<Value> args;
    std::string rendered;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

TraceEvent make_trace_event(std::string function, std::vector<Value> args);

using TraceSink = std::function<void(const TraceEvent&)>;

enum class ConsentMode { AutoAllow, AutoDeny, Interactive };

std::string_view to_string(ConsentMode mode);
/// Accepts `auto-allow`, `auto-deny`, `interactive`. Throws std::invalid_argument.
ConsentMode parse_consent_mode(std::string_view text);

/// Gate in front of privileged functions. Interactive mode asks once per
/// function name and remembers the answer for the lifetime of the policy.
class ConsentPolicy {
public:
    using Asker = std::function<bool(const FunctionSignature&, std::span<const Value>)>;

    static ConsentPolicy auto_allow() { return ConsentPolicy(ConsentMode::AutoAllow, {}); }
    static ConsentPolicy auto_deny() { return ConsentPolicy(ConsentMode::AutoDeny, {}); }
    static ConsentPolicy interactive(Asker asker) {
        return ConsentPolicy(ConsentMode::Interactive, std::move(asker));
    }

    ConsentMode mode() const { return mode_; }

    bool permits(const FunctionSignature& sig, std::span<const Value> args);

private:
    ConsentPolicy(ConsentMode mode, Asker asker) : mode_(mode), asker_(std::move(asker)) {}

    ConsentMode mode_;
    Asker asker_;
    std::map<std::string, bool, std::less<>> decided_;
};

enum class TableErrorKind {
    DuplicateName,
    InvalidSignature,
    EmptyTable,
    UnknownFunction,
    ArityMismatch,
    TypeMismatch,
    PrivilegedDenied,
};

std::string_view to_string(TableErrorKind kind);

class TableError : public std::runtime_error {
public:
    TableError(TableErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    TableErrorKind kind() const { return kind_; }

private:
    TableErrorKind kind_;
};

using Handler = std::function<Value(std::span<const Value>)>;

struct FunctionEntry {
    FunctionSignature signature;
    Handler handler;
    bool privileged = false;
    // Line shown in the docs block; empty means the canonical rendering. It
    // must parse back to `signature`.
    std::string doc;
};

/// Ordered registry of the functions generated code may call.
class FunctionTable {
public:
    /// Appends an entry. Throws DuplicateName or InvalidSignature.
    FunctionTable& add(FunctionEntry entry);

    const FunctionEntry* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<FunctionEntry>& entries() const { return entries_; }

    /// Checks arity, argument types and consent, calls the handler and emits
    /// exactly one trace event on success. Failed calls emit nothing.
    Value invoke(std::string_view name, std::span<const Value> args, ConsentPolicy& consent,
                 const TraceSink& tracer) const;

private:
    std::vector<FunctionEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// One `function ...` line per entry in registration order, no trailing
/// newline. Entries with a doc line are shown as written.
std::string render_docs(const FunctionTable& table);

struct StubReplies {
    std::string ask_question;
    std::string shell;
};

/// The nine-function API used in the experiments, backed by canned stubs.
/// `shell` is privileged.
FunctionTable default_stub_table(const StubReplies& replies = {});

/// Canned reply for a declared return type: null for void and nullable types,
/// 1 for integers and file handles, "" for strings, [] for collections.
Value stub_reply(const TypeExpr& type);

/// Builds a stub-backed table from signature lines. Lines may be prefixed
/// with `privileged `; blank lines and `#` comments are skipped.
FunctionTable parse_table_text(std::string_view text);

} // namespace intent
