#pragma once

#include "intent/ast.hpp"
#include "intent/function_table.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace intent {

struct Limits {
    std::uint64_t max_steps = 10000;
    std::size_t max_list_len = 10000;
    std::size_t max_string_len = 1'000'000;

    /// Throws std::invalid_argument when a limit is zero.
    void validate() const;
};

enum class FailureKind {
    UnauthorizedAccess, // import, or a call outside the table and builtins
    ScopingViolation,   // read of a name that was never assigned
    TypeError,
    DivisionByZero,
    StepLimitExceeded,
    LimitExceeded,      // list or string length cap
    PrivilegedDenied,
};

std::string_view to_string(FailureKind kind);

struct Failure {
    FailureKind kind;
    std::string message;
    int line = 0;

    friend bool operator==(const Failure&, const Failure&) = default;
};

struct ExecutionResult {
    std::optional<Failure> failure;
    std::vector<TraceEvent> trace;
    std::uint64_t steps_used = 0;

    bool ok() const { return !failure.has_value(); }
    std::vector<std::string> trace_lines() const;
};

inline const std::set<std::string, std::less<>>& default_builtins() {
    static const std::set<std::string, std::less<>> names{"len", "str", "int", "range"};
    return names;
}

struct ExecOptions {
    // Pure helpers callable by bare name; any subset of {len, str, int, range}.
    std::set<std::string, std::less<>> builtins = default_builtins();
    // Also receives every trace event as it happens.
    TraceSink observer;
};

/// Runs `program` in a fresh flat scope. Function-table handlers are the
/// only effect sites. Each statement and each expression evaluation costs
/// one step.
ExecutionResult execute(const Program& program, const FunctionTable& table, const Limits& limits,
                        ConsentPolicy consent, const ExecOptions& options = {});

/// `len`, `str`, `int` and `range` on already evaluated arguments.
/// Throws ExecutionFault.
Value builtin_call(std::string_view name, std::span<const Value> args, const Limits& limits = {});

/// Runtime rejection raised inside the evaluator and by builtin_call.
class ExecutionFault : public std::runtime_error {
public:
    ExecutionFault(FailureKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    FailureKind kind() const { return kind_; }

private:
    FailureKind kind_;
};

} // namespace intent
