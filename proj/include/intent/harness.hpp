#pragma once

#include "intent/executor.hpp"
#include "intent/llm_backend.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace intent {

enum class FailureClass {
    UnauthorizedAccess,
    ScopingViolation,
    Syntax,
    Lex,
    Unsupported,
    TypeError,
    StepLimit,
    PrivilegedDenied,
    BackendError,
    NoCode,
};

std::string_view to_string(FailureClass cls);
std::optional<FailureClass> parse_failure_class(std::string_view text);
FailureClass classify(FailureKind kind);

/// Result of parsing and running one script.
struct CodeOutcome {
    std::optional<FailureClass> failure_class;
    std::string failure_message;
    int failure_line = 0;
    int failure_col = 0; // parse-time rejections only
    std::vector<std::string> trace;
    std::uint64_t steps = 0;
    Millis execution_time{0};

    bool ok() const { return !failure_class; }
};

/// tokenize, parse and execute `code`; every rejection is reported in the
/// outcome rather than thrown.
CodeOutcome run_code(std::string_view code, const FunctionTable& table, const Limits& limits,
                     ConsentPolicy consent, const ExecOptions& options = {});

struct TrialRecord {
    int intention_index = 1;
    int trial_index = 1;
    bool success = false;
    std::optional<FailureClass> failure_class;
    std::string failure_message;
    Millis response_time{0};
    Millis ttft{0};
    Millis execution_time{0}; // wall clock, excluded from serialized reports
    std::uint64_t steps = 0;
    std::string code;
    std::vector<std::string> trace;
};

struct TrialSettings {
    Limits limits;
    GenerationParams params;
    ExecOptions exec;
};

TrialRecord run_trial(const Intention& intention, Backend& backend, const FunctionTable& table,
                      ConsentPolicy consent, const GenerationSlot& slot,
                      const TrialSettings& settings = {});

struct ReportRow {
    int intention_index = 0;
    std::string intention;
    int trials = 0;
    int successes = 0;
    double avg_response_time_s = 0;
    double avg_ttft_ms = 0;
};

struct BenchReport {
    std::vector<ReportRow> rows;
    std::vector<TrialRecord> trials;

    bool empty() const { return rows.empty(); }
};

/// Runs every intention `trials_per_intention` times, intention-major and
/// sequentially. Averages cover failed trials too. Throws
/// std::invalid_argument for an empty corpus or a non-positive trial count,
/// and BackendError(FixtureMissing) before any trial when the backend cannot
/// serve the whole protocol.
BenchReport run_bench(const std::vector<Intention>& intentions, Backend& backend,
                      int trials_per_intention, const FunctionTable& table,
                      const ConsentPolicy& consent, const TrialSettings& settings = {});

/// Per-intention aggregates recomputed from trial records.
std::vector<ReportRow> aggregate(const std::vector<Intention>& intentions,
                                 const std::vector<TrialRecord>& trials);

enum class ReportFormat { Markdown, Csv, JsonLines };

std::string_view to_string(ReportFormat format);
ReportFormat parse_report_format(std::string_view text);
std::string_view file_extension(ReportFormat format);

class EmptyReport : public std::invalid_argument {
public:
    EmptyReport() : std::invalid_argument("report has no rows") {}
};

std::string render_report(const BenchReport& report, ReportFormat format);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FixtureSet {
    std::filesystem::path root;
    int intentions = 0;
    int trials = 0;
};

/// Captures live generations as replay fixtures. Refuses a non-empty
/// `out_dir` unless `force` is set.
FixtureSet record_fixtures(const std::vector<Intention>& intentions, Backend& backend,
                           int trials_per_intention, const FunctionTable& table,
                           const std::filesystem::path& out_dir, bool force,
                           const GenerationParams& params = {});

/// The four built-in intentions.
const std::vector<Intention>& builtin_intentions();

/// One intention per line; blank lines and lines starting with `#` skipped.
std::vector<Intention> load_corpus(const std::filesystem::path& file);
std::vector<Intention> parse_corpus(std::string_view text);

} // namespace intent
