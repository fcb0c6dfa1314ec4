#include "intent/harness.hpp"

#include "intent/parser.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace intent {

using Clock = std::chrono::steady_clock;

namespace {

constexpr std::array kClassNames{
    std::pair{FailureClass::UnauthorizedAccess, std::string_view("UnauthorizedAccess")},
    std::pair{FailureClass::ScopingViolation, std::string_view("ScopingViolation")},
    std::pair{FailureClass::Syntax, std::string_view("Syntax")},
    std::pair{FailureClass::Lex, std::string_view("Lex")},
    std::pair{FailureClass::Unsupported, std::string_view("Unsupported")},
    std::pair{FailureClass::TypeError, std::string_view("TypeError")},
    std::pair{FailureClass::StepLimit, std::string_view("StepLimit")},
    std::pair{FailureClass::PrivilegedDenied, std::string_view("PrivilegedDenied")},
    std::pair{FailureClass::BackendError, std::string_view("BackendError")},
    std::pair{FailureClass::NoCode, std::string_view("NoCode")},
};

std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

} // namespace

std::string_view to_string(FailureClass cls) {
    for (auto [c, name] : kClassNames)
        if (c == cls)
            return name;
    return "?";
}

std::optional<FailureClass> parse_failure_class(std::string_view text) {
    for (auto [c, name] : kClassNames)
        if (name == text)
            return c;
    return std::nullopt;
}

FailureClass classify(FailureKind kind) {
    switch (kind) {
    case FailureKind::UnauthorizedAccess: return FailureClass::UnauthorizedAccess;
    case FailureKind::ScopingViolation: return FailureClass::ScopingViolation;
    case FailureKind::TypeError:
    case FailureKind::DivisionByZero: return FailureClass::TypeError;
    case FailureKind::StepLimitExceeded:
    case FailureKind::LimitExceeded: return FailureClass::StepLimit;
    case FailureKind::PrivilegedDenied: return FailureClass::PrivilegedDenied;
    }
    return FailureClass::TypeError;
}

CodeOutcome run_code(std::string_view code, const FunctionTable& table, const Limits& limits,
                     ConsentPolicy consent, const ExecOptions& options) {
    CodeOutcome out;
    Program program;
    auto reject = [&](FailureClass cls, const ScriptError& e, std::string message) {
        out.failure_class = cls;
        out.failure_message = std::move(message);
        out.failure_line = e.line();
        out.failure_col = e.col();
    };
    try {
        program = parse_source(code);
    } catch (const LexError& e) {
        reject(FailureClass::Lex, e, e.reason());
        return out;
    } catch (const UnsupportedConstruct& e) {
        reject(FailureClass::Unsupported, e, "unsupported construct '" + e.name() + "'");
        return out;
    } catch (const SyntaxError& e) {
        reject(FailureClass::Syntax, e, e.expectation());
        return out;
    }

    auto start = Clock::now();
    ExecutionResult result = execute(program, table, limits, std::move(consent), options);
    out.execution_time = Clock::now() - start;
    out.trace = result.trace_lines();
    out.steps = result.steps_used;
    if (result.failure) {
        out.failure_class = classify(result.failure->kind);
        out.failure_message = result.failure->message;
        out.failure_line = result.failure->line;
    }
    return out;
}

TrialRecord run_trial(const Intention& intention, Backend& backend, const FunctionTable& table,
                      ConsentPolicy consent, const GenerationSlot& slot,
                      const TrialSettings& settings) {
    TrialRecord rec;
    rec.intention_index = slot.intention;
    rec.trial_index = slot.trial;

    GenerationResult gen;
    try {
        gen = backend.generate(render_prompt(intention, table), settings.params, slot);
    } catch (const BackendError& e) {
        rec.failure_class = FailureClass::BackendError;
        rec.failure_message = std::string(to_string(e.kind())) + ": " + e.what();
        return rec;
    }
    rec.response_time = gen.total_time;
    rec.ttft = gen.ttft;

    try {
        rec.code = extract_code(gen.raw_text);
    } catch (const NoCodeError& e) {
        rec.failure_class = FailureClass::NoCode;
        rec.failure_message = e.what();
        return rec;
    }

    CodeOutcome outcome = run_code(rec.code, table, settings.limits, std::move(consent),
                                   settings.exec);
    rec.failure_class = outcome.failure_class;
    rec.failure_message = outcome.failure_message;
    rec.trace = std::move(outcome.trace);
    rec.steps = outcome.steps;
    rec.execution_time = outcome.execution_time;
    rec.success = !rec.failure_class;
    return rec;
}

std::vector<ReportRow> aggregate(const std::vector<Intention>& intentions,
                                 const std::vector<TrialRecord>& trials) {
    std::vector<ReportRow> rows(intentions.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].intention_index = static_cast<int>(i + 1);
        rows[i].intention = intentions[i].text();
    }
    std::vector<double> total_ms(rows.size(), 0.0);
    std::vector<double> ttft_ms(rows.size(), 0.0);
    for (const auto& t : trials) {
        if (t.intention_index < 1 || static_cast<std::size_t>(t.intention_index) > rows.size())
            throw std::out_of_range("trial refers to unknown intention");
        auto k = static_cast<std::size_t>(t.intention_index - 1);
        ++rows[k].trials;
        rows[k].successes += t.success ? 1 : 0;
        total_ms[k] += t.response_time.count();
        ttft_ms[k] += t.ttft.count();
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].trials == 0)
            continue;
        rows[k].avg_response_time_s = total_ms[k] / rows[k].trials / 1000.0;
        rows[k].avg_ttft_ms = ttft_ms[k] / rows[k].trials;
    }
    return rows;
}

BenchReport run_bench(const std::vector<Intention>& intentions, Backend& backend,
                      int trials_per_intention, const FunctionTable& table,
                      const ConsentPolicy& consent, const TrialSettings& settings) {
    if (intentions.empty())
        throw std::invalid_argument("corpus has no intentions");
    if (trials_per_intention < 1)
        throw std::invalid_argument("trials per intention must be at least 1");
    backend.check_available(static_cast<int>(intentions.size()), trials_per_intention);

    BenchReport report;
    for (std::size_t i = 0; i < intentions.size(); ++i) {
        for (int j = 1; j <= trials_per_intention; ++j) {
            GenerationSlot slot{static_cast<int>(i + 1), j};
            report.trials.push_back(
                run_trial(intentions[i], backend, table, consent, slot, settings));
        }
    }
    report.rows = aggregate(intentions, report.trials);
    return report;
}

std::string_view to_string(ReportFormat format) {
    switch (format) {
    case ReportFormat::Markdown: return "markdown";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::JsonLines: return "json-lines";
    }
    return "?";
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "markdown" || text == "md")
        return ReportFormat::Markdown;
    if (text == "csv")
        return ReportFormat::Csv;
    if (text == "json-lines" || text == "jsonl")
        return ReportFormat::JsonLines;
    throw std::invalid_argument("unknown report format: " + std::string(text));
}

std::string_view file_extension(ReportFormat format) {
    switch (format) {
    case ReportFormat::Markdown: return ".md";
    case ReportFormat::Csv: return ".csv";
    case ReportFormat::JsonLines: return ".jsonl";
    }
    return "";
}

std::string render_report(const BenchReport& report, ReportFormat format) {
    if (report.empty())
        throw EmptyReport();
    std::string out;
    switch (format) {
    case ReportFormat::Markdown:
        out = "| Intention | Successes | Average Response Time (s) | Average Time to First Token "
              "(ms) |\n|---|---|---|---|\n";
        for (const auto& r : report.rows)
            out += "| " + std::to_string(r.intention_index) + " | " +
                   std::to_string(r.successes) + " | " +
                   format_fixed(r.avg_response_time_s, 2) + " | " +
                   format_fixed(r.avg_ttft_ms, 1) + " |\n";
        break;
    case ReportFormat::Csv:
        out = "intention,successes,avg_response_time_s,avg_ttft_ms\n";
        for (const auto& r : report.rows)
            out += std::to_string(r.intention_index) + "," + std::to_string(r.successes) + "," +
                   format_fixed(r.avg_response_time_s, 3) + "," +
                   format_fixed(r.avg_ttft_ms, 1) + "\n";
        break;
    case ReportFormat::JsonLines:
        for (const auto& t : report.trials) {
            nlohmann::ordered_json j;
            j["intention"] = t.intention_index;
            j["trial"] = t.trial_index;
            j["success"] = t.success;
            j["failure_class"] = t.failure_class ? nlohmann::ordered_json(to_string(*t.failure_class))
                                                 : nlohmann::ordered_json(nullptr);
            j["failure_message"] = t.failure_message;
            j["response_time_ms"] = t.response_time.count();
            j["ttft_ms"] = t.ttft.count();
            j["steps"] = t.steps;
            j["code"] = t.code;
            j["trace"] = t.trace;
            out += j.dump() + "\n";
        }
        break;
    }
    return out;
}

FixtureSet record_fixtures(const std::vector<Intention>& intentions, Backend& backend,
                           int trials_per_intention, const FunctionTable& table,
                           const std::filesystem::path& out_dir, bool force,
                           const GenerationParams& params) {
    namespace fs = std::filesystem;
    if (trials_per_intention < 1)
        throw std::invalid_argument("trials per intention must be at least 1");
    std::error_code ec;
    if (fs::exists(out_dir, ec) && !fs::is_empty(out_dir, ec) && !force)
        throw IoError("refusing to overwrite non-empty directory " + out_dir.string());
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    for (std::size_t i = 0; i < intentions.size(); ++i) {
        PromptBundle bundle = render_prompt(intentions[i], table);
        for (int j = 1; j <= trials_per_intention; ++j) {
            GenerationSlot slot{static_cast<int>(i + 1), j};
            GenerationResult result = backend.generate(bundle, params, slot);
            try {
                write_fixture(out_dir, slot, result);
            } catch (const std::exception& e) {
                throw IoError(e.what());
            }
        }
    }
    return {out_dir, static_cast<int>(intentions.size()), trials_per_intention};
}

const std::vector<Intention>& builtin_intentions() {
    static const std::vector<Intention> corpus{
        Intention("Please send my car title to my insurance company"),
        Intention("Please tell me the current temperature"),
        Intention("Please play the song beat it by michael jackson"),
        Intention("Please tell me all files in my home directory"),
    };
    return corpus;
}

std::vector<Intention> parse_corpus(std::string_view text) {
    std::vector<Intention> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        out.emplace_back(line);
    }
    return out;
}

std::vector<Intention> load_corpus(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot read corpus " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    auto corpus = parse_corpus(text.str());
    if (corpus.empty())
        throw IoError("corpus " + file.string() + " has no intentions");
    return corpus;
}

} // namespace intent
