#include "intent/cli.hpp"

#include "intent/harness.hpp"
#include "intent/parser.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace intent {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

// Command-line flags that map one-to-one onto configuration keys.
struct SettingFlag {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr SettingFlag kSettingFlags[] = {
    {"--backend", "backend", "http, replay or mock"},
    {"--endpoint", "endpoint", "base URL of the chat-completions API"},
    {"--credential-env", "credential_env", "environment variable holding the API key"},
    {"--model", "model", "model name"},
    {"--temperature", "temperature", "sampling temperature"},
    {"--max-tokens", "max_tokens", "generation token cap"},
    {"--timeout-ms", "timeout_ms", "request timeout"},
    {"--fixtures", "fixtures", "replay fixture directory"},
    {"--consent", "consent", "auto-allow, auto-deny or interactive"},
    {"--trials", "trials", "trials per intention"},
    {"--max-steps", "max_steps", "executor step budget"},
    {"--max-list-len", "max_list_len", "executor list length cap"},
    {"--max-string-len", "max_string_len", "executor string length cap"},
    {"--table", "table", "function table file"},
    {"--corpus", "corpus", "intention corpus file, one per line"},
    {"--mock-ttft-ms", "mock_ttft_ms", "mock backend time to first token"},
    {"--mock-total-ms", "mock_total_ms", "mock backend total time"},
    {"--mock-output", "mock_output", "mock backend output text"},
};

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

bool read_yes(Streams& io) {
    std::string answer;
    if (!std::getline(io.in, answer))
        return false;
    return answer == "y" || answer == "Y" || answer == "yes";
}

ConsentPolicy make_consent(ConsentMode mode, Streams& io) {
    switch (mode) {
    case ConsentMode::AutoAllow: return ConsentPolicy::auto_allow();
    case ConsentMode::AutoDeny: return ConsentPolicy::auto_deny();
    case ConsentMode::Interactive: break;
    }
    return ConsentPolicy::interactive([&io](const FunctionSignature& sig, std::span<const Value> args) {
        TraceEvent pending = make_trace_event(sig.name, {args.begin(), args.end()});
        io.out << "privileged call: " << pending.rendered << "\nallow? [y/N] " << std::flush;
        return read_yes(io);
    });
}

std::vector<Intention> corpus_of(const Config& config) {
    if (config.corpus)
        return load_corpus(*config.corpus);
    return builtin_intentions();
}

// Replay fixtures are keyed by corpus position, so a free-form intention has
// to be found in the corpus first.
GenerationSlot slot_for(const Config& config, const Intention& intention, int trial) {
    if (config.backend != BackendKind::Replay)
        return {1, trial};
    auto corpus = corpus_of(config);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].text() == intention.text()) {
            GenerationSlot slot{static_cast<int>(i + 1), trial};
            auto file = fixture_path(config.fixtures, slot);
            if (!std::filesystem::is_regular_file(file))
                throw ConfigError("missing fixture " + file.string());
            return slot;
        }
    }
    throw ConfigError("replay backend has no fixtures for this intention; it must match a "
                      "corpus entry");
}

void print_status(std::ostream& out, const std::optional<FailureClass>& cls,
                  const std::string& message, int line, int col = 0) {
    if (!cls) {
        out << "status: success\n";
        return;
    }
    out << "status: failure (" << to_string(*cls) << ")";
    if (line > 0)
        out << " line " << line;
    if (line > 0 && col > 0)
        out << ":" << col;
    out << ": " << message << "\n";
}

// Generates and runs one intention; returns the exit status.
int generate_and_execute(const Config& config, Backend& backend, const FunctionTable& table,
                         const Intention& intention, int trial, ConsentPolicy consent,
                         Streams& io, bool ask_first) {
    GenerationSlot slot = slot_for(config, intention, trial);
    GenerationResult gen;
    try {
        gen = backend.generate(render_prompt(intention, table), config.params, slot);
    } catch (const BackendError& e) {
        if (e.kind() == BackendErrorKind::FixtureMissing)
            throw ConfigError(e.what());
        print_status(io.out, FailureClass::BackendError,
                     std::string(to_string(e.kind())) + ": " + e.what(), 0);
        return kFailure;
    }
    std::string code;
    try {
        code = extract_code(gen.raw_text);
    } catch (const NoCodeError& e) {
        io.out << gen.raw_text << "\n\n";
        print_status(io.out, FailureClass::NoCode, e.what(), 0);
        return kFailure;
    }
    io.out << code << "\n\n";
    if (ask_first) {
        io.out << "execute? [y/N] " << std::flush;
        if (!read_yes(io)) {
            io.out << "skipped\n";
            return kOk;
        }
    }
    ExecOptions options;
    // Stream trace lines as they happen so they interleave with consent prompts.
    options.observer = [&io](const TraceEvent& ev) { io.out << ev.rendered << "\n"; };
    CodeOutcome outcome = run_code(code, table, config.limits, std::move(consent), options);
    print_status(io.out, outcome.failure_class, outcome.failure_message, outcome.failure_line,
                 outcome.failure_col);
    return outcome.ok() ? kOk : kFailure;
}

int cmd_run(const Config& config, const std::string& text, int trial, Streams& io) {
    Intention intention(text);
    FunctionTable table = load_table(config);
    auto backend = make_backend(config);
    return generate_and_execute(config, *backend, table, intention, trial,
                                make_consent(config.consent, io), io, false);
}

int cmd_repl(const Config& config, Streams& io) {
    FunctionTable table = load_table(config);
    auto backend = make_backend(config);
    while (true) {
        io.out << "intention> " << std::flush;
        std::string line;
        if (!std::getline(io.in, line) || line == "exit" || line == "quit")
            return kOk;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            generate_and_execute(config, *backend, table, Intention(line), 1,
                                 make_consent(ConsentMode::Interactive, io), io, true);
        } catch (const std::exception& e) {
            io.out << "error: " << e.what() << "\n";
        }
    }
}

int cmd_bench(const Config& config, const std::vector<std::string>& formats,
              const std::string& out_dir, Streams& io) {
    std::vector<ReportFormat> chosen;
    for (const auto& f : formats) {
        try {
            chosen.push_back(parse_report_format(f));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (chosen.empty())
        chosen.push_back(ReportFormat::Markdown);

    auto corpus = corpus_of(config);
    FunctionTable table = load_table(config);
    auto backend = make_backend(config);
    TrialSettings settings;
    settings.limits = config.limits;
    settings.params = config.params;
    BenchReport report;
    try {
        report = run_bench(corpus, *backend, config.trials, table,
                           make_consent(config.consent, io), settings);
    } catch (const BackendError& e) {
        throw ConfigError(e.what());
    }

    if (out_dir.empty()) {
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            if (i > 0)
                io.out << "\n";
            io.out << render_report(report, chosen[i]);
        }
        return kOk;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    for (auto format : chosen) {
        auto file = std::filesystem::path(out_dir) / ("report" + std::string(file_extension(format)));
        std::ofstream f(file, std::ios::binary);
        f << render_report(report, format);
        if (!f)
            throw IoError("cannot write " + file.string());
        io.out << "wrote " << file.string() << "\n";
    }
    return kOk;
}

int cmd_record(const Config& config, const std::string& out_dir, bool force, Streams& io) {
    if (out_dir.empty())
        throw ConfigError("record needs --out DIR");
    auto corpus = corpus_of(config);
    FunctionTable table = load_table(config);
    auto backend = make_backend(config);
    try {
        auto set = record_fixtures(corpus, *backend, config.trials, table, out_dir, force,
                                   config.params);
        io.out << "recorded " << set.intentions * set.trials << " fixtures in "
               << set.root.string() << "\n";
    } catch (const BackendError& e) {
        io.err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_render_prompt(const Config& config, const std::string& text, bool verbose, Streams& io) {
    Intention intention(text);
    PromptBundle bundle = render_prompt(intention, load_table(config));
    if (verbose)
        io.err << "role: " << bundle.role << "\n";
    io.out << bundle.body;
    return kOk;
}

int cmd_trace(const Config& config, const std::string& file, bool run, Streams& io) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + file);
    std::ostringstream text;
    text << in.rdbuf();
    std::string source = text.str();

    try {
        io.out << dump_ast(parse_source(source));
    } catch (const LexError& e) {
        print_status(io.out, FailureClass::Lex, e.reason(), e.line(), e.col());
        return kFailure;
    } catch (const UnsupportedConstruct& e) {
        print_status(io.out, FailureClass::Unsupported,
                     "unsupported construct '" + e.name() + "'", e.line(), e.col());
        return kFailure;
    } catch (const SyntaxError& e) {
        print_status(io.out, FailureClass::Syntax, e.expectation(), e.line(), e.col());
        return kFailure;
    }
    if (!run)
        return kOk;
    FunctionTable table = load_table(config);
    ExecOptions options;
    options.observer = [&io](const TraceEvent& ev) { io.out << ev.rendered << "\n"; };
    CodeOutcome outcome =
        run_code(source, table, config.limits, make_consent(config.consent, io), options);
    print_status(io.out, outcome.failure_class, outcome.failure_message, outcome.failure_line,
                 outcome.failure_col);
    return outcome.ok() ? kOk : kFailure;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err, const EnvLookup& env) {
    Streams io{in, out, err};
    CLI::App app{"Turn natural-language intentions into sandboxed script runs.", "intentctl"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    app.add_option("--config", config_file, "flat key = value configuration file");
    std::vector<std::pair<CLI::Option*, const SettingFlag*>> settings;
    std::vector<std::string> setting_values(std::size(kSettingFlags));
    for (std::size_t i = 0; i < std::size(kSettingFlags); ++i)
        settings.emplace_back(
            app.add_option(kSettingFlags[i].flag, setting_values[i], kSettingFlags[i].help),
            &kSettingFlags[i]);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "extra diagnostics on stderr");

    std::string intention_text;
    int trial = 1;
    auto* run = app.add_subcommand("run", "generate and execute code for one intention");
    run->add_option("intention", intention_text, "the intention text")->required();
    run->add_option("--trial", trial, "replay trial to use")->check(CLI::PositiveNumber);

    std::vector<std::string> formats;
    std::string out_dir;
    auto* bench = app.add_subcommand("bench", "run the benchmark protocol over a corpus");
    bench->add_option("--format", formats, "markdown, csv or json-lines (repeatable)");
    bench->add_option("--out", out_dir, "directory for report files");

    auto* repl = app.add_subcommand("repl", "interactive intention loop");

    auto* render = app.add_subcommand("render-prompt", "print the prompt for an intention");
    render->add_option("intention", intention_text, "the intention text")->required();

    std::string script;
    bool execute_script = false;
    auto* trace = app.add_subcommand("trace", "dump the syntax tree of a script");
    trace->add_option("file", script, "script file")->required();
    trace->add_flag("--execute", execute_script, "also run it against the stub table");

    bool force = false;
    auto* record = app.add_subcommand("record", "capture live generations as replay fixtures");
    record->add_option("--out", out_dir, "fixture directory")->required();
    record->add_flag("--force", force, "overwrite a non-empty directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        Config config;
        if (!config_file.empty())
            apply_config_file(config, config_file);
        apply_environment(config, env);
        for (auto [opt, flag] : settings)
            if (opt->count() > 0)
                apply_setting(config, flag->key, setting_values[flag - kSettingFlags]);
        config.validate();
        if (verbose)
            err << "backend: " << to_string(config.backend) << ", consent: "
                << to_string(config.consent) << "\n";

        if (run->parsed())
            return cmd_run(config, intention_text, trial, io);
        if (bench->parsed())
            return cmd_bench(config, formats, out_dir, io);
        if (repl->parsed())
            return cmd_repl(config, io);
        if (render->parsed())
            return cmd_render_prompt(config, intention_text, verbose, io);
        if (trace->parsed())
            return cmd_trace(config, script, execute_script, io);
        if (record->parsed())
            return cmd_record(config, out_dir, force, io);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const EmptyIntention& e) {
        err << "config error: " << e.what() << "\n";
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
    }
    return kConfigError;
}

} // namespace intent
