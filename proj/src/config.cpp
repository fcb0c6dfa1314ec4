#include "intent/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#ifndef INTENT_FIXTURE_DIR
#define INTENT_FIXTURE_DIR "fixtures"
#endif

namespace intent {

namespace {

constexpr std::array kKeys{
    "backend",   "endpoint",      "credential_env", "fixtures",       "consent",
    "max_steps", "max_list_len",  "max_string_len", "trials",         "model",
    "temperature", "max_tokens",  "timeout_ms",     "table",          "corpus",
    "mock_ttft_ms", "mock_total_ms", "mock_output",
};

std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T v{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size())
        throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(text) +
                          "'");
    return v;
}

bool looks_like_secret(std::string_view key) {
    for (std::string_view bad : {"api_key", "apikey", "credential", "token", "secret", "password"})
        if (key == bad)
            return true;
    return false;
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

} // namespace

std::string_view to_string(BackendKind kind) {
    switch (kind) {
    case BackendKind::Http: return "http";
    case BackendKind::Replay: return "replay";
    case BackendKind::Mock: return "mock";
    }
    return "?";
}

Config::Config() : fixtures(INTENT_FIXTURE_DIR) {}

void Config::validate() const {
    try {
        limits.validate();
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (trials < 1)
        throw ConfigError("trials must be at least 1");
    switch (backend) {
    case BackendKind::Http:
        if (endpoint.empty())
            throw ConfigError("http backend requires an endpoint");
        if (credential_env.empty())
            throw ConfigError("http backend requires credential_env");
        break;
    case BackendKind::Replay:
        if (fixtures.empty())
            throw ConfigError("replay backend requires a fixtures path");
        break;
    case BackendKind::Mock:
        if (mock_ttft_ms < 0 || mock_total_ms < mock_ttft_ms)
            throw ConfigError("mock timings need 0 <= ttft <= total");
        break;
    }
}

void apply_setting(Config& c, std::string_view key, std::string_view raw) {
    std::string_view value = trim(raw);
    if (looks_like_secret(key))
        throw ConfigError("credentials are not accepted in configuration; export them in the "
                          "variable named by credential_env");
    if (key == "backend") {
        if (value == "http")
            c.backend = BackendKind::Http;
        else if (value == "replay")
            c.backend = BackendKind::Replay;
        else if (value == "mock")
            c.backend = BackendKind::Mock;
        else
            throw ConfigError("unknown backend '" + std::string(value) + "'");
    } else if (key == "endpoint") {
        c.endpoint = value;
    } else if (key == "credential_env") {
        c.credential_env = value;
    } else if (key == "fixtures") {
        c.fixtures = std::string(value);
    } else if (key == "consent") {
        try {
            c.consent = parse_consent_mode(value);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "max_steps") {
        c.limits.max_steps = parse_number<std::uint64_t>(key, value);
    } else if (key == "max_list_len") {
        c.limits.max_list_len = parse_number<std::size_t>(key, value);
    } else if (key == "max_string_len") {
        c.limits.max_string_len = parse_number<std::size_t>(key, value);
    } else if (key == "trials") {
        c.trials = parse_number<int>(key, value);
    } else if (key == "model") {
        c.params.model = value;
    } else if (key == "temperature") {
        c.params.temperature = parse_number<double>(key, value);
    } else if (key == "max_tokens") {
        c.params.max_tokens = parse_number<int>(key, value);
    } else if (key == "timeout_ms") {
        c.params.timeout = std::chrono::milliseconds(parse_number<long>(key, value));
    } else if (key == "table") {
        c.table = std::string(value);
    } else if (key == "corpus") {
        c.corpus = std::string(value);
    } else if (key == "mock_ttft_ms") {
        c.mock_ttft_ms = parse_number<double>(key, value);
    } else if (key == "mock_total_ms") {
        c.mock_total_ms = parse_number<double>(key, value);
    } else if (key == "mock_output") {
        c.mock_output = value;
    } else {
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    }
}

void apply_config_text(Config& config, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view l = trim(line);
        if (l.empty() || l.front() == '#')
            continue;
        auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        std::string_view key = trim(l.substr(0, eq));
        try {
            apply_setting(config, key, l.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(number) + ": " + e.what());
        }
    }
}

void apply_config_file(Config& config, const std::filesystem::path& file) {
    apply_config_text(config, read_file(file));
}

void apply_environment(Config& config, const EnvLookup& lookup) {
    for (std::string_view key : kKeys) {
        std::string name = "INTENT_";
        std::ranges::transform(key, std::back_inserter(name),
                               [](char ch) { return static_cast<char>(std::toupper(ch)); });
        if (const char* value = lookup(name.c_str()))
            apply_setting(config, key, value);
    }
}

std::unique_ptr<Backend> make_backend(const Config& config) {
    config.validate();
    switch (config.backend) {
    case BackendKind::Http:
        return std::make_unique<HttpBackend>(
            HttpBackend::Options{config.endpoint, config.credential_env});
    case BackendKind::Replay:
        return std::make_unique<ReplayBackend>(config.fixtures);
    case BackendKind::Mock:
        return std::make_unique<MockBackend>(MockBackend::Options{
            Millis(config.mock_ttft_ms), Millis(config.mock_total_ms), {config.mock_output}});
    }
    throw ConfigError("unknown backend");
}

FunctionTable load_table(const Config& config, const StubReplies& replies) {
    if (!config.table)
        return default_stub_table(replies);
    try {
        return parse_table_text(read_file(*config.table));
    } catch (const TableError& e) {
        throw ConfigError(config.table->string() + ": " + e.what());
    }
}

} // namespace intent
