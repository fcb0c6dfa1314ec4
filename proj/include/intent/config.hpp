#pragma once

#include "intent/executor.hpp"
#include "intent/llm_backend.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace intent {

enum class BackendKind { Http, Replay, Mock };

std::string_view to_string(BackendKind kind);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    BackendKind backend = BackendKind::Http;
    std::string endpoint = "https://api.openai.com/v1";
    std::string credential_env = "OPENAI_API_KEY";
    std::filesystem::path fixtures;
    ConsentMode consent = ConsentMode::AutoDeny;
    Limits limits;
    int trials = 5;
    GenerationParams params;
    std::optional<std::filesystem::path> table;
    std::optional<std::filesystem::path> corpus;
    double mock_ttft_ms = 0;
    double mock_total_ms = 0;
    std::string mock_output = "print_screen(\"mock backend\")";

    Config();

    /// Throws ConfigError.
    void validate() const;
};

/// Sets one option by its file key (`backend`, `max_steps`, ...).
/// Throws ConfigError for unknown keys, malformed values, and any key that
/// looks like a credential.
void apply_setting(Config& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment line.
void apply_config_text(Config& config, std::string_view text);
void apply_config_file(Config& config, const std::filesystem::path& file);

using EnvLookup = std::function<const char*(const char*)>;

/// Applies `INTENT_<KEY>` variables (upper-cased file keys).
void apply_environment(Config& config, const EnvLookup& lookup);

/// Builds the configured backend. Validates first.
std::unique_ptr<Backend> make_backend(const Config& config);

FunctionTable load_table(const Config& config, const StubReplies& replies = {});

} // namespace intent
