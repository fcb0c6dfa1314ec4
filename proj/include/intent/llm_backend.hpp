#pragma once

#include "intent/prompting.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace intent {

using Millis = std::chrono::duration<double, std::milli>;

struct GenerationParams {
    std::string model = "gpt-4o-mini";
    double temperature = 0.2;
    int max_tokens = 1024;
    std::chrono::milliseconds timeout{60000};

    /// Throws std::invalid_argument.
    void validate() const;
};

/// Raw model output with latency measured from request dispatch.
struct GenerationResult {
    std::string raw_text;
    Millis ttft{0};
    Millis total_time{0};
};

/// Which (intention, trial) pair a generation belongs to; only the replay
/// backend uses it to pick a fixture. Both indices are 1-based.
struct GenerationSlot {
    int intention = 1;
    int trial = 1;
};

enum class BackendErrorKind { NetworkError, AuthError, EmptyResponse, FixtureMissing };

std::string_view to_string(BackendErrorKind kind);

class BackendError : public std::runtime_error {
public:
    BackendError(BackendErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    BackendErrorKind kind() const { return kind_; }

private:
    BackendErrorKind kind_;
};

class Backend {
public:
    virtual ~Backend() = default;

    virtual GenerationResult generate(const PromptBundle& bundle, const GenerationParams& params,
                                      const GenerationSlot& slot) = 0;

    /// Throws BackendError(FixtureMissing) when the given protocol cannot be
    /// served. Only the replay backend has anything to check.
    virtual void check_available(int /*intentions*/, int /*trials*/) const {}

    virtual std::string name() const = 0;
};

/// OpenAI-compatible streaming chat-completions client. The role travels as
/// the system message and the prompt body as the user message.
class HttpBackend : public Backend {
public:
    struct Options {
        std::string base_url = "https://api.openai.com/v1";
        std::string credential_env = "OPENAI_API_KEY";
    };

    explicit HttpBackend(Options options);

    GenerationResult generate(const PromptBundle& bundle, const GenerationParams& params,
                              const GenerationSlot& slot) override;
    std::string name() const override { return "http"; }

private:
    Options options_;
};

/// JSON body of a streaming chat-completions request.
std::string chat_request_body(const PromptBundle& bundle, const GenerationParams& params);

/// Incremental parser for a `text/event-stream` of chat-completion chunks.
class SseDeltaParser {
public:
    /// Feeds raw bytes; returns the content text decoded from complete events.
    std::string feed(std::string_view bytes);
    bool done() const { return done_; }

private:
    std::string pending_;
    bool done_ = false;
};

/// Serves recorded outputs from `root/intention-<i>/trial-<j>.txt` with
/// optional `trial-<j>.timing` sidecars holding ttft and total milliseconds.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(std::filesystem::path root);

    GenerationResult generate(const PromptBundle& bundle, const GenerationParams& params,
                              const GenerationSlot& slot) override;
    void check_available(int intentions, int trials) const override;
    std::string name() const override { return "replay"; }

    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

std::filesystem::path fixture_path(const std::filesystem::path& root, const GenerationSlot& slot);
std::filesystem::path timing_path(const std::filesystem::path& root, const GenerationSlot& slot);

/// Writes one fixture and its timing sidecar.
void write_fixture(const std::filesystem::path& root, const GenerationSlot& slot,
                   const GenerationResult& result);

/// Returns scripted outputs in rotation, sleeping to reproduce the configured
/// latencies. Reported timings are measured, not copied from the options.
class MockBackend : public Backend {
public:
    struct Options {
        Millis ttft{0};
        Millis total{0};
        std::vector<std::string> outputs{"print_screen(\"mock backend\")"};
    };

    explicit MockBackend(Options options);

    GenerationResult generate(const PromptBundle& bundle, const GenerationParams& params,
                              const GenerationSlot& slot) override;
    std::string name() const override { return "mock"; }

private:
    Options options_;
    std::atomic<std::size_t> calls_{0};
};

class NoCodeError : public std::runtime_error {
public:
    NoCodeError() : std::runtime_error("model output contains no code") {}
};

/// Returns the body of the first fenced block, or the whole text when there
/// is no fence, with leading blank lines and trailing whitespace removed.
/// Throws NoCodeError when nothing remains.
std::string extract_code(std::string_view raw_text);

} // namespace intent
