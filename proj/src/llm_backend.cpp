#include "intent/llm_backend.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

namespace intent {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

void GenerationParams::validate() const {
    if (max_tokens <= 0)
        throw std::invalid_argument("max_tokens must be positive");
    if (timeout.count() <= 0)
        throw std::invalid_argument("timeout must be positive");
    if (temperature < 0)
        throw std::invalid_argument("temperature must be non-negative");
    if (model.empty())
        throw std::invalid_argument("model must be set");
}

std::string_view to_string(BackendErrorKind kind) {
    switch (kind) {
    case BackendErrorKind::NetworkError: return "NetworkError";
    case BackendErrorKind::AuthError: return "AuthError";
    case BackendErrorKind::EmptyResponse: return "EmptyResponse";
    case BackendErrorKind::FixtureMissing: return "FixtureMissing";
    }
    return "?";
}

// ---- HTTP ----

std::string chat_request_body(const PromptBundle& bundle, const GenerationParams& params) {
    json body = {
        {"model", params.model},
        {"messages",
         json::array({{{"role", "system"}, {"content", bundle.role}},
                      {{"role", "user"}, {"content", bundle.body}}})},
        {"temperature", params.temperature},
        {"max_tokens", params.max_tokens},
        {"stream", true},
    };
    return body.dump();
}

std::string SseDeltaParser::feed(std::string_view bytes) {
    pending_.append(bytes);
    std::string content;
    std::size_t start = 0;
    while (true) {
        auto nl = pending_.find('\n', start);
        if (nl == std::string::npos)
            break;
        std::string_view line(pending_.data() + start, nl - start);
        start = nl + 1;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.starts_with("data:"))
            continue;
        line.remove_prefix(5);
        if (!line.empty() && line.front() == ' ')
            line.remove_prefix(1);
        if (line == "[DONE]") {
            done_ = true;
            continue;
        }
        auto chunk = json::parse(line, nullptr, false);
        if (chunk.is_discarded() || !chunk.contains("choices") || chunk["choices"].empty())
            continue;
        const auto& choice = chunk["choices"][0];
        if (choice.contains("delta") && choice["delta"].contains("content") &&
            choice["delta"]["content"].is_string())
            content += choice["delta"]["content"].get<std::string>();
    }
    pending_.erase(0, start);
    return content;
}

HttpBackend::HttpBackend(Options options) : options_(std::move(options)) {}

GenerationResult HttpBackend::generate(const PromptBundle& bundle, const GenerationParams& params,
                                       const GenerationSlot&) {
    params.validate();
    const char* key = std::getenv(options_.credential_env.c_str());
    if (!key || !*key)
        throw BackendError(BackendErrorKind::AuthError,
                           "credential variable " + options_.credential_env + " is not set");

    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(options_.base_url, m, url_re))
        throw BackendError(BackendErrorKind::NetworkError, "malformed endpoint " + options_.base_url);
    std::string origin = m[1];
    std::string prefix = m[2];
    while (!prefix.empty() && prefix.back() == '/')
        prefix.pop_back();

    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(params.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(params.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());

    httplib::Request req;
    req.method = "POST";
    req.path = prefix + "/chat/completions";
    req.body = chat_request_body(bundle, params);
    req.set_header("Content-Type", "application/json");
    req.set_header("Accept", "text/event-stream");
    req.set_header("Authorization", std::string("Bearer ") + key);

    GenerationResult out;
    SseDeltaParser sse;
    std::string error_body;
    int status = 0;
    bool first = true;
    auto dispatched = Clock::now();

    req.response_handler = [&](const httplib::Response& res) {
        status = res.status;
        return true;
    };
    req.content_receiver = [&](const char* data, std::size_t n, std::uint64_t, std::uint64_t) {
        if (status != 200) {
            error_body.append(data, n);
            return true;
        }
        std::string delta = sse.feed({data, n});
        if (!delta.empty()) {
            if (first) {
                out.ttft = Clock::now() - dispatched;
                first = false;
            }
            out.raw_text += delta;
        }
        return true;
    };

    auto res = client.send(req);
    out.total_time = Clock::now() - dispatched;
    if (!res)
        throw BackendError(BackendErrorKind::NetworkError,
                           "request failed: " + httplib::to_string(res.error()));
    if (status == 401 || status == 403)
        throw BackendError(BackendErrorKind::AuthError,
                           "credential rejected (HTTP " + std::to_string(status) + ")");
    if (status != 200)
        throw BackendError(BackendErrorKind::NetworkError,
                           "HTTP " + std::to_string(status) + ": " + error_body.substr(0, 200));
    if (out.raw_text.empty())
        throw BackendError(BackendErrorKind::EmptyResponse, "model returned no content");
    return out;
}

// ---- replay ----

std::filesystem::path fixture_path(const std::filesystem::path& root, const GenerationSlot& slot) {
    return root / ("intention-" + std::to_string(slot.intention)) /
           ("trial-" + std::to_string(slot.trial) + ".txt");
}

std::filesystem::path timing_path(const std::filesystem::path& root, const GenerationSlot& slot) {
    return root / ("intention-" + std::to_string(slot.intention)) /
           ("trial-" + std::to_string(slot.trial) + ".timing");
}

void write_fixture(const std::filesystem::path& root, const GenerationSlot& slot,
                   const GenerationResult& result) {
    auto text_file = fixture_path(root, slot);
    std::filesystem::create_directories(text_file.parent_path());
    std::ofstream text(text_file, std::ios::binary);
    text << result.raw_text;
    std::ofstream timing(timing_path(root, slot), std::ios::binary);
    timing << std::fixed;
    timing.precision(3);
    timing << result.ttft.count() << '\n' << result.total_time.count() << '\n';
    if (!text || !timing)
        throw std::runtime_error("failed to write fixture " + text_file.string());
}

ReplayBackend::ReplayBackend(std::filesystem::path root) : root_(std::move(root)) {}

GenerationResult ReplayBackend::generate(const PromptBundle&, const GenerationParams&,
                                         const GenerationSlot& slot) {
    auto file = fixture_path(root_, slot);
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw BackendError(BackendErrorKind::FixtureMissing, "missing fixture " + file.string());
    std::ostringstream text;
    text << in.rdbuf();

    GenerationResult out;
    out.raw_text = text.str();
    if (out.raw_text.empty())
        throw BackendError(BackendErrorKind::EmptyResponse, "empty fixture " + file.string());

    std::ifstream timing(timing_path(root_, slot));
    double ttft = 0;
    double total = 0;
    if (timing && (timing >> ttft >> total)) {
        out.ttft = Millis(ttft);
        out.total_time = Millis(total);
    }
    return out;
}

void ReplayBackend::check_available(int intentions, int trials) const {
    if (!std::filesystem::is_directory(root_))
        throw BackendError(BackendErrorKind::FixtureMissing,
                           "fixture directory " + root_.string() + " does not exist");
    for (int i = 1; i <= intentions; ++i) {
        for (int j = 1; j <= trials; ++j) {
            auto file = fixture_path(root_, {i, j});
            if (!std::filesystem::is_regular_file(file))
                throw BackendError(BackendErrorKind::FixtureMissing,
                                   "missing fixture " + file.string());
        }
    }
}

// ---- mock ----

MockBackend::MockBackend(Options options) : options_(std::move(options)) {
    if (options_.outputs.empty())
        throw std::invalid_argument("mock backend needs at least one output");
    if (options_.ttft > options_.total)
        throw std::invalid_argument("mock ttft must not exceed total time");
}

GenerationResult MockBackend::generate(const PromptBundle&, const GenerationParams&,
                                       const GenerationSlot&) {
    std::size_t n = calls_.fetch_add(1);
    auto dispatched = Clock::now();
    auto to_clock = [](Millis d) { return std::chrono::duration_cast<Clock::duration>(d); };
    std::this_thread::sleep_until(dispatched + to_clock(options_.ttft));
    GenerationResult out;
    out.ttft = Clock::now() - dispatched;
    out.raw_text = options_.outputs[n % options_.outputs.size()];
    std::this_thread::sleep_until(dispatched + to_clock(options_.total));
    out.total_time = Clock::now() - dispatched;
    return out;
}

// ---- code extraction ----

namespace {

bool blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string trim_block(std::string_view text) {
    // Drop whole leading blank lines, keeping the first line's indentation.
    while (!text.empty()) {
        auto nl = text.find('\n');
        if (nl == std::string_view::npos || !blank(text.substr(0, nl)))
            break;
        text.remove_prefix(nl + 1);
    }
    if (blank(text))
        return {};
    auto last = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(0, last + 1));
}

// Position of a line that starts (after optional indentation) with ```.
std::size_t find_fence(std::string_view text, std::size_t from) {
    std::size_t line_start = from;
    while (line_start < text.size()) {
        auto nl = text.find('\n', line_start);
        auto line = text.substr(line_start, nl == std::string_view::npos ? std::string_view::npos
                                                                           : nl - line_start);
        auto first = line.find_first_not_of(" \t");
        if (first != std::string_view::npos && line.substr(first).starts_with("```"))
            return line_start;
        if (nl == std::string_view::npos)
            break;
        line_start = nl + 1;
    }
    return std::string_view::npos;
}

} // namespace

std::string extract_code(std::string_view raw) {
    std::string_view body = raw;
    auto open = find_fence(raw, 0);
    if (open != std::string_view::npos) {
        auto nl = raw.find('\n', open);
        if (nl == std::string_view::npos)
            throw NoCodeError();
        auto close = find_fence(raw, nl + 1);
        body = raw.substr(nl + 1, close == std::string_view::npos ? std::string_view::npos
                                                                   : close - nl - 1);
    }
    std::string code = trim_block(body);
    if (code.empty())
        throw NoCodeError();
    return code;
}

} // namespace intent
