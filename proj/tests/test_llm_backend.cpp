#include "intent/llm_backend.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <cstdlib>
#include <thread>

using namespace intent;
using namespace std::chrono_literals;

namespace {

BackendErrorKind backend_error(auto&& fn) {
    try {
        fn();
    } catch (const BackendError& e) {
        return e.kind();
    }
    FAIL("no BackendError thrown");
    return BackendErrorKind::NetworkError;
}

PromptBundle bundle() { return {std::string(kDefaultRole), "write code"}; }

std::string sse_chunk(std::string_view content) {
    nlohmann::json j = {{"choices", {{{"delta", {{"content", content}}}}}}};
    return "data: " + j.dump() + "\n\n";
}

// Local OpenAI-style endpoint streaming a fixed reply.
class FakeServer {
public:
    FakeServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            last_auth_ = req.get_header_value("Authorization");
            last_body_ = req.body;
            if (last_auth_ != "Bearer test-key") {
                res.status = 401;
                res.set_content(R"({"error":"bad key"})", "application/json");
                return;
            }
            res.set_chunked_content_provider("text/event-stream", [this](std::size_t, httplib::DataSink& sink) {
                std::this_thread::sleep_for(first_delay_);
                for (const auto& piece : pieces_) {
                    std::string chunk = sse_chunk(piece);
                    sink.write(chunk.data(), chunk.size());
                    std::this_thread::sleep_for(gap_);
                }
                std::string done = "data: [DONE]\n\n";
                sink.write(done.data(), done.size());
                sink.done();
                return true;
            });
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    std::vector<std::string> pieces_{"```python\n", "print_screen(\"hi\")", "\n```"};
    std::chrono::milliseconds first_delay_{50};
    std::chrono::milliseconds gap_{30};
    std::string last_auth_;
    std::string last_body_;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST_CASE("generation parameters") {
    GenerationParams p;
    CHECK(p.model == "gpt-4o-mini");
    CHECK(p.temperature == doctest::Approx(0.2));
    CHECK(p.max_tokens == 1024);
    CHECK_NOTHROW(p.validate());
    p.max_tokens = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = {};
    p.timeout = 0ms;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("code extraction") {
    CHECK(extract_code("```python\nx = 1\n```") == "x = 1");
    CHECK(extract_code("here you go:\n```\nplay_voice(\"hi\")\n```\nenjoy!") == "play_voice(\"hi\")");
    CHECK(extract_code("a\n```py\nfirst()\n```\n```\nsecond()\n```") == "first()");
    CHECK(extract_code("```python\n\n\nif a:\n    b()\n\n```") == "if a:\n    b()");
    CHECK(extract_code("```python\nunterminated()\n") == "unterminated()");
    CHECK(extract_code("  ```\n  indented()\n  ```") == "  indented()");
    CHECK_THROWS_AS(extract_code("   \n\t\n"), NoCodeError);
    CHECK_THROWS_AS(extract_code("```python\n```"), NoCodeError);
    CHECK_THROWS_AS(extract_code("```python\n  \n```"), NoCodeError);
}

TEST_CASE("unfenced golden code passes through unchanged") {
    std::string code = testing::golden_code();
    while (code.ends_with('\n'))
        code.pop_back();
    CHECK(extract_code(code) == code);
    CHECK(extract_code(code + "\n\n") == code);
}

TEST_CASE("extraction is idempotent") {
    for (const char* raw : {"```python\nx = 1\n```", "text\n```\na()\n```\nmore", "plain()\n",
                            "\n\n  x = 1  \n\n", "```\n```x\n```"}) {
        try {
            auto once = extract_code(raw);
            CHECK(extract_code(once) == once);
        } catch (const NoCodeError&) {
        }
    }
}

TEST_CASE("SSE parsing across arbitrary splits") {
    std::string stream = sse_chunk("Hel") + ": keep-alive\n\n" + sse_chunk("lo") +
                         "data: {\"choices\":[{\"delta\":{\"role\":\"assistant\"}}]}\n\n" +
                         "data: [DONE]\n\n";
    for (std::size_t cut = 0; cut <= stream.size(); ++cut) {
        SseDeltaParser p;
        std::string text = p.feed(std::string_view(stream).substr(0, cut));
        text += p.feed(std::string_view(stream).substr(cut));
        CHECK(text == "Hello");
        CHECK(p.done());
    }
    SseDeltaParser crlf;
    CHECK(crlf.feed("data: {\"choices\":[{\"delta\":{\"content\":\"x\"}}]}\r\n\r\n") == "x");
}

TEST_CASE("request body") {
    GenerationParams p;
    auto body = nlohmann::json::parse(chat_request_body({"role text", "body text"}, p));
    CHECK(body["model"] == "gpt-4o-mini");
    CHECK(body["stream"] == true);
    CHECK(body["max_tokens"] == 1024);
    REQUIRE(body["messages"].size() == 2);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][0]["content"] == "role text");
    CHECK(body["messages"][1]["role"] == "user");
    CHECK(body["messages"][1]["content"] == "body text");
}

TEST_CASE("replay serves the recorded golden output") {
    ReplayBackend replay(testing::kFixtures);
    auto a = replay.generate(bundle(), {}, {1, 1});
    CHECK(a.raw_text == testing::golden_code());
    CHECK(a.ttft.count() == doctest::Approx(458.2));
    CHECK(a.total_time.count() == doctest::Approx(3412.0));
    auto b = replay.generate(bundle(), {}, {1, 1});
    CHECK(a.raw_text == b.raw_text);
    CHECK(a.ttft == b.ttft);
    CHECK(a.total_time == b.total_time);
    CHECK_NOTHROW(replay.check_available(4, 5));
    CHECK(backend_error([&] { replay.check_available(4, 6); }) == BackendErrorKind::FixtureMissing);
    CHECK(backend_error([&] { replay.generate(bundle(), {}, {9, 1}); }) ==
          BackendErrorKind::FixtureMissing);
    CHECK(backend_error([] { ReplayBackend("/nonexistent/fixtures").check_available(1, 1); }) ==
          BackendErrorKind::FixtureMissing);
}

TEST_CASE("fixtures round-trip through write_fixture") {
    testing::TempDir dir;
    GenerationResult r{"print_screen(\"x\")", Millis(12.5), Millis(80.25)};
    write_fixture(dir.path(), {2, 3}, r);
    CHECK(std::filesystem::exists(dir.path() / "intention-2" / "trial-3.txt"));
    CHECK(std::filesystem::exists(dir.path() / "intention-2" / "trial-3.timing"));
    auto back = ReplayBackend(dir.path()).generate(bundle(), {}, {2, 3});
    CHECK(back.raw_text == r.raw_text);
    CHECK(back.ttft.count() == doctest::Approx(12.5));
    CHECK(back.total_time.count() == doctest::Approx(80.25));
}

TEST_CASE("replay without a sidecar reports zero timings") {
    testing::TempDir dir;
    testing::spit(dir.path() / "intention-1" / "trial-1.txt", "pass");
    auto r = ReplayBackend(dir.path()).generate(bundle(), {}, {1, 1});
    CHECK(r.ttft.count() == 0);
    CHECK(r.total_time.count() == 0);
}

TEST_CASE("mock reproduces configured timings") {
    MockBackend mock({Millis(40), Millis(90), {"a()", "b()"}});
    auto first = mock.generate(bundle(), {}, {});
    auto second = mock.generate(bundle(), {}, {});
    CHECK(first.raw_text == "a()");
    CHECK(second.raw_text == "b()");
    CHECK(first.ttft.count() == doctest::Approx(40).epsilon(0.5));
    CHECK(first.ttft.count() >= 40);
    CHECK(first.total_time.count() >= 90);
    CHECK(first.total_time.count() < 90 + 20);
    CHECK(first.ttft <= first.total_time);
    CHECK_THROWS_AS(MockBackend({Millis(5), Millis(1), {"x"}}), std::invalid_argument);
    CHECK_THROWS_AS(MockBackend({Millis(0), Millis(1), {}}), std::invalid_argument);
}

TEST_CASE("HTTP backend needs a credential") {
    HttpBackend http({"http://127.0.0.1:9/v1", "INTENT_TEST_UNSET_CREDENTIAL"});
    CHECK(backend_error([&] { http.generate(bundle(), {}, {}); }) == BackendErrorKind::AuthError);
}

TEST_CASE("HTTP backend streams from a local endpoint") {
    FakeServer server;
    ::setenv("INTENT_TEST_KEY", "test-key", 1);
    HttpBackend http({server.url(), "INTENT_TEST_KEY"});
    auto r = http.generate(bundle(), {}, {});
    CHECK(r.raw_text == "```python\nprint_screen(\"hi\")\n```");
    CHECK(extract_code(r.raw_text) == "print_screen(\"hi\")");
    CHECK(r.ttft.count() >= 45);
    CHECK(r.total_time.count() >= r.ttft.count() + 50);
    CHECK(server.last_auth_ == "Bearer test-key");
    auto sent = nlohmann::json::parse(server.last_body_);
    CHECK(sent["messages"][1]["content"] == "write code");

    ::setenv("INTENT_TEST_KEY", "wrong", 1);
    CHECK(backend_error([&] { http.generate(bundle(), {}, {}); }) == BackendErrorKind::AuthError);

    ::setenv("INTENT_TEST_KEY", "test-key", 1);
    server.pieces_.clear();
    CHECK(backend_error([&] { http.generate(bundle(), {}, {}); }) == BackendErrorKind::EmptyResponse);
    ::unsetenv("INTENT_TEST_KEY");
}

TEST_CASE("HTTP backend reports unreachable endpoints") {
    ::setenv("INTENT_TEST_KEY", "test-key", 1);
    int port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    GenerationParams p;
    p.timeout = 2000ms;
    HttpBackend http({"http://127.0.0.1:" + std::to_string(port) + "/v1", "INTENT_TEST_KEY"});
    CHECK(backend_error([&] { http.generate(bundle(), p, {}); }) == BackendErrorKind::NetworkError);
    HttpBackend bad({"not a url", "INTENT_TEST_KEY"});
    CHECK(backend_error([&] { bad.generate(bundle(), p, {}); }) == BackendErrorKind::NetworkError);
    ::unsetenv("INTENT_TEST_KEY");
}
