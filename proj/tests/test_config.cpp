#include "intent/config.hpp"

#include "support.hpp"

#include <doctest.h>

#include <map>

using namespace intent;

namespace {

EnvLookup env_of(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const char* name) -> const char* {
        auto it = vars.find(name);
        return it == vars.end() ? nullptr : it->second.c_str();
    };
}

std::string config_error(auto&& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    FAIL("no ConfigError thrown");
    return {};
}

} // namespace

TEST_CASE("defaults") {
    Config c;
    CHECK(c.backend == BackendKind::Http);
    CHECK(c.credential_env == "OPENAI_API_KEY");
    CHECK(c.consent == ConsentMode::AutoDeny);
    CHECK(c.trials == 5);
    CHECK(c.fixtures == testing::kFixtures);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("file values") {
    Config c;
    apply_config_text(c, "# local replay\n"
                         "backend = replay\n"
                         "\n"
                         "  max_steps=250  \n"
                         "consent = auto-allow\n"
                         "temperature = 0.7\n"
                         "timeout_ms = 1500\n"
                         "mock_output = x = \"a=b\"\n");
    CHECK(c.backend == BackendKind::Replay);
    CHECK(c.limits.max_steps == 250);
    CHECK(c.consent == ConsentMode::AutoAllow);
    CHECK(c.params.temperature == doctest::Approx(0.7));
    CHECK(c.params.timeout == std::chrono::milliseconds(1500));
    CHECK(c.mock_output == "x = \"a=b\"");
}

TEST_CASE("file, then environment, then flags") {
    testing::TempDir dir;
    testing::spit(dir.path() / "intent.conf", "model = from-file\ntrials = 3\nmax_steps = 10\n");
    Config c;
    apply_config_file(c, dir.path() / "intent.conf");
    apply_environment(c, env_of({{"INTENT_MODEL", "from-env"}, {"INTENT_MAX_STEPS", "20"}}));
    apply_setting(c, "max_steps", "30");
    CHECK(c.trials == 3);
    CHECK(c.params.model == "from-env");
    CHECK(c.limits.max_steps == 30);
}

TEST_CASE("credentials never come from configuration") {
    for (const char* key : {"api_key", "apikey", "token", "secret", "password", "credential"}) {
        Config c;
        CHECK_MESSAGE(config_error([&] { apply_setting(c, key, "sk-abc"); }).find("credential_env") !=
                          std::string::npos,
                      key);
    }
    Config c;
    auto msg = config_error([&] { apply_config_text(c, "backend = mock\napi_key = sk-abc\n"); });
    CHECK(msg.starts_with("line 2:"));
    CHECK(msg.find("sk-abc") == std::string::npos);
    apply_setting(c, "credential_env", "MY_KEY");
    CHECK(c.credential_env == "MY_KEY");
}

TEST_CASE("malformed input is reported with its line") {
    Config c;
    CHECK(config_error([&] { apply_config_text(c, "backend = mock\nnonsense\n"); }) ==
          "line 2: expected key = value");
    CHECK(config_error([&] { apply_config_text(c, "colour = blue"); }).find("unknown configuration key") !=
          std::string::npos);
    CHECK_THROWS_AS(apply_setting(c, "max_steps", "ten"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "max_steps", "10x"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "backend", "carrier-pigeon"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "consent", "maybe"), ConfigError);
    CHECK_THROWS_AS(apply_config_file(c, "/nonexistent/intent.conf"), ConfigError);
    CHECK_THROWS_AS(apply_environment(c, env_of({{"INTENT_TRIALS", "many"}})), ConfigError);
}

TEST_CASE("validation") {
    Config c;
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.limits.max_steps = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.params.max_tokens = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.endpoint.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.backend = BackendKind::Mock;
    c.mock_ttft_ms = 50;
    c.mock_total_ms = 10;
    CHECK_THROWS_AS(make_backend(c), ConfigError);
}

TEST_CASE("backends are built from configuration") {
    Config c;
    c.backend = BackendKind::Replay;
    auto replay = make_backend(c);
    CHECK(dynamic_cast<ReplayBackend*>(replay.get()) != nullptr);
    c.backend = BackendKind::Mock;
    c.mock_output = "pass";
    auto mock = make_backend(c);
    CHECK(mock->generate({"r", "b"}, {}, {}).raw_text == "pass");
    c.backend = BackendKind::Http;
    CHECK(dynamic_cast<HttpBackend*>(make_backend(c).get()) != nullptr);
}

TEST_CASE("function tables from files") {
    testing::TempDir dir;
    testing::spit(dir.path() / "table.txt",
                  "function play_voice(message: String): void\n\n# only one\n");
    Config c;
    c.table = dir.path() / "table.txt";
    auto table = load_table(c);
    CHECK(table.size() == 1);
    CHECK(table.find("play_voice") != nullptr);
    CHECK(load_table(Config{}).size() == default_stub_table().size());

    testing::spit(dir.path() / "bad.txt", "function broken(\n");
    c.table = dir.path() / "bad.txt";
    CHECK_THROWS_AS(load_table(c), ConfigError);
}
