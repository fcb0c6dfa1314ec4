#include "intent/function_table.hpp"

#include <doctest.h>

#include <vector>

using namespace intent;

namespace {

const char* kDocs =
    "function find_file_id(expression: String): Integer|null\n"
    "function find_contact_id(expression: String): Integer|null\n"
    "function find_contact_email(contact_id: Integer):String|null\n"
    "function play_voice(text: String): void\n"
    "function ask_question(question: String): String\n"
    "function play_audio_file(file: File): void\n"
    "function send_email(email: String, subject: String, text: String, attachments: "
    "Collection<Integer>): void\n"
    "function print_screen(text: String): void\n"
    "function shell(command: String): String";

FunctionEntry entry(std::string_view line, bool privileged = false) {
    return {parse_signature(line), [](std::span<const Value>) { return Value(); }, privileged};
}

TableErrorKind error_of(auto&& fn) {
    try {
        fn();
    } catch (const TableError& e) {
        return e.kind();
    }
    FAIL("no TableError thrown");
    return TableErrorKind::EmptyTable;
}

struct Recorder {
    std::vector<TraceEvent> events;
    TraceSink sink() {
        return [this](const TraceEvent& e) { events.push_back(e); };
    }
};

} // namespace

TEST_CASE("register appends in order") {
    FunctionTable t;
    t.add(entry("function find_file_id(expression: String): Integer|null"));
    CHECK(t.size() == 1);
    t.add(entry("function play_voice(text: String): void"));
    CHECK(t.entries()[1].signature.name == "play_voice");
}

TEST_CASE("register rejects duplicates and void parameters") {
    FunctionTable t;
    t.add(entry("function find_file_id(expression: String): Integer|null"));
    CHECK(error_of([&] { t.add(entry("function find_file_id(expression: String): Integer|null")); }) ==
          TableErrorKind::DuplicateName);

    FunctionSignature bad{"f", {{"x", TypeExpr::plain(BaseType::Void)}}, TypeExpr::plain(BaseType::Void)};
    CHECK(error_of([&] { FunctionTable().add({bad, {}, false}); }) == TableErrorKind::InvalidSignature);

    FunctionSignature dup{"g",
                          {{"x", TypeExpr::plain(BaseType::String)}, {"x", TypeExpr::plain(BaseType::String)}},
                          TypeExpr::plain(BaseType::Void)};
    CHECK(error_of([&] { FunctionTable().add({dup, {}, false}); }) == TableErrorKind::InvalidSignature);

    FunctionSignature wrapped{"h", {}, TypeExpr::nullable(BaseType::Void)};
    CHECK(error_of([&] { FunctionTable().add({wrapped, {}, false}); }) == TableErrorKind::InvalidSignature);
}

TEST_CASE("signature grammar") {
    auto sig = parse_signature("function send_email(email: String, subject: String, text: String, "
                               "attachments: Collection<Integer>): void");
    CHECK(sig.name == "send_email");
    REQUIRE(sig.params.size() == 4);
    CHECK(sig.params[3].type == TypeExpr::collection(BaseType::Integer));
    CHECK(sig.return_type.is_void());

    CHECK(parse_signature("function print_screen(): void").params.empty());
    CHECK(parse_signature("function f(x: File): File|null").return_type ==
          TypeExpr::nullable(BaseType::File));

    for (const char* bad : {"find(x: String): void", "function f(x: Str): void",
                            "function f(x String): void", "function 1f(x: String): void",
                            "function f(x: Collection<void>): void", "function f(x: void): void",
                            "function f(x: String|null|null): void", "function f(x: String)"})
        CHECK_MESSAGE(error_of([&] { parse_signature(bad); }) == TableErrorKind::InvalidSignature, bad);
}

TEST_CASE("render_docs reproduces the experiment API block") {
    CHECK(render_docs(default_stub_table()) == kDocs);
    CHECK(render_docs(default_stub_table()) == render_docs(default_stub_table()));
}

TEST_CASE("render_docs on single-entry tables") {
    FunctionTable voice;
    voice.add(entry("function play_voice(text: String): void"));
    CHECK(render_docs(voice) == "function play_voice(text: String): void");

    FunctionTable email;
    email.add(entry("function send_email(email: String, subject: String, text: String, "
                    "attachments: Collection<Integer>): void"));
    CHECK(render_docs(email) == "function send_email(email: String, subject: String, text: String, "
                                "attachments: Collection<Integer>): void");
    CHECK(error_of([] { render_docs(FunctionTable{}); }) == TableErrorKind::EmptyTable);
}

TEST_CASE("doc lines must agree with the signature") {
    FunctionEntry e = entry("function play_voice(text: String): void");
    e.doc = "function play_voice(words: String): void";
    CHECK(error_of([&] { FunctionTable().add(e); }) == TableErrorKind::InvalidSignature);
}

TEST_CASE("signatures round-trip through their rendering") {
    auto stub = default_stub_table();
    for (const auto& e : stub.entries()) {
        CHECK(parse_signature(e.signature.to_string()) == e.signature);
        CHECK(parse_signature(e.doc) == e.signature);
    }
    CHECK(stub.size() == 9);
}

TEST_CASE("invoke returns canned values and traces once") {
    auto t = default_stub_table();
    auto consent = ConsentPolicy::auto_deny();
    Recorder rec;

    std::vector<Value> args{"insurance company"};
    CHECK(t.invoke("find_contact_id", args, consent, rec.sink()) == Value(1));
    REQUIRE(rec.events.size() == 1);
    CHECK(rec.events[0].rendered == R"(Execute "find_contact_id" and arguments "insurance company")");

    std::vector<Value> id{1};
    CHECK(t.invoke("find_contact_email", id, consent, rec.sink()) == Value("john.doe@example.com"));
    std::vector<Value> title{"car title"};
    CHECK(t.invoke("find_file_id", title, consent, rec.sink()) == Value(1));
    std::vector<Value> hi{"hi"};
    CHECK(t.invoke("play_voice", hi, consent, rec.sink()).is_null());
    CHECK(rec.events.size() == 4);
}

TEST_CASE("failed invocations emit no trace") {
    auto t = default_stub_table();
    auto consent = ConsentPolicy::auto_deny();
    Recorder rec;
    std::vector<Value> none;
    std::vector<Value> ls{"ls"};
    std::vector<Value> num{5};
    std::vector<Value> two{"a", "b"};

    CHECK(error_of([&] { t.invoke("no_such_fn", none, consent, rec.sink()); }) ==
          TableErrorKind::UnknownFunction);
    CHECK(error_of([&] { t.invoke("shell", ls, consent, rec.sink()); }) ==
          TableErrorKind::PrivilegedDenied);
    CHECK(error_of([&] { t.invoke("print_screen", num, consent, rec.sink()); }) ==
          TableErrorKind::TypeMismatch);
    CHECK(error_of([&] { t.invoke("print_screen", two, consent, rec.sink()); }) ==
          TableErrorKind::ArityMismatch);
    CHECK(rec.events.empty());
}

TEST_CASE("unknown names fail for any argument list") {
    auto t = default_stub_table();
    auto consent = ConsentPolicy::auto_allow();
    for (auto args : {std::vector<Value>{}, std::vector<Value>{1}, std::vector<Value>{"x", Value::List{}}})
        CHECK(error_of([&] { t.invoke("open", args, consent, {}); }) == TableErrorKind::UnknownFunction);
}

TEST_CASE("shell runs its stub once consent is given") {
    auto t = default_stub_table({.ask_question = "", .shell = "Desktop Documents"});
    std::vector<Value> ls{"ls"};

    auto allow = ConsentPolicy::auto_allow();
    CHECK(t.invoke("shell", ls, allow, {}) == Value("Desktop Documents"));

    int asked = 0;
    auto ask = ConsentPolicy::interactive([&](const FunctionSignature& sig, std::span<const Value>) {
        ++asked;
        CHECK(sig.name == "shell");
        return true;
    });
    t.invoke("shell", ls, ask, {});
    t.invoke("shell", ls, ask, {});
    CHECK(asked == 1);

    auto refuse = ConsentPolicy::interactive([](auto&, auto) { return false; });
    CHECK(error_of([&] { t.invoke("shell", ls, refuse, {}); }) == TableErrorKind::PrivilegedDenied);
}

TEST_CASE("type checks are shallow and structural") {
    CHECK(value_matches(TypeExpr::plain(BaseType::File), Value(3)));
    CHECK_FALSE(value_matches(TypeExpr::plain(BaseType::File), Value("a.mp3")));
    CHECK(value_matches(TypeExpr::nullable(BaseType::String), Value()));
    CHECK_FALSE(value_matches(TypeExpr::plain(BaseType::String), Value()));
    CHECK(value_matches(TypeExpr::collection(BaseType::Integer), Value(Value::List{1, 2})));
    CHECK(value_matches(TypeExpr::collection(BaseType::Integer), Value(Value::List{})));
    CHECK_FALSE(value_matches(TypeExpr::collection(BaseType::Integer), Value(Value::List{"x"})));
    CHECK_FALSE(value_matches(TypeExpr::plain(BaseType::Integer), Value(true)));
}

TEST_CASE("trace rendering") {
    CHECK(make_trace_event("print_screen", {}).rendered == R"(Execute "print_screen" and arguments )");
    CHECK(make_trace_event("f", {Value::List{1, "a", Value()}, true}).rendered ==
          R"(Execute "f" and arguments "[1, "a", None]", "True")");
    CHECK(render_value(Value(Value::List{Value::List{"x"}})) == R"([["x"]])");
}

TEST_CASE("table files") {
    auto t = parse_table_text("# custom\n\nfunction greet(name: String): String\n"
                              "privileged function wipe(path: String): void\n");
    REQUIRE(t.size() == 2);
    CHECK_FALSE(t.entries()[0].privileged);
    CHECK(t.entries()[1].privileged);
    auto consent = ConsentPolicy::auto_allow();
    std::vector<Value> bob{"bob"};
    CHECK(t.invoke("greet", bob, consent, {}) == Value(""));
    CHECK(stub_reply(TypeExpr::collection(BaseType::String)) == Value(Value::List{}));
    CHECK(error_of([] { parse_table_text("function a(): void\nfunction a(): void"); }) ==
          TableErrorKind::DuplicateName);
}

TEST_CASE("consent mode names") {
    CHECK(parse_consent_mode("auto-allow") == ConsentMode::AutoAllow);
    CHECK(parse_consent_mode("auto-deny") == ConsentMode::AutoDeny);
    CHECK(parse_consent_mode("interactive") == ConsentMode::Interactive);
    CHECK_THROWS(parse_consent_mode("yes"));
}
