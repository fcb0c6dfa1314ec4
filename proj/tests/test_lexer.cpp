#include "intent/lexer.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace intent;

namespace {

std::string shape(std::string_view source) {
    std::string out;
    for (const auto& t : tokenize(source)) {
        if (!out.empty())
            out += ' ';
        out += to_string(t.kind);
        bool has_text = t.kind != TokenKind::Newline && t.kind != TokenKind::Indent &&
                        t.kind != TokenKind::Dedent && t.kind != TokenKind::Eof;
        if (has_text)
            out += "(" + t.text + ")";
    }
    return out;
}

LexError lex_error(std::string_view source) {
    try {
        tokenize(source);
    } catch (const LexError& e) {
        return e;
    }
    FAIL("expected LexError for: " << source);
    return LexError(0, 0, "");
}

} // namespace

TEST_CASE("minimal statement") {
    CHECK(shape("x = 1") == "IDENT(x) OP(=) INT(1) NEWLINE EOF");
    CHECK(shape("x = 1\n") == "IDENT(x) OP(=) INT(1) NEWLINE EOF");
}

TEST_CASE("none test in an if header") {
    CHECK(shape("if contact_id is not None:\n    pass\n") ==
          "KEYWORD(if) IDENT(contact_id) OP(is) KEYWORD(not) KEYWORD(None) OP(:) NEWLINE "
          "INDENT KEYWORD(pass) NEWLINE DEDENT EOF");
}

TEST_CASE("positions are one-based") {
    auto toks = tokenize("a = 1\nif a:\n    b = \"x\"\n");
    CHECK(toks[0].line == 1);
    CHECK(toks[0].col == 1);
    auto b = std::ranges::find_if(toks, [](const Token& t) { return t.text == "b"; });
    REQUIRE(b != toks.end());
    CHECK(b->line == 3);
    CHECK(b->col == 5);
}

TEST_CASE("comments and blank lines produce nothing") {
    CHECK(shape("# hello\n\n   \nx = 1  # trailing\n\n# end") == "IDENT(x) OP(=) INT(1) NEWLINE EOF");
    CHECK(shape("") == "EOF");
}

TEST_CASE("whitespace-only lines inside blocks are ignored") {
    CHECK(shape("if a:\n    b = 1\n    \n        \n    c = 2\n") ==
          "KEYWORD(if) IDENT(a) OP(:) NEWLINE INDENT IDENT(b) OP(=) INT(1) NEWLINE "
          "IDENT(c) OP(=) INT(2) NEWLINE DEDENT EOF");
}

TEST_CASE("string escapes and quoting") {
    auto toks = tokenize(R"(s = "a\"b\\c\n\t" + 'it\'s')");
    CHECK(toks[2].kind == TokenKind::String);
    CHECK(toks[2].text == "a\"b\\c\n\t");
    CHECK(toks[4].text == "it's");
    CHECK(tokenize(R"x("""multi
line""")x")[0].text == "multi\nline");
}

TEST_CASE("f-strings keep their raw body") {
    auto toks = tokenize(R"(f"Hi {name}!" + f'{a["k"]}')");
    CHECK(toks[0].kind == TokenKind::FString);
    CHECK(toks[0].text == "Hi {name}!");
    CHECK(toks[2].kind == TokenKind::FString);
    CHECK(toks[2].text == R"({a["k"]})");
}

TEST_CASE("brackets join lines") {
    CHECK(shape("f(1,\n  2)\n") == "IDENT(f) OP(() INT(1) OP(,) INT(2) OP()) NEWLINE EOF");
    CHECK(shape("x = [\n1,\n]") == "IDENT(x) OP(=) OP([) INT(1) OP(,) OP(]) NEWLINE EOF");
}

TEST_CASE("nested blocks close with balanced dedents") {
    auto toks = tokenize("if a:\n    if b:\n        c()\nd()\n");
    auto indents = std::ranges::count_if(toks, [](auto& t) { return t.kind == TokenKind::Indent; });
    auto dedents = std::ranges::count_if(toks, [](auto& t) { return t.kind == TokenKind::Dedent; });
    CHECK(indents == 2);
    CHECK(dedents == 2);
}

TEST_CASE("lexical errors") {
    auto e = lex_error("x = \"unterminated");
    CHECK(e.line() == 1);
    CHECK(e.col() == 5);

    e = lex_error("if a:\n        b = 1\n    c = 2\n");
    CHECK(e.line() == 3);

    e = lex_error("if a:\n\t b = 1\n");
    CHECK(e.line() == 2);
    CHECK(e.col() == 1);

    e = lex_error("if a:\n    if b:\n    \tc = 2\n");
    CHECK(e.line() == 3);

    CHECK(lex_error("x = 1.5").line() == 1);
    CHECK(lex_error("x = 12abc").col() == 5);
    CHECK(lex_error("x = 99999999999999999999").line() == 1);
    CHECK(lex_error("x = $").col() == 5);
    CHECK(lex_error("x = 'a\ny'").line() == 1);
}

TEST_CASE("keyword classification") {
    CHECK(is_keyword("if"));
    CHECK(is_keyword("None"));
    CHECK(is_keyword("def"));
    CHECK_FALSE(is_keyword("print_screen"));
    CHECK(shape("while True: break") ==
          "KEYWORD(while) KEYWORD(True) OP(:) KEYWORD(break) NEWLINE EOF");
}

TEST_CASE("the golden program lexes") {
    auto toks = tokenize(testing::golden_code());
    CHECK(toks.back().kind == TokenKind::Eof);
    auto indents = std::ranges::count_if(toks, [](auto& t) { return t.kind == TokenKind::Indent; });
    CHECK(indents == 5);
}
