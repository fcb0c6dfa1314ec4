#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intent {

/// Base of every rejection raised while reading script source.
/// `line` and `col` are 1-based and always point into the offending line.
class ScriptError : public std::runtime_error {
public:
    ScriptError(const std::string& what, int line, int col)
        : std::runtime_error(what), line_(line), col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

class LexError : public ScriptError {
public:
    LexError(int line, int col, const std::string& reason)
        : ScriptError("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + reason,
                      line, col),
          reason_(reason) {}

    const std::string& reason() const { return reason_; }

private:
    std::string reason_;
};

class SyntaxError : public ScriptError {
public:
    SyntaxError(int line, int col, const std::string& expectation)
        : ScriptError("line " + std::to_string(line) + ":" + std::to_string(col) + ": " +
                          expectation,
                      line, col),
          expectation_(expectation) {}

    const std::string& expectation() const { return expectation_; }

private:
    std::string expectation_;
};

/// A recognised construct that falls outside the supported script subset.
class UnsupportedConstruct : public ScriptError {
public:
    UnsupportedConstruct(std::string name, int line, int col)
        : ScriptError("line " + std::to_string(line) + ": unsupported construct '" + name + "'",
                      line, col),
          name_(std::move(name)) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

enum class TokenKind { Ident, Int, String, FString, Keyword, Op, Newline, Indent, Dedent, Eof };

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    // Decoded value for String tokens; the raw body between the quotes for
    // FString tokens; the lexeme otherwise.
    std::string text;
    int line = 1;
    int col = 1;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_op(std::string_view t) const { return is(TokenKind::Op, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }

    friend bool operator==(const Token&, const Token&) = default;
};

bool is_keyword(std::string_view word);

/// Resolves `\\`, `\'`, `\"`, `\n`, `\t`, `\r` and backslash-newline.
/// Unknown escapes keep their backslash.
std::string decode_escapes(std::string_view raw);

/// Given the raw body of an f-string and the index of a `{` that opens a
/// replacement field, returns the index just past its closing `}`, or npos.
std::size_t fstring_field_end(std::string_view body, std::size_t open);

/// Splits source into tokens, synthesising NEWLINE, INDENT and DEDENT from
/// line structure. Newlines inside brackets and after a trailing backslash
/// are joined. Throws LexError.
std::vector<Token> tokenize(std::string_view source);

} // namespace intent
