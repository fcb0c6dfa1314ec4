#include "intent/lexer.hpp"

#include <array>
#include <charconv>
#include <cstdint>

namespace intent {

std::string_view to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::Ident: return "IDENT";
    case TokenKind::Int: return "INT";
    case TokenKind::String: return "STRING";
    case TokenKind::FString: return "FSTRING";
    case TokenKind::Keyword: return "KEYWORD";
    case TokenKind::Op: return "OP";
    case TokenKind::Newline: return "NEWLINE";
    case TokenKind::Indent: return "INDENT";
    case TokenKind::Dedent: return "DEDENT";
    case TokenKind::Eof: return "EOF";
    }
    return "?";
}

namespace {

constexpr std::array kKeywords = {
    "if",     "elif",  "else",   "while",    "for",    "break",  "continue", "pass",
    "import", "from",  "as",     "not",      "and",    "or",     "None",     "True",
    "False",  "def",   "class",  "try",      "except", "finally", "with",    "lambda",
    "return", "yield", "global", "nonlocal", "del",    "assert", "raise",    "async",
    "await",
};

// Longest first within each group.
constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", "...", "<<=", ">>="};
constexpr std::array<std::string_view, 19> kOps2 = {"==", "!=", "<=", ">=", "+=", "-=", "*=",
                                                    "/=", "%=", "//", "**", "->", ":=", "<<",
                                                    ">>", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%<>=()[]{},:.;@&|^~";

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        bool at_line_start = true;
        while (true) {
            if (at_line_start && depth_ == 0) {
                if (!read_indentation())
                    continue;
                at_line_start = false;
            }
            if (pos_ >= src_.size())
                break;
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
                ++pos_;
            } else if (c == '#') {
                skip_comment();
            } else if (c == '\n') {
                if (depth_ == 0) {
                    if (line_has_tokens_)
                        emit(TokenKind::Newline, "", line_, col());
                    line_has_tokens_ = false;
                    at_line_start = true;
                }
                advance_newline();
            } else if (c == '\\') {
                lex_continuation();
            } else if (ident_start(c)) {
                lex_word();
            } else if (digit(c)) {
                lex_number();
            } else if (c == '"' || c == '\'') {
                lex_string(false, pos_);
            } else {
                lex_op();
            }
        }
        if (line_has_tokens_)
            emit(TokenKind::Newline, "", last_line_, last_end_col_);
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(TokenKind::Dedent, "", last_line_, last_end_col_);
        }
        emit(TokenKind::Eof, "", last_line_, last_end_col_);
        return std::move(out_);
    }

private:
    int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

    void emit(TokenKind kind, std::string text, int line, int col) {
        out_.push_back({kind, std::move(text), line, col});
    }

    // Emits a content token that ends at the current position.
    void emit_content(TokenKind kind, std::string text, int line, int col) {
        emit(kind, std::move(text), line, col);
        line_has_tokens_ = true;
        last_line_ = line_;
        last_end_col_ = this->col();
    }

    void advance_newline() {
        ++pos_;
        ++line_;
        line_start_ = pos_;
    }

    void skip_comment() {
        while (pos_ < src_.size() && src_[pos_] != '\n')
            ++pos_;
    }

    // Returns false when the line is blank or comment-only and was consumed.
    bool read_indentation() {
        std::size_t start = pos_;
        bool spaces = false;
        bool tabs = false;
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\f')) {
            if (src_[pos_] == ' ')
                spaces = true;
            else if (src_[pos_] == '\t')
                tabs = true;
            ++pos_;
        }
        while (pos_ < src_.size() && src_[pos_] == '\r')
            ++pos_;
        if (pos_ >= src_.size())
            return true;
        if (src_[pos_] == '\n') {
            advance_newline();
            return false;
        }
        if (src_[pos_] == '#') {
            skip_comment();
            return false;
        }
        if (spaces && tabs)
            throw LexError(line_, 1, "tabs mixed with spaces in indentation");

        std::string indent(src_.substr(start, pos_ - start));
        std::erase(indent, '\f');
        int here = col();
        if (indent == indents_.back())
            return true;
        if (indent.size() > indents_.back().size() && indent.starts_with(indents_.back())) {
            indents_.push_back(indent);
            emit(TokenKind::Indent, "", line_, here);
            return true;
        }
        while (indents_.size() > 1 && indents_.back().size() > indent.size()) {
            indents_.pop_back();
            emit(TokenKind::Dedent, "", line_, here);
        }
        if (indents_.back() != indent)
            throw LexError(line_, here, "inconsistent indentation: no matching outer level");
        return true;
    }

    void lex_continuation() {
        std::size_t next = pos_ + 1;
        while (next < src_.size() && src_[next] == '\r')
            ++next;
        if (next >= src_.size() || src_[next] != '\n')
            throw LexError(line_, col(), "unexpected character '\\'");
        pos_ = next;
        advance_newline();
    }

    void lex_word() {
        int start_col = col();
        std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_]))
            ++pos_;
        std::string_view word = src_.substr(start, pos_ - start);
        if ((word == "f" || word == "F") && pos_ < src_.size() &&
            (src_[pos_] == '"' || src_[pos_] == '\'')) {
            lex_string(true, start);
            return;
        }
        TokenKind kind = TokenKind::Ident;
        if (word == "is" || word == "in")
            kind = TokenKind::Op;
        else if (is_keyword(word))
            kind = TokenKind::Keyword;
        emit_content(kind, std::string(word), line_, start_col);
    }

    void lex_number() {
        int start_col = col();
        std::size_t start = pos_;
        while (pos_ < src_.size() && digit(src_[pos_]))
            ++pos_;
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && digit(src_[pos_ + 1]))
            throw LexError(line_, start_col, "floating-point literals are not supported");
        if (pos_ < src_.size() && ident_char(src_[pos_]))
            throw LexError(line_, start_col, "invalid number literal");
        std::string_view digits = src_.substr(start, pos_ - start);
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc{})
            throw LexError(line_, start_col, "integer literal out of range");
        emit_content(TokenKind::Int, std::to_string(value), line_, start_col);
    }

    // `prefix_pos` is where the token starts (the `f` for f-strings).
    void lex_string(bool is_f, std::size_t prefix_pos) {
        int start_line = line_;
        int start_col = static_cast<int>(prefix_pos - line_start_) + 1;
        auto [body_start, body_end] = scan_string(is_f, start_line, start_col);
        std::string_view body = src_.substr(body_start, body_end - body_start);
        if (is_f)
            emit_content(TokenKind::FString, std::string(body), start_line, start_col);
        else
            emit_content(TokenKind::String, decode_escapes(body), start_line, start_col);
    }

    // pos_ is at the opening quote. Leaves pos_ after the closing quote and
    // returns the body bounds.
    std::pair<std::size_t, std::size_t> scan_string(bool is_f, int start_line, int start_col) {
        char q = src_[pos_];
        bool triple = src_.substr(pos_, 3) == std::string(3, q);
        pos_ += triple ? 3 : 1;
        std::size_t body_start = pos_;
        auto unterminated = [&] {
            throw LexError(start_line, start_col, "unterminated string literal");
        };
        while (true) {
            if (pos_ >= src_.size())
                unterminated();
            char c = src_[pos_];
            if (c == '\\') {
                if (pos_ + 1 >= src_.size())
                    unterminated();
                if (src_[pos_ + 1] == '\n') {
                    ++pos_;
                    advance_newline();
                } else {
                    pos_ += 2;
                }
            } else if (c == '\n') {
                if (!triple)
                    unterminated();
                advance_newline();
            } else if (triple ? src_.substr(pos_, 3) == std::string(3, q) : c == q) {
                std::size_t body_end = pos_;
                pos_ += triple ? 3 : 1;
                return {body_start, body_end};
            } else if (is_f && c == '{') {
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '{')
                    pos_ += 2;
                else
                    scan_replacement_field(triple, start_line, start_col);
            } else {
                ++pos_;
            }
        }
    }

    void scan_replacement_field(bool triple, int start_line, int start_col) {
        if (++nesting_ > kMaxNesting)
            throw LexError(start_line, start_col, "f-string nesting too deep");
        int depth = 0;
        while (true) {
            if (pos_ >= src_.size())
                throw LexError(start_line, start_col, "unterminated string literal");
            char c = src_[pos_];
            if (c == '{' || c == '(' || c == '[') {
                ++depth;
                ++pos_;
            } else if (c == '}' || c == ')' || c == ']') {
                --depth;
                ++pos_;
                if (depth <= 0 && c == '}')
                    break;
            } else if (c == '"' || c == '\'') {
                bool nested_f = pos_ > 0 && (src_[pos_ - 1] == 'f' || src_[pos_ - 1] == 'F') &&
                                (pos_ < 2 || !ident_char(src_[pos_ - 2]));
                scan_string(nested_f, start_line, start_col);
            } else if (c == '\n') {
                if (!triple)
                    throw LexError(start_line, start_col, "unterminated string literal");
                advance_newline();
            } else {
                ++pos_;
            }
        }
        --nesting_;
    }

    void lex_op() {
        int start_col = col();
        std::string_view rest = src_.substr(pos_);
        for (auto op : kOps3) {
            if (rest.starts_with(op)) {
                pos_ += 3;
                emit_content(TokenKind::Op, std::string(op), line_, start_col);
                return;
            }
        }
        for (auto op : kOps2) {
            if (rest.starts_with(op)) {
                pos_ += 2;
                emit_content(TokenKind::Op, std::string(op), line_, start_col);
                return;
            }
        }
        char c = src_[pos_];
        if (kOps1.find(c) == std::string_view::npos) {
            std::string shown = (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7f)
                                    ? std::string(1, c)
                                    : "\\x" + std::to_string(static_cast<unsigned char>(c));
            throw LexError(line_, start_col, "unexpected character '" + shown + "'");
        }
        if (c == '(' || c == '[' || c == '{')
            ++depth_;
        else if ((c == ')' || c == ']' || c == '}') && depth_ > 0)
            --depth_;
        ++pos_;
        emit_content(TokenKind::Op, std::string(1, c), line_, start_col);
    }

    static constexpr int kMaxNesting = 64;

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::size_t line_start_ = 0;
    int depth_ = 0;
    int nesting_ = 0;
    bool line_has_tokens_ = false;
    int last_line_ = 1;
    int last_end_col_ = 1;
    std::vector<std::string> indents_{""};
    std::vector<Token> out_;
};

} // namespace

bool is_keyword(std::string_view word) {
    for (std::string_view k : kKeywords) {
        if (k == word)
            return true;
    }
    return false;
}

std::string decode_escapes(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c != '\\' || i + 1 >= raw.size()) {
            out += c;
            continue;
        }
        char e = raw[++i];
        switch (e) {
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '\n': break;
        default:
            out += '\\';
            out += e;
        }
    }
    return out;
}

namespace {

std::size_t skip_quoted(std::string_view s, std::size_t pos, bool is_f) {
    char q = s[pos];
    std::string quote3(3, q);
    bool triple = s.substr(pos, 3) == quote3;
    pos += triple ? 3 : 1;
    while (pos < s.size()) {
        char c = s[pos];
        if (c == '\\') {
            pos += 2;
        } else if (triple ? s.substr(pos, 3) == quote3 : c == q) {
            return pos + (triple ? 3 : 1);
        } else if (is_f && c == '{') {
            if (pos + 1 < s.size() && s[pos + 1] == '{')
                pos += 2;
            else if ((pos = fstring_field_end(s, pos)) == std::string_view::npos)
                return pos;
        } else {
            ++pos;
        }
    }
    return std::string_view::npos;
}

} // namespace

std::size_t fstring_field_end(std::string_view s, std::size_t pos) {
    int depth = 0;
    while (pos < s.size()) {
        char c = s[pos];
        if (c == '{' || c == '(' || c == '[') {
            ++depth;
            ++pos;
        } else if (c == '}' || c == ')' || c == ']') {
            --depth;
            ++pos;
            if (depth <= 0 && c == '}')
                return pos;
        } else if (c == '"' || c == '\'') {
            bool nested_f = pos > 0 && (s[pos - 1] == 'f' || s[pos - 1] == 'F') &&
                            (pos < 2 || !ident_char(s[pos - 2]));
            if ((pos = skip_quoted(s, pos, nested_f)) == std::string_view::npos)
                return pos;
        } else {
            ++pos;
        }
    }
    return std::string_view::npos;
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

} // namespace intent
