#include "intent/parser.hpp"

#include <charconv>

namespace intent {

std::string_view to_string(UnaryOp op) {
    switch (op) {
    case UnaryOp::Not: return "not";
    case UnaryOp::Neg: return "-";
    }
    return "?";
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    case BinaryOp::In: return "in";
    case BinaryOp::IsNull: return "is None";
    case BinaryOp::IsNotNull: return "is not None";
    }
    return "?";
}

namespace {

constexpr int kMaxDepth = 100;

Expr make_binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr{ast::Binary{op, std::move(lhs), std::move(rhs)}};
}

Expr make_unary(UnaryOp op, Expr operand) { return Expr{ast::Unary{op, std::move(operand)}}; }

class Parser {
public:
    Parser(std::span<const Token> tokens, int depth = 0) : toks_(tokens), depth_(depth) {
        if (toks_.empty() || toks_.back().kind != TokenKind::Eof)
            throw SyntaxError(1, 1, "token stream must end with EOF");
    }

    Program program() {
        Program p;
        while (peek().kind != TokenKind::Eof)
            statement(p.statements);
        return p;
    }

    // Parses `( expr )` followed by NEWLINE EOF, as produced for f-string fields.
    Expr wrapped_expression() {
        expect_op("(", "'('");
        if (peek().is_op(")"))
            fail(peek(), "empty expression in f-string");
        Expr e = expression();
        expect_op(")", "')'");
        expect(TokenKind::Newline, "end of f-string expression");
        expect(TokenKind::Eof, "end of f-string expression");
        return e;
    }

private:
    struct DepthGuard {
        Parser& p;
        DepthGuard(Parser& parser, const Token& at) : p(parser) {
            if (++p.depth_ > kMaxDepth)
                p.fail(at, "nesting too deep");
        }
        ~DepthGuard() { --p.depth_; }
    };

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[k];
    }

    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size())
            ++pos_;
        return t;
    }

    [[noreturn]] void fail(const Token& at, const std::string& expectation) const {
        throw SyntaxError(at.line, at.col, expectation);
    }

    [[noreturn]] void unsupported(const std::string& name, const Token& at) const {
        throw UnsupportedConstruct(name, at.line, at.col);
    }

    const Token& expect(TokenKind kind, const std::string& what) {
        if (peek().kind != kind)
            fail(peek(), "expected " + what);
        return next();
    }

    const Token& expect_op(std::string_view op, const std::string& what) {
        if (!peek().is_op(op))
            fail(peek(), "expected " + what);
        return next();
    }

    bool accept_op(std::string_view op) {
        if (!peek().is_op(op))
            return false;
        next();
        return true;
    }

    // ---- statements ----

    void statement(Block& out) {
        const Token& t = peek();
        if (t.kind == TokenKind::Indent)
            fail(t, "unexpected indent");
        if (t.kind == TokenKind::Dedent)
            fail(t, "unexpected dedent");
        if (t.kind == TokenKind::Keyword) {
            if (t.text == "if")
                return if_statement(out);
            if (t.text == "while")
                return while_statement(out);
            if (t.text == "for")
                return for_statement(out);
            if (t.text == "elif" || t.text == "else")
                fail(t, "'" + t.text + "' without a matching 'if'");
            if (t.text == "except" || t.text == "finally")
                unsupported("try", t);
        }
        simple_line(out);
    }

    void simple_line(Block& out) {
        simple_statement(out);
        if (peek().is_op(";"))
            unsupported(";", peek());
        expect(TokenKind::Newline, "end of statement");
    }

    void simple_statement(Block& out) {
        const Token& t = peek();
        int line = t.line;
        if (t.kind == TokenKind::Keyword) {
            if (t.text == "pass") {
                next();
                out.push_back({ast::Pass{}, line});
                return;
            }
            if (t.text == "break" || t.text == "continue") {
                if (loop_depth_ == 0)
                    fail(t, "'" + t.text + "' outside loop");
                next();
                if (t.text == "break")
                    out.push_back({ast::Break{}, line});
                else
                    out.push_back({ast::Continue{}, line});
                return;
            }
            if (t.text == "import")
                return import_statement(out);
            if (t.text == "from")
                return from_import_statement(out);
            static constexpr std::string_view rejected[] = {
                "def",    "class",  "try",    "with",  "lambda", "return", "yield",
                "global", "nonlocal", "del",  "assert", "raise", "async",  "await"};
            for (auto r : rejected) {
                if (t.text == r)
                    unsupported(t.text, t);
            }
        }
        assignment_or_expression(out);
    }

    std::string dotted_name() {
        std::string name = expect(TokenKind::Ident, "module name").text;
        while (peek().is_op(".")) {
            next();
            name += "." + expect(TokenKind::Ident, "module name").text;
        }
        return name;
    }

    void import_statement(Block& out) {
        int line = next().line;
        do {
            out.push_back({ast::Import{dotted_name()}, line});
            if (peek().is_keyword("as")) {
                next();
                expect(TokenKind::Ident, "alias name");
            }
        } while (accept_op(","));
    }

    void from_import_statement(Block& out) {
        int line = next().line;
        std::string module;
        while (peek().is_op(".") || peek().is_op("...")) {
            module += next().text;
        }
        if (peek().kind == TokenKind::Ident)
            module += dotted_name();
        if (module.empty())
            fail(peek(), "module name");
        if (!peek().is_keyword("import"))
            fail(peek(), "expected 'import'");
        next();
        if (accept_op("*")) {
            out.push_back({ast::Import{module}, line});
            return;
        }
        bool paren = accept_op("(");
        do {
            if (paren && peek().is_op(")"))
                break;
            expect(TokenKind::Ident, "imported name");
            if (peek().is_keyword("as")) {
                next();
                expect(TokenKind::Ident, "alias name");
            }
        } while (accept_op(","));
        if (paren)
            expect_op(")", "')'");
        out.push_back({ast::Import{module}, line});
    }

    void assignment_or_expression(Block& out) {
        const Token& start = peek();
        int line = start.line;
        Expr lhs = expression();
        const Token& t = peek();
        if (t.is_op(","))
            unsupported("tuple", t);
        if (t.is_op(":"))
            unsupported("annotated assignment", t);
        if (t.is_op(":="))
            unsupported(":=", t);
        if (t.is_op("=") || t.is_op("+=")) {
            AssignOp op = t.text == "=" ? AssignOp::Set : AssignOp::Add;
            std::string target = assign_target(lhs, start);
            next();
            Expr value = expression();
            if (peek().is_op("="))
                unsupported("chained assignment", peek());
            if (peek().is_op(","))
                unsupported("tuple", peek());
            out.push_back({ast::Assign{std::move(target), op, std::move(value)}, line});
            return;
        }
        if (t.kind == TokenKind::Op && t.text.size() >= 2 && t.text.back() == '=' &&
            t.text != "==" && t.text != "!=" && t.text != "<=" && t.text != ">=")
            unsupported("augmented assignment " + t.text, t);
        out.push_back({ast::ExprStmt{std::move(lhs)}, line});
    }

    std::string assign_target(const Expr& lhs, const Token& at) const {
        if (auto n = lhs.as<ast::Name>())
            return n->id;
        if (lhs.as<ast::Index>())
            unsupported("subscript assignment", at);
        fail(at, "cannot assign to expression");
    }

    Block suite(bool in_loop) {
        const Token& colon = peek();
        expect_op(":", "':'");
        DepthGuard guard(*this, colon);
        if (in_loop)
            ++loop_depth_;
        Block body;
        if (peek().kind == TokenKind::Newline) {
            next();
            expect(TokenKind::Indent, "an indented block");
            while (peek().kind != TokenKind::Dedent) {
                if (peek().kind == TokenKind::Eof)
                    fail(peek(), "end of block");
                statement(body);
            }
            next();
        } else {
            simple_line(body);
        }
        if (in_loop)
            --loop_depth_;
        return body;
    }

    void if_statement(Block& out) {
        int line = next().line;
        ast::If node;
        Expr cond = expression();
        node.arms.push_back({std::move(cond), suite(false)});
        while (peek().is_keyword("elif")) {
            next();
            Expr c = expression();
            node.arms.push_back({std::move(c), suite(false)});
        }
        if (peek().is_keyword("else")) {
            next();
            node.else_body = suite(false);
        }
        out.push_back({std::move(node), line});
    }

    void while_statement(Block& out) {
        int line = next().line;
        Expr cond = expression();
        Block body = suite(true);
        if (peek().is_keyword("else"))
            unsupported("loop else", peek());
        out.push_back({ast::While{std::move(cond), std::move(body)}, line});
    }

    void for_statement(Block& out) {
        int line = next().line;
        std::string var = expect(TokenKind::Ident, "loop variable").text;
        if (peek().is_op(","))
            unsupported("tuple unpacking", peek());
        expect_op("in", "'in'");
        Expr iterable = expression();
        if (peek().is_op(","))
            unsupported("tuple", peek());
        Block body = suite(true);
        if (peek().is_keyword("else"))
            unsupported("loop else", peek());
        out.push_back({ast::For{std::move(var), std::move(iterable), std::move(body)}, line});
    }

    // ---- expressions ----

    Expr expression() {
        DepthGuard guard(*this, peek());
        Expr e = or_expr();
        if (peek().is_keyword("if"))
            unsupported("conditional expression", peek());
        return e;
    }

    Expr or_expr() {
        Expr lhs = and_expr();
        while (peek().is_keyword("or")) {
            next();
            lhs = make_binary(BinaryOp::Or, std::move(lhs), and_expr());
        }
        return lhs;
    }

    Expr and_expr() {
        Expr lhs = not_expr();
        while (peek().is_keyword("and")) {
            next();
            lhs = make_binary(BinaryOp::And, std::move(lhs), not_expr());
        }
        return lhs;
    }

    Expr not_expr() {
        if (peek().is_keyword("not")) {
            DepthGuard guard(*this, peek());
            next();
            return make_unary(UnaryOp::Not, not_expr());
        }
        return comparison();
    }

    bool at_comparison() const {
        const Token& t = peek();
        if (t.kind == TokenKind::Op) {
            return t.text == "==" || t.text == "!=" || t.text == "<" || t.text == "<=" ||
                   t.text == ">" || t.text == ">=" || t.text == "in" || t.text == "is";
        }
        return t.is_keyword("not") && peek(1).is_op("in");
    }

    Expr comparison() {
        Expr lhs = additive();
        if (!at_comparison())
            return lhs;
        const Token& t = next();
        Expr result;
        if (t.is_keyword("not")) {
            next();
            result = make_unary(UnaryOp::Not, make_binary(BinaryOp::In, std::move(lhs), additive()));
        } else if (t.text == "is") {
            bool negated = false;
            if (peek().is_keyword("not")) {
                next();
                negated = true;
            }
            if (!peek().is_keyword("None"))
                unsupported("is", t);
            next();
            result = make_binary(negated ? BinaryOp::IsNotNull : BinaryOp::IsNull, std::move(lhs),
                                 Expr{ast::NullLit{}});
        } else {
            BinaryOp op = t.text == "==" ? BinaryOp::Eq
                        : t.text == "!=" ? BinaryOp::Ne
                        : t.text == "<"  ? BinaryOp::Lt
                        : t.text == "<=" ? BinaryOp::Le
                        : t.text == ">"  ? BinaryOp::Gt
                        : t.text == ">=" ? BinaryOp::Ge
                                         : BinaryOp::In;
            result = make_binary(op, std::move(lhs), additive());
        }
        if (at_comparison())
            unsupported("chained comparison", peek());
        return result;
    }

    Expr additive() {
        Expr lhs = multiplicative();
        while (peek().is_op("+") || peek().is_op("-")) {
            BinaryOp op = next().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = make_binary(op, std::move(lhs), multiplicative());
        }
        return lhs;
    }

    Expr multiplicative() {
        Expr lhs = unary();
        while (true) {
            const Token& t = peek();
            if (t.is_op("%") || t.is_op("//") || t.is_op("@") || t.is_op("<<") ||
                t.is_op(">>") || t.is_op("&") || t.is_op("|") || t.is_op("^"))
                unsupported(t.text, t);
            if (!t.is_op("*") && !t.is_op("/"))
                break;
            BinaryOp op = next().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
            lhs = make_binary(op, std::move(lhs), unary());
        }
        return lhs;
    }

    Expr unary() {
        const Token& t = peek();
        if (t.is_op("-")) {
            DepthGuard guard(*this, t);
            next();
            return make_unary(UnaryOp::Neg, unary());
        }
        if (t.is_op("+"))
            unsupported("unary +", t);
        if (t.is_op("~"))
            unsupported("~", t);
        Expr e = postfix();
        if (peek().is_op("**"))
            unsupported("**", peek());
        return e;
    }

    std::vector<Expr> call_arguments() {
        expect_op("(", "'('");
        std::vector<Expr> args;
        while (!peek().is_op(")")) {
            const Token& t = peek();
            if (t.is_op("*") || t.is_op("**"))
                unsupported("star argument", t);
            if (t.kind == TokenKind::Ident && peek(1).is_op("="))
                unsupported("keyword argument", t);
            args.push_back(expression());
            if (peek().is_keyword("for"))
                unsupported("comprehension", peek());
            if (!accept_op(","))
                break;
        }
        expect_op(")", "')' or ','");
        return args;
    }

    Expr postfix() {
        Expr e = primary();
        int chain = 0;
        while (true) {
            const Token& t = peek();
            if (!t.is_op("(") && !t.is_op("[") && !t.is_op("."))
                break;
            if (++chain > kMaxDepth)
                fail(t, "expression too deeply nested");
            if (t.is_op("(")) {
                auto name = e.as<ast::Name>();
                if (!name)
                    unsupported("call of a non-name expression", t);
                std::string callee = name->id;
                e = Expr{ast::Call{std::move(callee), call_arguments()}};
            } else if (t.is_op("[")) {
                next();
                if (peek().is_op(":"))
                    unsupported("slice", peek());
                Expr index = expression();
                if (peek().is_op(":"))
                    unsupported("slice", peek());
                if (peek().is_op(","))
                    unsupported("tuple", peek());
                expect_op("]", "']'");
                e = Expr{ast::Index{std::move(e), std::move(index)}};
            } else {
                next();
                const Token& attr = peek();
                if (attr.kind != TokenKind::Ident)
                    fail(attr, "attribute name");
                next();
                if (!peek().is_op("("))
                    unsupported("attribute access", attr);
                e = Expr{ast::MethodCall{std::move(e), attr.text, call_arguments()}};
            }
        }
        return e;
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
        case TokenKind::Int: {
            next();
            std::int64_t v = 0;
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            return Expr{ast::IntLit{v}};
        }
        case TokenKind::String: {
            std::string value = next().text;
            while (peek().kind == TokenKind::String)
                value += next().text;
            if (peek().kind == TokenKind::FString)
                unsupported("implicit concatenation with f-string", peek());
            return Expr{ast::StringLit{std::move(value)}};
        }
        case TokenKind::FString: {
            next();
            if (peek().kind == TokenKind::String || peek().kind == TokenKind::FString)
                unsupported("implicit concatenation with f-string", peek());
            return fstring(t);
        }
        case TokenKind::Ident:
            next();
            return Expr{ast::Name{t.text}};
        case TokenKind::Keyword:
            if (t.text == "None") {
                next();
                return Expr{ast::NullLit{}};
            }
            if (t.text == "True" || t.text == "False") {
                next();
                return Expr{ast::BoolLit{t.text == "True"}};
            }
            if (t.text == "lambda" || t.text == "yield" || t.text == "await")
                unsupported(t.text, t);
            fail(t, "expected expression");
        case TokenKind::Op:
            if (t.text == "(")
                return parenthesized();
            if (t.text == "[")
                return list_literal();
            if (t.text == "{")
                unsupported("dict or set literal", t);
            if (t.text == "*" || t.text == "**")
                unsupported("star expression", t);
            if (t.text == "...")
                unsupported("ellipsis", t);
            fail(t, "expected expression");
        default:
            fail(t, "expected expression");
        }
    }

    Expr parenthesized() {
        const Token& open = next();
        if (peek().is_op(")"))
            unsupported("tuple", open);
        Expr e = expression();
        if (peek().is_op(","))
            unsupported("tuple", peek());
        if (peek().is_keyword("for"))
            unsupported("comprehension", peek());
        expect_op(")", "')'");
        return e;
    }

    Expr list_literal() {
        next();
        ast::ListLit list;
        while (!peek().is_op("]")) {
            if (peek().is_op("*"))
                unsupported("star expression", peek());
            list.items.push_back(expression());
            if (peek().is_keyword("for"))
                unsupported("comprehension", peek());
            if (!accept_op(","))
                break;
        }
        expect_op("]", "']' or ','");
        return Expr{std::move(list)};
    }

    Expr fstring(const Token& tok) {
        const std::string& raw = tok.text;
        ast::FStringLit lit;
        std::string pending;
        auto flush = [&] {
            if (!pending.empty())
                lit.parts.emplace_back(decode_escapes(pending));
            pending.clear();
        };
        std::size_t i = 0;
        while (i < raw.size()) {
            char c = raw[i];
            if (c == '{' && i + 1 < raw.size() && raw[i + 1] == '{') {
                pending += '{';
                i += 2;
            } else if (c == '}' && i + 1 < raw.size() && raw[i + 1] == '}') {
                pending += '}';
                i += 2;
            } else if (c == '}') {
                fail(tok, "single '}' in f-string");
            } else if (c == '{') {
                std::size_t end = fstring_field_end(raw, i);
                if (end == std::string::npos)
                    fail(tok, "unterminated f-string field");
                flush();
                lit.parts.emplace_back(Box<Expr>(field_expression(tok, raw.substr(i + 1, end - i - 2))));
                i = end;
            } else if (c == '\\' && i + 1 < raw.size()) {
                pending += raw.substr(i, 2);
                i += 2;
            } else {
                pending += c;
                ++i;
            }
        }
        flush();
        return Expr{std::move(lit)};
    }

    Expr field_expression(const Token& tok, const std::string& inner) {
        int depth = 0;
        for (std::size_t k = 0; k < inner.size(); ++k) {
            char c = inner[k];
            if (c == '"' || c == '\'') {
                bool nested_f = k > 0 && (inner[k - 1] == 'f' || inner[k - 1] == 'F');
                std::size_t skip = skip_literal(inner, k, nested_f);
                if (skip == std::string::npos)
                    fail(tok, "unterminated string in f-string field");
                k = skip - 1;
            } else if (c == '(' || c == '[' || c == '{') {
                ++depth;
            } else if (c == ')' || c == ']' || c == '}') {
                --depth;
            } else if (depth == 0 && c == ':') {
                unsupported("f-string format spec", tok);
            } else if (depth == 0 && c == '!' && (k + 1 >= inner.size() || inner[k + 1] != '=')) {
                unsupported("f-string conversion", tok);
            }
        }
        auto last = inner.find_last_not_of(" \t\r\n");
        if (last != std::string::npos && inner[last] == '=' &&
            (last == 0 || std::string_view("=!<>").find(inner[last - 1]) == std::string_view::npos))
            unsupported("f-string debug specifier", tok);
        try {
            auto tokens = tokenize("(" + inner + ")");
            return Parser(tokens, depth_ + 1).wrapped_expression();
        } catch (const UnsupportedConstruct& e) {
            throw UnsupportedConstruct(e.name(), tok.line, tok.col);
        } catch (const LexError& e) {
            throw LexError(tok.line, tok.col, "in f-string: " + e.reason());
        } catch (const SyntaxError& e) {
            throw SyntaxError(tok.line, tok.col, "in f-string: " + e.expectation());
        }
    }

    static std::size_t skip_literal(const std::string& s, std::size_t pos, bool is_f) {
        char q = s[pos];
        std::string quote3(3, q);
        bool triple = s.compare(pos, 3, quote3) == 0;
        std::size_t i = pos + (triple ? 3 : 1);
        while (i < s.size()) {
            char c = s[i];
            if (c == '\\') {
                i += 2;
            } else if (triple ? s.compare(i, 3, quote3) == 0 : c == q) {
                return i + (triple ? 3 : 1);
            } else if (is_f && c == '{') {
                if (i + 1 < s.size() && s[i + 1] == '{') {
                    i += 2;
                } else {
                    i = fstring_field_end(s, i);
                    if (i == std::string::npos)
                        return i;
                }
            } else {
                ++i;
            }
        }
        return std::string::npos;
    }

    std::span<const Token> toks_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    int loop_depth_ = 0;
};

} // namespace

Program parse(std::span<const Token> tokens) { return Parser(tokens).program(); }

Program parse_source(std::string_view source) {
    auto tokens = tokenize(source);
    return parse(tokens);
}

} // namespace intent
