#include "intent/parser.hpp"

namespace intent {

namespace {

enum Prec : int {
    kOr = 1,
    kAnd = 2,
    kNot = 3,
    kCompare = 4,
    kAdditive = 5,
    kMultiplicative = 6,
    kUnaryMinus = 7,
    kPostfix = 8,
    kAtom = 9,
};

int precedence(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdditive;
    case BinaryOp::Mul:
    case BinaryOp::Div: return kMultiplicative;
    default: return kCompare;
    }
}

int precedence(const Expr& e) {
    if (auto b = e.as<ast::Binary>())
        return precedence(b->op);
    if (auto u = e.as<ast::Unary>())
        return u->op == UnaryOp::Not ? kNot : kUnaryMinus;
    if (e.as<ast::Call>() || e.as<ast::MethodCall>() || e.as<ast::Index>())
        return kPostfix;
    return kAtom;
}

void quote_into(std::string& out, std::string_view text, bool fstring_literal) {
    for (char c : text) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '{':
            out += fstring_literal ? "{{" : "{";
            break;
        case '}':
            out += fstring_literal ? "}}" : "}";
            break;
        default: out += c;
        }
    }
}

void expr_into(std::string& out, const Expr& e, int min_prec);

void args_into(std::string& out, const std::vector<Expr>& args) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ", ";
        expr_into(out, args[i], kOr);
    }
    out += ')';
}

struct ExprWriter {
    std::string& out;

    void operator()(const ast::NullLit&) { out += "None"; }
    void operator()(const ast::BoolLit& b) { out += b.value ? "True" : "False"; }
    void operator()(const ast::IntLit& i) { out += std::to_string(i.value); }
    void operator()(const ast::StringLit& s) {
        out += '"';
        quote_into(out, s.value, false);
        out += '"';
    }
    void operator()(const ast::FStringLit& f) {
        out += "f\"";
        for (const auto& part : f.parts) {
            if (auto lit = std::get_if<std::string>(&part)) {
                quote_into(out, *lit, true);
            } else {
                out += '{';
                expr_into(out, *std::get<Box<Expr>>(part), kOr);
                out += '}';
            }
        }
        out += '"';
    }
    void operator()(const ast::ListLit& l) {
        out += '[';
        for (std::size_t i = 0; i < l.items.size(); ++i) {
            if (i)
                out += ", ";
            expr_into(out, l.items[i], kOr);
        }
        out += ']';
    }
    void operator()(const ast::Name& n) { out += n.id; }
    void operator()(const ast::Call& c) {
        out += c.callee;
        args_into(out, c.args);
    }
    void operator()(const ast::MethodCall& m) {
        // `1.append` would lex as a malformed number.
        if (m.receiver->as<ast::IntLit>())
            expr_into(out, *m.receiver, kAtom + 1);
        else
            expr_into(out, *m.receiver, kPostfix);
        out += '.';
        out += m.method;
        args_into(out, m.args);
    }
    void operator()(const ast::Index& ix) {
        expr_into(out, *ix.receiver, kPostfix);
        out += '[';
        expr_into(out, *ix.index, kOr);
        out += ']';
    }
    void operator()(const ast::Unary& u) {
        if (u.op == UnaryOp::Not) {
            out += "not ";
            expr_into(out, *u.operand, kNot);
        } else {
            out += '-';
            expr_into(out, *u.operand, kUnaryMinus);
        }
    }
    void operator()(const ast::Binary& b) {
        int p = precedence(b.op);
        if (b.op == BinaryOp::IsNull || b.op == BinaryOp::IsNotNull) {
            expr_into(out, *b.lhs, p + 1);
            out += ' ';
            out += to_string(b.op);
            return;
        }
        // Comparisons do not chain, so both sides bind tighter.
        expr_into(out, *b.lhs, p == kCompare ? p + 1 : p);
        out += ' ';
        out += to_string(b.op);
        out += ' ';
        expr_into(out, *b.rhs, p + 1);
    }
};

void expr_into(std::string& out, const Expr& e, int min_prec) {
    bool parens = precedence(e) < min_prec;
    if (parens)
        out += '(';
    std::visit(ExprWriter{out}, e.node);
    if (parens)
        out += ')';
}

void block_into(std::string& out, const Block& block, int level);

struct StmtWriter {
    std::string& out;
    int level;

    void indent() { out.append(static_cast<std::size_t>(level) * 4, ' '); }

    void operator()(const ast::Assign& a) {
        indent();
        out += a.target;
        out += a.op == AssignOp::Set ? " = " : " += ";
        expr_into(out, a.value, kOr);
    }
    void operator()(const ast::ExprStmt& s) {
        indent();
        expr_into(out, s.expr, kOr);
    }
    void operator()(const ast::If& s) {
        for (std::size_t i = 0; i < s.arms.size(); ++i) {
            if (i)
                out += '\n';
            indent();
            out += i == 0 ? "if " : "elif ";
            expr_into(out, s.arms[i].cond, kOr);
            out += ":\n";
            block_into(out, s.arms[i].body, level + 1);
        }
        if (s.else_body) {
            out += '\n';
            indent();
            out += "else:\n";
            block_into(out, *s.else_body, level + 1);
        }
    }
    void operator()(const ast::While& s) {
        indent();
        out += "while ";
        expr_into(out, s.cond, kOr);
        out += ":\n";
        block_into(out, s.body, level + 1);
    }
    void operator()(const ast::For& s) {
        indent();
        out += "for " + s.var + " in ";
        expr_into(out, s.iterable, kOr);
        out += ":\n";
        block_into(out, s.body, level + 1);
    }
    void operator()(const ast::Break&) {
        indent();
        out += "break";
    }
    void operator()(const ast::Continue&) {
        indent();
        out += "continue";
    }
    void operator()(const ast::Pass&) {
        indent();
        out += "pass";
    }
    void operator()(const ast::Import& s) {
        indent();
        if (s.module.starts_with("."))
            out += "from " + s.module + " import *";
        else
            out += "import " + s.module;
    }
};

void block_into(std::string& out, const Block& block, int level) {
    if (block.empty()) {
        out.append(static_cast<std::size_t>(level) * 4, ' ');
        out += "pass";
        return;
    }
    for (std::size_t i = 0; i < block.size(); ++i) {
        if (i)
            out += '\n';
        std::visit(StmtWriter{out, level}, block[i].node);
    }
}

// ---- debug dump ----

std::string dump_expr(const Expr& e);

std::string dump_list(const std::vector<Expr>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ", ";
        out += dump_expr(items[i]);
    }
    return out + "]";
}

std::string quoted(std::string_view s) {
    std::string out = "\"";
    quote_into(out, s, false);
    return out + "\"";
}

std::string_view binary_name(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "Add";
    case BinaryOp::Sub: return "Sub";
    case BinaryOp::Mul: return "Mul";
    case BinaryOp::Div: return "Div";
    case BinaryOp::Eq: return "Eq";
    case BinaryOp::Ne: return "Ne";
    case BinaryOp::Lt: return "Lt";
    case BinaryOp::Le: return "Le";
    case BinaryOp::Gt: return "Gt";
    case BinaryOp::Ge: return "Ge";
    case BinaryOp::And: return "And";
    case BinaryOp::Or: return "Or";
    case BinaryOp::In: return "In";
    case BinaryOp::IsNull: return "IsNull";
    case BinaryOp::IsNotNull: return "IsNotNull";
    }
    return "?";
}

std::string dump_expr(const Expr& e) {
    struct V {
        std::string operator()(const ast::NullLit&) { return "None"; }
        std::string operator()(const ast::BoolLit& b) { return b.value ? "Bool(True)" : "Bool(False)"; }
        std::string operator()(const ast::IntLit& i) { return "Int(" + std::to_string(i.value) + ")"; }
        std::string operator()(const ast::StringLit& s) { return "Str(" + quoted(s.value) + ")"; }
        std::string operator()(const ast::FStringLit& f) {
            std::string out = "FString([";
            for (std::size_t i = 0; i < f.parts.size(); ++i) {
                if (i)
                    out += ", ";
                if (auto lit = std::get_if<std::string>(&f.parts[i]))
                    out += quoted(*lit);
                else
                    out += dump_expr(*std::get<Box<Expr>>(f.parts[i]));
            }
            return out + "])";
        }
        std::string operator()(const ast::ListLit& l) { return "List(" + dump_list(l.items) + ")"; }
        std::string operator()(const ast::Name& n) { return "Name(" + n.id + ")"; }
        std::string operator()(const ast::Call& c) {
            return "Call(" + c.callee + ", " + dump_list(c.args) + ")";
        }
        std::string operator()(const ast::MethodCall& m) {
            return "MethodCall(" + dump_expr(*m.receiver) + ", " + m.method + ", " +
                   dump_list(m.args) + ")";
        }
        std::string operator()(const ast::Index& ix) {
            return "Index(" + dump_expr(*ix.receiver) + ", " + dump_expr(*ix.index) + ")";
        }
        std::string operator()(const ast::Unary& u) {
            return std::string(u.op == UnaryOp::Not ? "Not(" : "Neg(") + dump_expr(*u.operand) + ")";
        }
        std::string operator()(const ast::Binary& b) {
            std::string out(binary_name(b.op));
            if (b.op == BinaryOp::IsNull || b.op == BinaryOp::IsNotNull)
                return out + "(" + dump_expr(*b.lhs) + ")";
            return out + "(" + dump_expr(*b.lhs) + ", " + dump_expr(*b.rhs) + ")";
        }
    };
    return std::visit(V{}, e.node);
}

void dump_block(std::string& out, const Block& block, int level);

void dump_stmt(std::string& out, const Stmt& s, int level) {
    std::string pad(static_cast<std::size_t>(level) * 2, ' ');
    std::string head = pad + std::to_string(s.line) + ": ";
    struct V {
        std::string& out;
        const std::string& head;
        const std::string& pad;
        int level;

        void operator()(const ast::Assign& a) {
            out += head + "Assign(" + a.target + (a.op == AssignOp::Set ? ", =, " : ", +=, ") +
                   dump_expr(a.value) + ")\n";
        }
        void operator()(const ast::ExprStmt& e) { out += head + "Expr(" + dump_expr(e.expr) + ")\n"; }
        void operator()(const ast::If& s) {
            out += head + "If\n";
            for (const auto& arm : s.arms) {
                out += pad + "  Arm " + dump_expr(arm.cond) + "\n";
                dump_block(out, arm.body, level + 2);
            }
            if (s.else_body) {
                out += pad + "  Else\n";
                dump_block(out, *s.else_body, level + 2);
            }
        }
        void operator()(const ast::While& s) {
            out += head + "While " + dump_expr(s.cond) + "\n";
            dump_block(out, s.body, level + 1);
        }
        void operator()(const ast::For& s) {
            out += head + "For " + s.var + " in " + dump_expr(s.iterable) + "\n";
            dump_block(out, s.body, level + 1);
        }
        void operator()(const ast::Break&) { out += head + "Break\n"; }
        void operator()(const ast::Continue&) { out += head + "Continue\n"; }
        void operator()(const ast::Pass&) { out += head + "Pass\n"; }
        void operator()(const ast::Import& i) { out += head + "Import(" + i.module + ")\n"; }
    };
    std::visit(V{out, head, pad, level}, s.node);
}

void dump_block(std::string& out, const Block& block, int level) {
    for (const auto& s : block)
        dump_stmt(out, s, level);
}

} // namespace

std::string unparse(const Program& program) {
    std::string out;
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
        if (i)
            out += '\n';
        std::visit(StmtWriter{out, 0}, program.statements[i].node);
    }
    return out;
}

std::string unparse(const Expr& expr) {
    std::string out;
    expr_into(out, expr, kOr);
    return out;
}

std::string dump_ast(const Program& program) {
    std::string out = "Program\n";
    dump_block(out, program.statements, 1);
    return out;
}

} // namespace intent
