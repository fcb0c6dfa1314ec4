#include "intent/executor.hpp"

#include <charconv>
#include <unordered_map>

namespace intent {

void Limits::validate() const {
    if (max_steps == 0 || max_list_len == 0 || max_string_len == 0)
        throw std::invalid_argument("execution limits must be positive");
}

std::string_view to_string(FailureKind kind) {
    switch (kind) {
    case FailureKind::UnauthorizedAccess: return "UnauthorizedAccess";
    case FailureKind::ScopingViolation: return "ScopingViolation";
    case FailureKind::TypeError: return "TypeError";
    case FailureKind::DivisionByZero: return "DivisionByZero";
    case FailureKind::StepLimitExceeded: return "StepLimitExceeded";
    case FailureKind::LimitExceeded: return "LimitExceeded";
    case FailureKind::PrivilegedDenied: return "PrivilegedDenied";
    }
    return "?";
}

std::vector<std::string> ExecutionResult::trace_lines() const {
    std::vector<std::string> lines;
    lines.reserve(trace.size());
    for (const auto& e : trace)
        lines.push_back(e.rendered);
    return lines;
}

namespace {

[[noreturn]] void fault(FailureKind kind, const std::string& message) {
    throw ExecutionFault(kind, message);
}

[[noreturn]] void type_error(const std::string& message) { fault(FailureKind::TypeError, message); }

std::string type_of(const Value& v) { return std::string(kind_name(v.kind())); }

std::vector<std::string_view> code_points(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i + 1;
        while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80)
            ++j;
        out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

struct Footprint {
    std::size_t elements = 0;
    std::size_t bytes = 0;
};

Footprint footprint(const Value& v) {
    Footprint f;
    if (v.is_str()) {
        f.bytes = v.as_str().size();
    } else if (v.is_list()) {
        for (const auto& item : v.as_list()) {
            auto inner = footprint(item);
            f.elements += 1 + inner.elements;
            f.bytes += inner.bytes;
        }
    }
    return f;
}

void check_list(const Footprint& f, const Limits& limits) {
    if (f.elements > limits.max_list_len)
        fault(FailureKind::LimitExceeded,
              "list exceeds " + std::to_string(limits.max_list_len) + " elements");
    if (f.bytes > limits.max_string_len)
        fault(FailureKind::LimitExceeded,
              "list holds more than " + std::to_string(limits.max_string_len) + " bytes of text");
}

Value checked_string(std::string s, const Limits& limits) {
    if (s.size() > limits.max_string_len)
        fault(FailureKind::LimitExceeded,
              "string exceeds " + std::to_string(limits.max_string_len) + " bytes");
    return Value(std::move(s));
}

std::size_t normalize_index(std::int64_t index, std::size_t size) {
    std::int64_t n = static_cast<std::int64_t>(size);
    std::int64_t k = index < 0 ? index + n : index;
    if (k < 0 || k >= n)
        type_error("index " + std::to_string(index) + " out of range");
    return static_cast<std::size_t>(k);
}

Value index_value(const Value& receiver, const Value& index) {
    if (!index.is_int())
        type_error("index must be int, not " + type_of(index));
    if (receiver.is_list()) {
        const auto& items = receiver.as_list();
        return items[normalize_index(index.as_int(), items.size())];
    }
    if (receiver.is_str()) {
        auto cps = code_points(receiver.as_str());
        return std::string(cps[normalize_index(index.as_int(), cps.size())]);
    }
    type_error(type_of(receiver) + " is not indexable");
}

class Interpreter {
public:
    Interpreter(const FunctionTable& table, const Limits& limits, ConsentPolicy& consent,
                const ExecOptions& options, ExecutionResult& result)
        : table_(table), limits_(limits), consent_(consent), options_(options), result_(result) {
        tracer_ = [this](const TraceEvent& e) {
            result_.trace.push_back(e);
            if (options_.observer)
                options_.observer(e);
        };
    }

    void run(const Program& program) {
        try {
            exec_block(program.statements);
        } catch (const ExecutionFault& f) {
            result_.failure = Failure{f.kind(), f.what(), line_};
        }
    }

private:
    enum class Flow { Normal, Break, Continue };

    void tick() {
        if (result_.steps_used >= limits_.max_steps)
            fault(FailureKind::StepLimitExceeded,
                  "step limit of " + std::to_string(limits_.max_steps) + " exceeded");
        ++result_.steps_used;
    }

    Flow exec_block(const Block& block) {
        for (const auto& s : block) {
            Flow flow = exec(s);
            if (flow != Flow::Normal)
                return flow;
        }
        return Flow::Normal;
    }

    Flow exec(const Stmt& s) {
        line_ = s.line;
        tick();
        return std::visit([&](const auto& node) { return exec_node(node, s.line); }, s.node);
    }

    Flow exec_node(const ast::Assign& a, int) {
        Value v = eval(a.value);
        if (a.op == AssignOp::Set) {
            scope_[a.target] = std::move(v);
            return Flow::Normal;
        }
        auto it = scope_.find(a.target);
        if (it == scope_.end())
            fault(FailureKind::ScopingViolation,
                  "name '" + a.target + "' is not defined (augmented assignment)");
        it->second = add(it->second, v);
        return Flow::Normal;
    }

    Flow exec_node(const ast::ExprStmt& e, int) {
        eval(e.expr);
        return Flow::Normal;
    }

    Flow exec_node(const ast::If& s, int) {
        for (const auto& arm : s.arms) {
            if (truthiness(eval(arm.cond)))
                return exec_block(arm.body);
        }
        if (s.else_body)
            return exec_block(*s.else_body);
        return Flow::Normal;
    }

    Flow exec_node(const ast::While& s, int line) {
        while (true) {
            line_ = line;
            if (!truthiness(eval(s.cond)))
                break;
            if (exec_block(s.body) == Flow::Break)
                break;
        }
        return Flow::Normal;
    }

    Flow exec_node(const ast::For& s, int) {
        Value iterable = eval(s.iterable);
        std::vector<Value> items;
        if (iterable.is_list()) {
            items = iterable.as_list();
        } else if (iterable.is_str()) {
            for (auto cp : code_points(iterable.as_str()))
                items.emplace_back(std::string(cp));
        } else {
            type_error(type_of(iterable) + " is not iterable");
        }
        for (auto& item : items) {
            scope_[s.var] = std::move(item);
            if (exec_block(s.body) == Flow::Break)
                break;
        }
        return Flow::Normal;
    }

    Flow exec_node(const ast::Break&, int) { return Flow::Break; }
    Flow exec_node(const ast::Continue&, int) { return Flow::Continue; }
    Flow exec_node(const ast::Pass&, int) { return Flow::Normal; }

    Flow exec_node(const ast::Import& i, int) {
        fault(FailureKind::UnauthorizedAccess,
              "import of module '" + i.module + "' is not permitted in the sandbox");
    }

    // ---- expressions ----

    Value eval(const Expr& e) {
        tick();
        return std::visit([&](const auto& node) { return eval_node(node); }, e.node);
    }

    Value eval_node(const ast::NullLit&) { return {}; }
    Value eval_node(const ast::BoolLit& b) { return b.value; }
    Value eval_node(const ast::IntLit& i) { return i.value; }
    Value eval_node(const ast::StringLit& s) { return checked_string(s.value, limits_); }

    Value eval_node(const ast::FStringLit& f) {
        std::string out;
        for (const auto& part : f.parts) {
            if (auto lit = std::get_if<std::string>(&part))
                out += *lit;
            else
                out += render_value(eval(*std::get<Box<Expr>>(part)));
            if (out.size() > limits_.max_string_len)
                break;
        }
        return checked_string(std::move(out), limits_);
    }

    Value eval_node(const ast::ListLit& l) {
        Value::List items;
        items.reserve(l.items.size());
        for (const auto& item : l.items)
            items.push_back(eval(item));
        Value v(std::move(items));
        check_list(footprint(v), limits_);
        return v;
    }

    Value eval_node(const ast::Name& n) {
        auto it = scope_.find(n.id);
        if (it == scope_.end())
            fault(FailureKind::ScopingViolation, "name '" + n.id + "' is not defined");
        return it->second;
    }

    Value eval_node(const ast::Call& c) {
        bool in_table = table_.contains(c.callee);
        if (!in_table && !options_.builtins.contains(c.callee))
            fault(FailureKind::UnauthorizedAccess,
                  "'" + c.callee + "' is not an available function");
        std::vector<Value> args;
        args.reserve(c.args.size());
        for (const auto& a : c.args)
            args.push_back(eval(a));
        if (!in_table)
            return builtin_call(c.callee, args, limits_);
        try {
            return table_.invoke(c.callee, args, consent_, tracer_);
        } catch (const TableError& err) {
            switch (err.kind()) {
            case TableErrorKind::PrivilegedDenied: fault(FailureKind::PrivilegedDenied, err.what());
            case TableErrorKind::UnknownFunction: fault(FailureKind::UnauthorizedAccess, err.what());
            default: type_error(err.what());
            }
        } catch (const ExecutionFault&) {
            throw;
        } catch (const std::exception& err) {
            type_error("handler for '" + c.callee + "' failed: " + err.what());
        }
    }

    // Receivers that name a variable (optionally through indexing) are
    // mutated in place; anything else is a temporary.
    struct Place {
        std::string root;
        std::vector<std::size_t> path;
    };

    struct Receiver {
        std::optional<Place> place;
        Value temp;
    };

    // Charges the same steps as eval() on the receiver expression.
    Receiver receiver_of(const Expr& e) {
        if (auto n = e.as<ast::Name>()) {
            tick();
            if (!scope_.contains(n->id))
                fault(FailureKind::ScopingViolation, "name '" + n->id + "' is not defined");
            return {Place{n->id, {}}, {}};
        }
        if (auto ix = e.as<ast::Index>()) {
            tick();
            Receiver inner = receiver_of(*ix->receiver);
            Value index = eval(*ix->index);
            if (!inner.place)
                return {std::nullopt, index_value(inner.temp, index)};
            Value& container = resolve(*inner.place);
            if (!container.is_list())
                return {std::nullopt, index_value(container, index)};
            if (!index.is_int())
                type_error("index must be int, not " + type_of(index));
            inner.place->path.push_back(normalize_index(index.as_int(), container.as_list().size()));
            return inner;
        }
        return {std::nullopt, eval(e)};
    }

    Value& resolve(const Place& p) {
        Value* v = &scope_.at(p.root);
        for (std::size_t k : p.path)
            v = &v->as_list()[k];
        return *v;
    }

    Value eval_node(const ast::MethodCall& m) {
        Receiver r = receiver_of(*m.receiver);
        const Value& receiver = r.place ? resolve(*r.place) : r.temp;
        if (m.method != "append")
            type_error(type_of(receiver) + " has no method '" + m.method + "'");
        if (!receiver.is_list())
            type_error(type_of(receiver) + " has no method 'append'");
        if (m.args.size() != 1)
            type_error("append() takes exactly one argument (" + std::to_string(m.args.size()) +
                       " given)");
        Value item = eval(m.args.front());
        // Re-resolve: evaluating the argument may have grown an enclosing list.
        Value& target = r.place ? resolve(*r.place) : r.temp;
        auto before = footprint(target);
        auto added = footprint(item);
        check_list({before.elements + 1 + added.elements, before.bytes + added.bytes}, limits_);
        target.as_list().push_back(std::move(item));
        return {};
    }

    Value eval_node(const ast::Index& ix) {
        Value receiver = eval(*ix.receiver);
        Value index = eval(*ix.index);
        return index_value(receiver, index);
    }

    Value eval_node(const ast::Unary& u) {
        Value v = eval(*u.operand);
        if (u.op == UnaryOp::Not)
            return !truthiness(v);
        if (!v.is_int())
            type_error("bad operand type for unary -: " + type_of(v));
        std::int64_t out = 0;
        if (__builtin_sub_overflow(std::int64_t{0}, v.as_int(), &out))
            type_error("integer overflow");
        return out;
    }

    Value eval_node(const ast::Binary& b) {
        if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
            Value lhs = eval(*b.lhs);
            bool t = truthiness(lhs);
            if ((b.op == BinaryOp::And) != t)
                return lhs;
            return eval(*b.rhs);
        }
        if (b.op == BinaryOp::IsNull)
            return eval(*b.lhs).is_null();
        if (b.op == BinaryOp::IsNotNull)
            return !eval(*b.lhs).is_null();

        Value lhs = eval(*b.lhs);
        Value rhs = eval(*b.rhs);
        switch (b.op) {
        case BinaryOp::Add: return add(lhs, rhs);
        case BinaryOp::Sub:
        case BinaryOp::Mul:
        case BinaryOp::Div: return arithmetic(b.op, lhs, rhs);
        case BinaryOp::Eq: return lhs == rhs;
        case BinaryOp::Ne: return lhs != rhs;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return compare(b.op, lhs, rhs);
        case BinaryOp::In: return contains(lhs, rhs);
        default: break;
        }
        type_error("unsupported operator");
    }

    Value add(const Value& lhs, const Value& rhs) {
        if (lhs.is_int() && rhs.is_int()) {
            std::int64_t out = 0;
            if (__builtin_add_overflow(lhs.as_int(), rhs.as_int(), &out))
                type_error("integer overflow");
            return out;
        }
        if (lhs.is_str() && rhs.is_str())
            return checked_string(lhs.as_str() + rhs.as_str(), limits_);
        if (lhs.is_list() && rhs.is_list()) {
            auto a = footprint(lhs);
            auto b = footprint(rhs);
            check_list({a.elements + b.elements, a.bytes + b.bytes}, limits_);
            Value::List items = lhs.as_list();
            items.insert(items.end(), rhs.as_list().begin(), rhs.as_list().end());
            return items;
        }
        type_error("unsupported operand types for +: " + type_of(lhs) + " and " + type_of(rhs));
    }

    Value arithmetic(BinaryOp op, const Value& lhs, const Value& rhs) {
        if (!lhs.is_int() || !rhs.is_int())
            type_error("unsupported operand types for " + std::string(to_string(op)) + ": " +
                       type_of(lhs) + " and " + type_of(rhs));
        std::int64_t a = lhs.as_int();
        std::int64_t b = rhs.as_int();
        std::int64_t out = 0;
        bool overflow = false;
        switch (op) {
        case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
        case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
        default:
            if (b == 0)
                fault(FailureKind::DivisionByZero, "division by zero");
            if (a == INT64_MIN && b == -1)
                overflow = true;
            else
                out = a / b;
        }
        if (overflow)
            type_error("integer overflow");
        return out;
    }

    Value compare(BinaryOp op, const Value& lhs, const Value& rhs) {
        int c = 0;
        if (lhs.is_int() && rhs.is_int())
            c = lhs.as_int() < rhs.as_int() ? -1 : lhs.as_int() > rhs.as_int() ? 1 : 0;
        else if (lhs.is_str() && rhs.is_str())
            c = lhs.as_str().compare(rhs.as_str());
        else
            type_error("'" + std::string(to_string(op)) + "' not supported between " +
                       type_of(lhs) + " and " + type_of(rhs));
        switch (op) {
        case BinaryOp::Lt: return c < 0;
        case BinaryOp::Le: return c <= 0;
        case BinaryOp::Gt: return c > 0;
        default: return c >= 0;
        }
    }

    Value contains(const Value& needle, const Value& haystack) {
        if (haystack.is_list()) {
            for (const auto& item : haystack.as_list()) {
                if (item == needle)
                    return true;
            }
            return false;
        }
        if (haystack.is_str()) {
            if (!needle.is_str())
                type_error("'in <str>' requires str as left operand, not " + type_of(needle));
            return haystack.as_str().find(needle.as_str()) != std::string::npos;
        }
        type_error("argument of type " + type_of(haystack) + " is not iterable");
    }

    const FunctionTable& table_;
    const Limits& limits_;
    ConsentPolicy& consent_;
    const ExecOptions& options_;
    ExecutionResult& result_;
    TraceSink tracer_;
    std::unordered_map<std::string, Value> scope_;
    int line_ = 0;
};

} // namespace

Value builtin_call(std::string_view name, std::span<const Value> args, const Limits& limits) {
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            type_error(std::string(name) + "() got " + std::to_string(args.size()) + " arguments");
    };
    if (name == "len") {
        arity(1, 1);
        if (args[0].is_str())
            return static_cast<std::int64_t>(code_points(args[0].as_str()).size());
        if (args[0].is_list())
            return static_cast<std::int64_t>(args[0].as_list().size());
        type_error("object of type " + type_of(args[0]) + " has no len()");
    }
    if (name == "str") {
        arity(1, 1);
        return checked_string(render_value(args[0]), limits);
    }
    if (name == "int") {
        arity(1, 1);
        const Value& v = args[0];
        if (v.is_int())
            return v;
        if (v.is_bool())
            return std::int64_t{v.as_bool() ? 1 : 0};
        if (!v.is_str())
            type_error("int() argument must be a string or int, not " + type_of(v));
        std::string_view s = v.as_str();
        auto first = s.find_first_not_of(" \t\n\r");
        auto last = s.find_last_not_of(" \t\n\r");
        if (first == std::string_view::npos)
            type_error("invalid literal for int(): '" + v.as_str() + "'");
        s = s.substr(first, last - first + 1);
        bool negative = false;
        if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
            negative = s[0] == '-';
            s.remove_prefix(1);
        }
        std::uint64_t magnitude = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), magnitude);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            type_error("invalid literal for int(): '" + v.as_str() + "'");
        constexpr std::uint64_t max_pos = static_cast<std::uint64_t>(INT64_MAX);
        if (magnitude > max_pos + (negative ? 1 : 0))
            type_error("int() literal out of range: '" + v.as_str() + "'");
        if (negative)
            return magnitude == max_pos + 1 ? INT64_MIN : -static_cast<std::int64_t>(magnitude);
        return static_cast<std::int64_t>(magnitude);
    }
    if (name == "range") {
        arity(1, 2);
        for (const auto& a : args) {
            if (!a.is_int())
                type_error("range() arguments must be int, not " + type_of(a));
        }
        std::int64_t lo = args.size() == 2 ? args[0].as_int() : 0;
        std::int64_t hi = args.size() == 2 ? args[1].as_int() : args[0].as_int();
        Value::List items;
        if (hi > lo) {
            // Unsigned difference avoids overflow for extreme bounds.
            auto count = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
            if (count > limits.max_list_len)
                fault(FailureKind::LimitExceeded,
                      "range() of " + std::to_string(count) + " elements exceeds list limit");
            for (std::int64_t k = lo; k < hi; ++k)
                items.emplace_back(k);
        }
        return items;
    }
    fault(FailureKind::UnauthorizedAccess, "'" + std::string(name) + "' is not an available function");
}

ExecutionResult execute(const Program& program, const FunctionTable& table, const Limits& limits,
                        ConsentPolicy consent, const ExecOptions& options) {
    limits.validate();
    ExecutionResult result;
    Interpreter(table, limits, consent, options, result).run(program);
    return result;
}

} // namespace intent
