#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace intent {

/// Owning, deep-copying pointer used for recursive AST members.
template <class T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other)
            ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

struct Expr;

enum class UnaryOp { Not, Neg };

enum class BinaryOp {
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, In,
    IsNull, IsNotNull,
};

std::string_view to_string(UnaryOp op);
std::string_view to_string(BinaryOp op);

namespace ast {

struct NullLit {
    friend bool operator==(const NullLit&, const NullLit&) = default;
};
struct BoolLit {
    bool value;
    friend bool operator==(const BoolLit&, const BoolLit&) = default;
};
struct IntLit {
    std::int64_t value;
    friend bool operator==(const IntLit&, const IntLit&) = default;
};
struct StringLit {
    std::string value;
    friend bool operator==(const StringLit&, const StringLit&) = default;
};

/// Literal text or an embedded expression.
using FStringPart = std::variant<std::string, Box<Expr>>;

struct FStringLit {
    std::vector<FStringPart> parts;
    friend bool operator==(const FStringLit&, const FStringLit&) = default;
};
struct ListLit {
    std::vector<Expr> items;
    friend bool operator==(const ListLit&, const ListLit&) = default;
};
struct Name {
    std::string id;
    friend bool operator==(const Name&, const Name&) = default;
};
struct Call {
    std::string callee;
    std::vector<Expr> args;
    friend bool operator==(const Call&, const Call&) = default;
};
struct MethodCall {
    Box<Expr> receiver;
    std::string method;
    std::vector<Expr> args;
    friend bool operator==(const MethodCall&, const MethodCall&) = default;
};
struct Index {
    Box<Expr> receiver;
    Box<Expr> index;
    friend bool operator==(const Index&, const Index&) = default;
};
struct Unary {
    UnaryOp op;
    Box<Expr> operand;
    friend bool operator==(const Unary&, const Unary&) = default;
};
/// `x is None` is Binary{IsNull, x, NullLit}; likewise IsNotNull.
struct Binary {
    BinaryOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    friend bool operator==(const Binary&, const Binary&) = default;
};

} // namespace ast

struct Expr {
    using Node = std::variant<ast::NullLit, ast::BoolLit, ast::IntLit, ast::StringLit,
                              ast::FStringLit, ast::ListLit, ast::Name, ast::Call,
                              ast::MethodCall, ast::Index, ast::Unary, ast::Binary>;
    Node node;

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct Stmt;
using Block = std::vector<Stmt>;

enum class AssignOp { Set, Add };

namespace ast {

struct Assign {
    std::string target;
    AssignOp op;
    Expr value;
    friend bool operator==(const Assign&, const Assign&) = default;
};
struct ExprStmt {
    Expr expr;
    friend bool operator==(const ExprStmt&, const ExprStmt&) = default;
};
struct IfArm {
    Expr cond;
    Block body;
    friend bool operator==(const IfArm&, const IfArm&) = default;
};
struct If {
    std::vector<IfArm> arms;
    std::optional<Block> else_body;
    friend bool operator==(const If&, const If&) = default;
};
struct While {
    Expr cond;
    Block body;
    friend bool operator==(const While&, const While&) = default;
};
struct For {
    std::string var;
    Expr iterable;
    Block body;
    friend bool operator==(const For&, const For&) = default;
};
struct Break {
    friend bool operator==(const Break&, const Break&) = default;
};
struct Continue {
    friend bool operator==(const Continue&, const Continue&) = default;
};
struct Pass {
    friend bool operator==(const Pass&, const Pass&) = default;
};
/// Parsed so that execution can reject it as a policy violation.
struct Import {
    std::string module;
    friend bool operator==(const Import&, const Import&) = default;
};

} // namespace ast

struct Stmt {
    using Node = std::variant<ast::Assign, ast::ExprStmt, ast::If, ast::While, ast::For,
                              ast::Break, ast::Continue, ast::Pass, ast::Import>;
    Node node;
    int line = 0;

    template <class T>
    const T* as() const { return std::get_if<T>(&node); }

    // Structural: source positions are ignored.
    friend bool operator==(const Stmt& a, const Stmt& b) { return a.node == b.node; }
};

struct Program {
    Block statements;
    friend bool operator==(const Program&, const Program&) = default;
};

} // namespace intent
