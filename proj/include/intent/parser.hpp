#pragma once

#include "intent/ast.hpp"
#include "intent/lexer.hpp"

#include <span>
#include <string>
#include <string_view>

namespace intent {

/// Builds a Program from a token stream ending in EOF.
///
/// Precedence, loosest first: `or`, `and`, `not`, comparisons (including
/// `in` and `is [not] None`), `+ -`, `* /`, unary minus, then call, index
/// and method call. Throws SyntaxError or UnsupportedConstruct.
Program parse(std::span<const Token> tokens);

/// tokenize + parse.
Program parse_source(std::string_view source);

/// Canonical source: 4-space indentation, double-quoted strings, minimal
/// parentheses. Re-parsing the output yields a structurally equal Program.
std::string unparse(const Program& program);
std::string unparse(const Expr& expr);

/// Indented tree dump, one node per line, stable across runs.
std::string dump_ast(const Program& program);

} // namespace intent
