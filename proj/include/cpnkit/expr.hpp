#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpnkit/value.hpp"

namespace cpn {

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

std::string_view op_symbol(UnaryOp op) noexcept;
std::string_view op_symbol(BinaryOp op) noexcept;

class Expr;

namespace ast {
struct Literal {
  Value value;
};
struct Var {
  std::string name;
};
struct Unary;
struct Binary;
struct Tuple;
struct Call;
}  // namespace ast

/// Immutable expression tree. Copies share nodes; equality is structural.
class Expr {
 public:
  struct Node;

  static Expr literal(Value v);
  static Expr var(std::string name);
  static Expr unary(UnaryOp op, Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr tuple(Expr first, Expr second);
  static Expr call(std::string function, std::vector<Expr> args);

  const Node& node() const { return *node_; }

  template <class T>
  const T* as() const;

  /// var | literal | tuple of pattern-like expressions.
  bool is_pattern() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

namespace ast {
struct Unary {
  UnaryOp op;
  Expr operand;
};
struct Binary {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct Tuple {
  Expr first;
  Expr second;
};
struct Call {
  std::string function;
  std::vector<Expr> args;
};
}  // namespace ast

struct Expr::Node {
  std::variant<ast::Literal, ast::Var, ast::Unary, ast::Binary, ast::Tuple, ast::Call> v;
};

template <class T>
const T* Expr::as() const {
  return std::get_if<T>(&node_->v);
}

/// Output-arc inscription: a body plus an optional `@+` delay.
struct ArcInscription {
  Expr body;
  std::optional<Expr> delay;

  friend bool operator==(const ArcInscription&, const ArcInscription&) = default;
};

struct Function {
  std::vector<std::string> params;
  Expr body;

  friend bool operator==(const Function&, const Function&) = default;
};

/// User-defined functions, keyed by name.
class FunctionTable {
 public:
  /// Throws DuplicateFunction if the name exists, SyntaxError on repeated parameters.
  void add(std::string name, Function fn);
  const Function* find(std::string_view name) const;
  const std::map<std::string, Function, std::less<>>& entries() const noexcept { return fns_; }
  bool empty() const noexcept { return fns_.empty(); }
  std::size_t size() const noexcept { return fns_.size(); }

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;

 private:
  std::map<std::string, Function, std::less<>> fns_;
};

inline constexpr int kMaxCallDepth = 1000;

Expr parse_expression(std::string_view text);
ArcInscription parse_arc_inscription(std::string_view text);
FunctionTable parse_function_definitions(std::string_view text);
void parse_function_definitions(std::string_view text, FunctionTable& into);

/// Strict, side-effect-free evaluation. Throws cpn::Error with one of
/// UnboundVariable, UnknownFunction, ArityMismatch, TypeErrorAtRuntime,
/// DivisionByZero, ArithmeticOverflow, RecursionLimitExceeded.
Value evaluate(const Expr& expr, const Env& env, const FunctionTable& functions);

/// Names of var nodes. Function bodies are closed, so calls contribute only their arguments.
std::set<std::string> free_variables(const Expr& expr);

/// Unifies a pattern-like expression with `value`, extending `partial`.
/// Returns nullopt on mismatch; throws NotAPattern for operators or calls.
std::optional<Env> match_pattern(const Expr& pattern, const Value& value, const Env& partial);

/// Minimal-parentheses source text; parse_expression(pretty_print(e)) == e.
std::string pretty_print(const Expr& expr);
std::string pretty_print(const ArcInscription& inscription);
std::string pretty_print(std::string_view name, const Function& fn);

}  // namespace cpn
