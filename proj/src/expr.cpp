#include "cpnkit/expr.hpp"

#include <charconv>
#include <limits>

#include "cpnkit/error.hpp"
#include "lexer.hpp"

namespace cpn {

using detail::Tok;
using detail::TokenStream;

std::string_view op_symbol(UnaryOp op) noexcept { return op == UnaryOp::Neg ? "-" : "not"; }

std::string_view op_symbol(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "mod";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Construction and structure

Expr Expr::literal(Value v) { return Expr(std::make_shared<const Node>(Node{ast::Literal{std::move(v)}})); }
Expr Expr::var(std::string name) { return Expr(std::make_shared<const Node>(Node{ast::Var{std::move(name)}})); }
Expr Expr::unary(UnaryOp op, Expr operand) {
  return Expr(std::make_shared<const Node>(Node{ast::Unary{op, std::move(operand)}}));
}
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{ast::Binary{op, std::move(lhs), std::move(rhs)}}));
}
Expr Expr::tuple(Expr first, Expr second) {
  return Expr(std::make_shared<const Node>(Node{ast::Tuple{std::move(first), std::move(second)}}));
}
Expr Expr::call(std::string function, std::vector<Expr> args) {
  return Expr(std::make_shared<const Node>(Node{ast::Call{std::move(function), std::move(args)}}));
}

bool Expr::is_pattern() const {
  if (as<ast::Var>() || as<ast::Literal>()) return true;
  if (const auto* t = as<ast::Tuple>()) return t->first.is_pattern() && t->second.is_pattern();
  return false;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node_->v;
  const auto& y = b.node_->v;
  if (x.index() != y.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(y);
        if constexpr (std::is_same_v<T, ast::Literal>) {
          return lhs.value == rhs.value;
        } else if constexpr (std::is_same_v<T, ast::Var>) {
          return lhs.name == rhs.name;
        } else if constexpr (std::is_same_v<T, ast::Unary>) {
          return lhs.op == rhs.op && lhs.operand == rhs.operand;
        } else if constexpr (std::is_same_v<T, ast::Binary>) {
          return lhs.op == rhs.op && lhs.lhs == rhs.lhs && lhs.rhs == rhs.rhs;
        } else if constexpr (std::is_same_v<T, ast::Tuple>) {
          return lhs.first == rhs.first && lhs.second == rhs.second;
        } else {
          return lhs.function == rhs.function && lhs.args == rhs.args;
        }
      },
      x);
}

void FunctionTable::add(std::string name, Function fn) {
  for (std::size_t i = 0; i < fn.params.size(); ++i)
    for (std::size_t j = i + 1; j < fn.params.size(); ++j)
      if (fn.params[i] == fn.params[j])
        throw Error(ErrorCode::SyntaxError, "parameter '" + fn.params[i] + "' repeated in function '" + name + "'");
  if (fns_.count(name)) throw Error(ErrorCode::DuplicateFunction, "function '" + name + "' already defined");
  fns_.emplace(std::move(name), std::move(fn));
}

const Function* FunctionTable::find(std::string_view name) const {
  auto it = fns_.find(name);
  return it == fns_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

constexpr int kMaxNesting = 200;

class ExprParser {
 public:
  explicit ExprParser(TokenStream& ts) : ts_(ts) {}

  Expr expression() {
    if (++depth_ > kMaxNesting) ts_.fail_at(ts_.peek(), "expression nested too deeply");
    Expr e = or_expr();
    --depth_;
    return e;
  }

 private:
  Expr or_expr() {
    Expr lhs = and_expr();
    while (ts_.accept_word("or")) lhs = Expr::binary(BinaryOp::Or, lhs, and_expr());
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = cmp_expr();
    while (ts_.accept_word("and")) lhs = Expr::binary(BinaryOp::And, lhs, cmp_expr());
    return lhs;
  }

  Expr cmp_expr() {
    Expr lhs = add_expr();
    std::optional<BinaryOp> op;
    switch (ts_.peek().kind) {
      case Tok::Eq: op = BinaryOp::Eq; break;
      case Tok::Ne: op = BinaryOp::Ne; break;
      case Tok::Lt: op = BinaryOp::Lt; break;
      case Tok::Le: op = BinaryOp::Le; break;
      case Tok::Gt: op = BinaryOp::Gt; break;
      case Tok::Ge: op = BinaryOp::Ge; break;
      default: return lhs;
    }
    ts_.next();
    return Expr::binary(*op, lhs, add_expr());
  }

  Expr add_expr() {
    Expr lhs = mul_expr();
    while (true) {
      if (ts_.accept(Tok::Plus)) lhs = Expr::binary(BinaryOp::Add, lhs, mul_expr());
      else if (ts_.accept(Tok::Minus)) lhs = Expr::binary(BinaryOp::Sub, lhs, mul_expr());
      else return lhs;
    }
  }

  Expr mul_expr() {
    Expr lhs = unary();
    while (true) {
      if (ts_.accept(Tok::Star)) lhs = Expr::binary(BinaryOp::Mul, lhs, unary());
      else if (ts_.accept(Tok::Slash)) lhs = Expr::binary(BinaryOp::Div, lhs, unary());
      else if (ts_.accept_word("mod")) lhs = Expr::binary(BinaryOp::Mod, lhs, unary());
      else return lhs;
    }
  }

  Expr unary() {
    if (++depth_ > kMaxNesting) ts_.fail_at(ts_.peek(), "expression nested too deeply");
    Expr e = unary_inner();
    --depth_;
    return e;
  }

  Expr unary_inner() {
    if (ts_.accept_word("not")) return Expr::unary(UnaryOp::Not, unary());
    if (ts_.accept(Tok::Minus)) {
      // A minus sign directly before a number is part of the literal.
      if (ts_.at(Tok::Int) || ts_.at(Tok::Real)) return Expr::literal(number(ts_.next(), true));
      return Expr::unary(UnaryOp::Neg, unary());
    }
    return atom();
  }

  Value number(const detail::Token& t, bool negative) {
    if (t.kind == Tok::Real) {
      double d = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
      if (ec != std::errc{} || p != t.text.data() + t.text.size()) ts_.fail_at(t, "real literal out of range");
      try {
        return Value::real(negative ? -d : d);
      } catch (const Error&) {
        ts_.fail_at(t, "real literal out of range");
      }
    }
    std::uint64_t magnitude = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), magnitude);
    const std::uint64_t limit =
        static_cast<std::uint64_t>(std::numeric_limits<Int>::max()) + (negative ? 1u : 0u);
    if (ec != std::errc{} || magnitude > limit) ts_.fail_at(t, "integer literal out of range");
    if (!negative) return Value::integer(static_cast<Int>(magnitude));
    if (magnitude == limit) return Value::integer(std::numeric_limits<Int>::min());
    return Value::integer(-static_cast<Int>(magnitude));
  }

  Expr atom() {
    const detail::Token& t = ts_.peek();
    switch (t.kind) {
      case Tok::Int:
      case Tok::Real: return Expr::literal(number(ts_.next(), false));
      case Tok::String: return Expr::literal(Value::text(ts_.next().text));
      case Tok::LParen: {
        ts_.next();
        Expr first = expression();
        if (ts_.accept(Tok::Comma)) {
          Expr second = expression();
          ts_.expect(Tok::RParen, "')'");
          return Expr::tuple(first, second);
        }
        ts_.expect(Tok::RParen, "')' or ','");
        return first;
      }
      case Tok::Ident: {
        if (t.text == "true" || t.text == "false") return Expr::literal(Value::boolean(ts_.next().text == "true"));
        if (detail::is_expression_keyword(t.text)) ts_.fail("an expression");
        std::string name = ts_.next().text;
        if (!ts_.accept(Tok::LParen)) return Expr::var(std::move(name));
        std::vector<Expr> args;
        if (!ts_.accept(Tok::RParen)) {
          do args.push_back(expression());
          while (ts_.accept(Tok::Comma));
          ts_.expect(Tok::RParen, "')' or ','");
        }
        return Expr::call(std::move(name), std::move(args));
      }
      default: ts_.fail("an expression");
    }
  }

  TokenStream& ts_;
  int depth_ = 0;
};

std::string plain_ident(TokenStream& ts, std::string_view what) {
  const auto& t = ts.peek();
  auto name = ts.expect_ident(what);
  if (detail::is_expression_keyword(name)) ts.fail_at(t, "reserved word '" + name + "' cannot be a " + std::string(what));
  return name;
}

}  // namespace

Expr parse_expression(std::string_view text) {
  TokenStream ts(text);
  if (ts.at(Tok::End)) ts.fail("an expression");
  Expr e = ExprParser(ts).expression();
  if (!ts.at(Tok::End)) ts.fail("end of expression");
  return e;
}

ArcInscription parse_arc_inscription(std::string_view text) {
  TokenStream ts(text);
  if (ts.at(Tok::End)) ts.fail("an inscription");
  ExprParser parser(ts);
  ArcInscription out{parser.expression(), std::nullopt};
  if (ts.at(Tok::DelayMark)) {
    const auto& mark = ts.next();
    if (ts.at(Tok::End))
      throw Error(ErrorCode::DelaySyntaxError, "line " + std::to_string(mark.line) + ", column " +
                                                   std::to_string(mark.column) + ": '@+' must be followed by a delay expression");
    out.delay = parser.expression();
  }
  if (!ts.at(Tok::End)) ts.fail("end of inscription");
  return out;
}

void parse_function_definitions(std::string_view text, FunctionTable& into) {
  TokenStream ts(text);
  while (!ts.at(Tok::End)) {
    ts.expect_word("fun");
    const auto& name_tok = ts.peek();
    std::string name = plain_ident(ts, "function name");
    ts.expect(Tok::LParen, "'('");
    Function fn{{}, Expr::literal(Value::integer(0))};
    if (!ts.accept(Tok::RParen)) {
      do fn.params.push_back(plain_ident(ts, "parameter name"));
      while (ts.accept(Tok::Comma));
      ts.expect(Tok::RParen, "')' or ','");
    }
    ts.expect(Tok::Assign, "'='");
    fn.body = ExprParser(ts).expression();
    ts.expect(Tok::Semicolon, "';'");
    try {
      into.add(std::move(name), std::move(fn));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(name_tok.line) + ": " + e.detail());
    }
  }
}

FunctionTable parse_function_definitions(std::string_view text) {
  FunctionTable table;
  parse_function_definitions(text, table);
  return table;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

[[noreturn]] void type_error(std::string msg) { throw Error(ErrorCode::TypeErrorAtRuntime, std::move(msg)); }

[[noreturn]] void overflow() { throw Error(ErrorCode::ArithmeticOverflow, "integer overflow"); }

std::string kind_name(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return "int";
    case Value::Kind::Real: return "real";
    case Value::Kind::String: return "string";
    case Value::Kind::Bool: return "bool";
    case Value::Kind::Enum: return "enum";
    case Value::Kind::Pair: return "pair";
  }
  return "?";
}

[[noreturn]] void operand_error(BinaryOp op, const Value& a, const Value& b) {
  type_error("operator '" + std::string(op_symbol(op)) + "' not defined for " + kind_name(a) + " and " + kind_name(b));
}

bool values_equal(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric() && a.kind() != b.kind()) return a.as_number() == b.as_number();
  return a == b;
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
  if (op == BinaryOp::Add && a.is_string() && b.is_string()) return Value::text(a.as_string() + b.as_string());
  if (!a.is_numeric() || !b.is_numeric()) operand_error(op, a, b);
  if (a.is_int() && b.is_int()) {
    const Int x = a.as_int(), y = b.as_int();
    Int r = 0;
    switch (op) {
      case BinaryOp::Add:
        if (__builtin_add_overflow(x, y, &r)) overflow();
        return Value::integer(r);
      case BinaryOp::Sub:
        if (__builtin_sub_overflow(x, y, &r)) overflow();
        return Value::integer(r);
      case BinaryOp::Mul:
        if (__builtin_mul_overflow(x, y, &r)) overflow();
        return Value::integer(r);
      case BinaryOp::Div:
        if (y == 0) throw Error(ErrorCode::DivisionByZero, "integer division by zero");
        if (x == std::numeric_limits<Int>::min() && y == -1) overflow();
        return Value::integer(x / y);
      case BinaryOp::Mod:
        if (y == 0) throw Error(ErrorCode::DivisionByZero, "mod by zero");
        if (y == -1) return Value::integer(0);
        return Value::integer(x % y);
      default: break;
    }
  }
  if (op == BinaryOp::Mod) operand_error(op, a, b);
  const double x = a.as_number(), y = b.as_number();
  switch (op) {
    case BinaryOp::Add: return Value::real(x + y);
    case BinaryOp::Sub: return Value::real(x - y);
    case BinaryOp::Mul: return Value::real(x * y);
    case BinaryOp::Div:
      if (y == 0.0) throw Error(ErrorCode::DivisionByZero, "real division by zero");
      return Value::real(x / y);
    default: break;
  }
  operand_error(op, a, b);
}

bool ordering(BinaryOp op, const Value& a, const Value& b) {
  int c = 0;
  if (a.is_numeric() && b.is_numeric()) {
    if (a.is_int() && b.is_int()) c = a.as_int() < b.as_int() ? -1 : (a.as_int() > b.as_int() ? 1 : 0);
    else c = a.as_number() < b.as_number() ? -1 : (a.as_number() > b.as_number() ? 1 : 0);
  } else if (a.is_string() && b.is_string()) {
    c = a.as_string().compare(b.as_string());
  } else {
    operand_error(op, a, b);
  }
  switch (op) {
    case BinaryOp::Lt: return c < 0;
    case BinaryOp::Le: return c <= 0;
    case BinaryOp::Gt: return c > 0;
    default: return c >= 0;
  }
}

class Evaluator {
 public:
  explicit Evaluator(const FunctionTable& fns) : fns_(fns) {}

  Value eval(const Expr& e, const Env& env) {
    return std::visit([&](const auto& n) { return eval_node(n, env); }, e.node().v);
  }

 private:
  Value eval_node(const ast::Literal& n, const Env&) { return n.value; }

  Value eval_node(const ast::Var& n, const Env& env) {
    auto it = env.find(n.name);
    if (it == env.end()) throw Error(ErrorCode::UnboundVariable, "variable '" + n.name + "' is not bound");
    return it->second;
  }

  Value eval_node(const ast::Unary& n, const Env& env) {
    Value v = eval(n.operand, env);
    if (n.op == UnaryOp::Not) {
      if (!v.is_bool()) type_error("'not' expects bool, got " + kind_name(v));
      return Value::boolean(!v.as_bool());
    }
    if (v.is_int()) {
      if (v.as_int() == std::numeric_limits<Int>::min()) overflow();
      return Value::integer(-v.as_int());
    }
    if (v.is_real()) return Value::real(-v.as_real());
    type_error("unary '-' expects a number, got " + kind_name(v));
  }

  Value eval_node(const ast::Binary& n, const Env& env) {
    Value a = eval(n.lhs, env);
    Value b = eval(n.rhs, env);
    switch (n.op) {
      case BinaryOp::Eq: return Value::boolean(values_equal(a, b));
      case BinaryOp::Ne: return Value::boolean(!values_equal(a, b));
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: return Value::boolean(ordering(n.op, a, b));
      case BinaryOp::And:
      case BinaryOp::Or:
        if (!a.is_bool() || !b.is_bool()) operand_error(n.op, a, b);
        return Value::boolean(n.op == BinaryOp::And ? (a.as_bool() && b.as_bool()) : (a.as_bool() || b.as_bool()));
      default: return arithmetic(n.op, a, b);
    }
  }

  Value eval_node(const ast::Tuple& n, const Env& env) {
    Value a = eval(n.first, env);
    return Value::pair(std::move(a), eval(n.second, env));
  }

  Value eval_node(const ast::Call& n, const Env& env) {
    const Function* fn = fns_.find(n.function);
    if (!fn) throw Error(ErrorCode::UnknownFunction, "function '" + n.function + "' is not defined");
    if (fn->params.size() != n.args.size())
      throw Error(ErrorCode::ArityMismatch, "function '" + n.function + "' expects " +
                                                std::to_string(fn->params.size()) + " argument(s), got " +
                                                std::to_string(n.args.size()));
    Env local;
    for (std::size_t i = 0; i < n.args.size(); ++i) local.insert_or_assign(fn->params[i], eval(n.args[i], env));
    if (++depth_ > kMaxCallDepth)
      throw Error(ErrorCode::RecursionLimitExceeded,
                  "call depth exceeded " + std::to_string(kMaxCallDepth) + " in '" + n.function + "'");
    Value result = eval(fn->body, local);
    --depth_;
    return result;
  }

  const FunctionTable& fns_;
  int depth_ = 0;
};

void collect_vars(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ast::Var>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, ast::Unary>) {
          collect_vars(n.operand, out);
        } else if constexpr (std::is_same_v<T, ast::Binary>) {
          collect_vars(n.lhs, out);
          collect_vars(n.rhs, out);
        } else if constexpr (std::is_same_v<T, ast::Tuple>) {
          collect_vars(n.first, out);
          collect_vars(n.second, out);
        } else if constexpr (std::is_same_v<T, ast::Call>) {
          for (const auto& a : n.args) collect_vars(a, out);
        }
      },
      e.node().v);
}

bool unify(const Expr& p, const Value& v, Env& env) {
  if (const auto* var = p.as<ast::Var>()) {
    auto [it, inserted] = env.try_emplace(var->name, v);
    return inserted || it->second == v;
  }
  if (const auto* lit = p.as<ast::Literal>()) return lit->value == v;
  const auto& t = *p.as<ast::Tuple>();
  return v.is_pair() && unify(t.first, v.first(), env) && unify(t.second, v.second(), env);
}

}  // namespace

Value evaluate(const Expr& expr, const Env& env, const FunctionTable& functions) {
  return Evaluator(functions).eval(expr, env);
}

std::set<std::string> free_variables(const Expr& expr) {
  std::set<std::string> out;
  collect_vars(expr, out);
  return out;
}

std::optional<Env> match_pattern(const Expr& pattern, const Value& value, const Env& partial) {
  if (!pattern.is_pattern())
    throw Error(ErrorCode::NotAPattern, "'" + pretty_print(pattern) + "' contains operators or calls");
  Env env = partial;
  if (!unify(pattern, value, env)) return std::nullopt;
  return env;
}

}  // namespace cpn
