#include "cpnkit/expr.hpp"

namespace cpn {

namespace {

// Binding strength, loosest first. Mirrors the parser's grammar levels.
enum Level : int { kOr = 1, kAnd, kCmp, kAdd, kMul, kUnary, kAtom };

int binary_level(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return kOr;
    case BinaryOp::And: return kAnd;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return kCmp;
    case BinaryOp::Add:
    case BinaryOp::Sub: return kAdd;
    default: return kMul;
  }
}

int level_of(const Expr& e) {
  if (const auto* b = e.as<ast::Binary>()) return binary_level(b->op);
  if (e.as<ast::Unary>()) return kUnary;
  return kAtom;
}

void print(const Expr& e, int min_level, std::string& out);

void print_node(const ast::Literal& n, std::string& out) { out += format_value(n.value); }
void print_node(const ast::Var& n, std::string& out) { out += n.name; }

void print_node(const ast::Unary& n, std::string& out) {
  if (n.op == UnaryOp::Not) {
    out += "not ";
    print(n.operand, kUnary, out);
    return;
  }
  out += '-';
  // "-1" would re-parse as a negative literal, so negated numbers keep parentheses.
  const auto* lit = n.operand.as<ast::Literal>();
  if (lit && lit->value.is_numeric()) {
    out += '(';
    print(n.operand, kOr, out);
    out += ')';
  } else {
    print(n.operand, kUnary, out);
  }
}

void print_node(const ast::Binary& n, std::string& out) {
  const int level = binary_level(n.op);
  // Comparisons are non-associative; everything else associates to the left.
  print(n.lhs, level == kCmp ? kAdd : level, out);
  out += ' ';
  out += op_symbol(n.op);
  out += ' ';
  print(n.rhs, level + 1, out);
}

void print_node(const ast::Tuple& n, std::string& out) {
  out += '(';
  print(n.first, kOr, out);
  out += ", ";
  print(n.second, kOr, out);
  out += ')';
}

void print_node(const ast::Call& n, std::string& out) {
  out += n.function;
  out += '(';
  for (std::size_t i = 0; i < n.args.size(); ++i) {
    if (i) out += ", ";
    print(n.args[i], kOr, out);
  }
  out += ')';
}

void print(const Expr& e, int min_level, std::string& out) {
  const bool parens = level_of(e) < min_level;
  if (parens) out += '(';
  std::visit([&](const auto& n) { print_node(n, out); }, e.node().v);
  if (parens) out += ')';
}

}  // namespace

std::string pretty_print(const Expr& expr) {
  std::string out;
  print(expr, kOr, out);
  return out;
}

std::string pretty_print(const ArcInscription& inscription) {
  std::string out = pretty_print(inscription.body);
  if (inscription.delay) out += " @+" + pretty_print(*inscription.delay);
  return out;
}

std::string pretty_print(std::string_view name, const Function& fn) {
  std::string out = "fun ";
  out += name;
  out += '(';
  for (std::size_t i = 0; i < fn.params.size(); ++i) {
    if (i) out += ", ";
    out += fn.params[i];
  }
  out += ") = " + pretty_print(fn.body) + ';';
  return out;
}

}  // namespace cpn
