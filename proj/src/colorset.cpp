#include "cpnkit/colorset.hpp"

#include <algorithm>
#include <cctype>

#include "cpnkit/error.hpp"
#include "lexer.hpp"

namespace cpn {

namespace {

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

void ColorSetRegistry::add(ColorSet cs) {
  if (cs.name.empty()) throw Error(ErrorCode::SyntaxError, "color set name must not be empty");
  if (contains(cs.name)) throw Error(ErrorCode::DuplicateColorSet, "color set '" + cs.name + "' already declared");
  switch (cs.kind) {
    case ColorKind::Enumerated: {
      if (cs.literals.empty())
        throw Error(ErrorCode::SyntaxError, "enumerated color set '" + cs.name + "' has no literals");
      std::vector<std::string> seen;
      for (const auto& lit : cs.literals) {
        if (lit.empty()) throw Error(ErrorCode::SyntaxError, "empty literal in '" + cs.name + "'");
        auto key = lowered(lit);
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
          throw Error(ErrorCode::DuplicateLiteral, "literal '" + lit + "' repeated in '" + cs.name + "'");
        seen.push_back(std::move(key));
      }
      break;
    }
    case ColorKind::Product:
      for (const auto* component : {&cs.left, &cs.right})
        if (!contains(*component))
          throw Error(ErrorCode::UnknownColorSet,
                      "product '" + cs.name + "' references undeclared color set '" + *component + "'");
      break;
    default: break;
  }
  index_.emplace(cs.name, sets_.size());
  sets_.push_back(std::move(cs));
}

const ColorSet* ColorSetRegistry::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &sets_[it->second];
}

const ColorSet& ColorSetRegistry::at(std::string_view name) const {
  if (const auto* cs = find(name)) return *cs;
  throw Error(ErrorCode::UnknownColorSet, "unknown color set '" + std::string(name) + "'");
}

bool ColorSetRegistry::is_member(std::string_view set_name, const Value& value) const {
  const ColorSet& cs = at(set_name);
  switch (cs.kind) {
    case ColorKind::Int: return value.is_int();
    case ColorKind::Real: return value.is_numeric();
    case ColorKind::String: return value.is_string();
    case ColorKind::Enumerated:
      return value.is_enum() && value.as_enum().set == cs.name &&
             std::find(cs.literals.begin(), cs.literals.end(), value.as_enum().literal) != cs.literals.end();
    case ColorKind::Product:
      return value.is_pair() && is_member(cs.left, value.first()) && is_member(cs.right, value.second());
  }
  return false;
}

void parse_colorset_definitions(std::string_view text, ColorSetRegistry& into, std::vector<std::string>* warnings) {
  detail::TokenStream ts(text);
  while (!ts.at(detail::Tok::End)) {
    const auto& start = ts.peek();
    ts.expect_word("colset");
    ColorSet cs;
    cs.name = ts.expect_ident("color set name");
    ts.expect(detail::Tok::Assign, "'='");
    if (ts.accept_word("int")) {
      cs.kind = ColorKind::Int;
    } else if (ts.accept_word("real")) {
      cs.kind = ColorKind::Real;
    } else if (ts.accept_word("string")) {
      cs.kind = ColorKind::String;
    } else if (ts.accept_word("with")) {
      cs.kind = ColorKind::Enumerated;
      do {
        const auto& lit = ts.peek();
        auto name = ts.expect_ident("enumeration literal");
        if (detail::is_expression_keyword(name) || name == "timed")
          ts.fail_at(lit, "reserved word '" + name + "' cannot be an enumeration literal");
        cs.literals.push_back(std::move(name));
      } while (ts.accept(detail::Tok::Bar));
    } else if (ts.accept_word("product")) {
      cs.kind = ColorKind::Product;
      cs.left = ts.expect_ident("color set name");
      ts.expect(detail::Tok::Star, "'*'");
      cs.right = ts.expect_ident("color set name");
    } else {
      ts.fail("'int', 'real', 'string', 'with' or 'product'");
    }
    cs.timed = ts.accept_word("timed");
    ts.expect(detail::Tok::Semicolon, "';'");

    if (cs.kind == ColorKind::Product && warnings) {
      for (const auto* component : {&cs.left, &cs.right}) {
        const auto* c = into.find(*component);
        if (c && c->timed)
          warnings->push_back("line " + std::to_string(start.line) + ": timed flag of component '" + *component +
                              "' is ignored inside product '" + cs.name + "'");
      }
    }
    try {
      into.add(std::move(cs));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(start.line) + ": " + e.detail());
    }
  }
}

ColorSetRegistry parse_colorset_definitions(std::string_view text, std::vector<std::string>* warnings) {
  ColorSetRegistry reg;
  parse_colorset_definitions(text, reg, warnings);
  return reg;
}

std::string format_colorset(const ColorSet& cs) {
  std::string out = "colset " + cs.name + " = ";
  switch (cs.kind) {
    case ColorKind::Int: out += "int"; break;
    case ColorKind::Real: out += "real"; break;
    case ColorKind::String: out += "string"; break;
    case ColorKind::Enumerated:
      out += "with ";
      for (std::size_t i = 0; i < cs.literals.size(); ++i) {
        if (i) out += " | ";
        out += cs.literals[i];
      }
      break;
    case ColorKind::Product: out += "product " + cs.left + " * " + cs.right; break;
  }
  if (cs.timed) out += " timed";
  out += ';';
  return out;
}

Value default_member(const ColorSetRegistry& registry, std::string_view set_name) {
  const ColorSet& cs = registry.at(set_name);
  switch (cs.kind) {
    case ColorKind::Int: return Value::integer(0);
    case ColorKind::Real: return Value::real(0.0);
    case ColorKind::String: return Value::text("");
    case ColorKind::Enumerated: return Value::enumerated(cs.name, cs.literals.front());
    case ColorKind::Product:
      return Value::pair(default_member(registry, cs.left), default_member(registry, cs.right));
  }
  return Value{};
}

}  // namespace cpn
