#include "cpnkit/value.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

#include "cpnkit/error.hpp"

namespace cpn {

Value Value::real(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::ArithmeticOverflow, "non-finite real value");
  if (v == 0.0) v = 0.0;  // drops the sign of -0.0
  return Value(Data(v));
}

Value Value::pair(Value first, Value second) {
  return Value(Data(std::make_shared<const PairBox>(PairBox{std::move(first), std::move(second)})));
}

const Value& Value::first() const { return std::get<std::shared_ptr<const PairBox>>(data_)->first; }
const Value& Value::second() const { return std::get<std::shared_ptr<const PairBox>>(data_)->second; }

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
  switch (a.kind()) {
    case Value::Kind::Int: return a.as_int() <=> b.as_int();
    case Value::Kind::Real: {
      const double x = a.as_real(), y = b.as_real();
      if (x < y) return std::strong_ordering::less;
      if (y < x) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case Value::Kind::String: return a.as_string().compare(b.as_string()) <=> 0;
    case Value::Kind::Bool: return a.as_bool() <=> b.as_bool();
    case Value::Kind::Enum: return a.as_enum() <=> b.as_enum();
    case Value::Kind::Pair: {
      if (auto c = a.first() <=> b.first(); c != 0) return c;
      return a.second() <=> b.second();
    }
  }
  return std::strong_ordering::equal;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  const auto exp = s.find_first_of("eE");
  const auto mantissa = s.substr(0, exp);
  if (mantissa.find('.') == std::string::npos) {
    s.insert(exp == std::string::npos ? s.size() : exp, ".0");
  }
  return s;
}

namespace {

void quote_into(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
}

void format_into(const Value& v, std::string& out) {
  switch (v.kind()) {
    case Value::Kind::Int: out += std::to_string(v.as_int()); break;
    case Value::Kind::Real: out += format_real(v.as_real()); break;
    case Value::Kind::String: quote_into(v.as_string(), out); break;
    case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Value::Kind::Enum: out += v.as_enum().literal; break;
    case Value::Kind::Pair:
      out += '(';
      format_into(v.first(), out);
      out += ", ";
      format_into(v.second(), out);
      out += ')';
      break;
  }
}

void put_u64(std::uint64_t x, std::string& out) {
  for (int i = 7; i >= 0; --i) out += static_cast<char>((x >> (8 * i)) & 0xff);
}

void put_str(const std::string& s, std::string& out) {
  put_u64(s.size(), out);
  out += s;
}

}  // namespace

std::string format_value(const Value& v) {
  std::string out;
  format_into(v, out);
  return out;
}

void encode_value(const Value& v, std::string& out) {
  out += static_cast<char>('0' + static_cast<int>(v.kind()));
  switch (v.kind()) {
    case Value::Kind::Int: put_u64(static_cast<std::uint64_t>(v.as_int()), out); break;
    case Value::Kind::Real: {
      std::uint64_t bits;
      const double d = v.as_real();
      std::memcpy(&bits, &d, sizeof bits);
      put_u64(bits, out);
      break;
    }
    case Value::Kind::String: put_str(v.as_string(), out); break;
    case Value::Kind::Bool: out += v.as_bool() ? '1' : '0'; break;
    case Value::Kind::Enum:
      put_str(v.as_enum().set, out);
      put_str(v.as_enum().literal, out);
      break;
    case Value::Kind::Pair:
      encode_value(v.first(), out);
      encode_value(v.second(), out);
      break;
  }
}

std::string format_env(const Env& env) {
  std::string out;
  for (const auto& [name, value] : env) {
    if (!out.empty()) out += ';';
    out += name;
    out += '=';
    format_into(value, out);
  }
  return out;
}

}  // namespace cpn
