#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>

namespace cpn {

using Int = std::int64_t;

struct EnumValue {
  std::string set;
  std::string literal;

  friend bool operator==(const EnumValue&, const EnumValue&) = default;
  friend auto operator<=>(const EnumValue&, const EnumValue&) = default;
};

/// Token and expression value: integer, real, text, boolean, enum literal or pair.
///
/// Values are immutable; pairs share their components. The comparison
/// operators define the canonical total order used wherever tokens are
/// sorted (kind first, in declaration order of Kind, then by content).
/// Reals are always finite and -0.0 is normalized to 0.0.
class Value {
 public:
  enum class Kind { Int, Real, String, Bool, Enum, Pair };

  Value() : data_(Int{0}) {}

  static Value integer(Int v) { return Value(Data(v)); }
  static Value real(double v);
  static Value text(std::string v) { return Value(Data(std::move(v))); }
  static Value boolean(bool v) { return Value(Data(v)); }
  static Value enumerated(std::string set, std::string literal) {
    return Value(Data(EnumValue{std::move(set), std::move(literal)}));
  }
  static Value pair(Value first, Value second);

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_int() const noexcept { return kind() == Kind::Int; }
  bool is_real() const noexcept { return kind() == Kind::Real; }
  bool is_numeric() const noexcept { return is_int() || is_real(); }
  bool is_string() const noexcept { return kind() == Kind::String; }
  bool is_bool() const noexcept { return kind() == Kind::Bool; }
  bool is_enum() const noexcept { return kind() == Kind::Enum; }
  bool is_pair() const noexcept { return kind() == Kind::Pair; }

  Int as_int() const { return std::get<Int>(data_); }
  double as_real() const { return std::get<double>(data_); }
  /// Numeric value as double; valid for Int and Real.
  double as_number() const { return is_int() ? static_cast<double>(as_int()) : as_real(); }
  const std::string& as_string() const { return std::get<std::string>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const EnumValue& as_enum() const { return std::get<EnumValue>(data_); }
  const Value& first() const;
  const Value& second() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

 private:
  struct PairBox;
  using Data = std::variant<Int, double, std::string, bool, EnumValue, std::shared_ptr<const PairBox>>;

  explicit Value(Data d) : data_(std::move(d)) {}

  Data data_;
};

struct Value::PairBox {
  Value first;
  Value second;
};

/// Variable environment. Ordered by name so that iteration is deterministic.
using Env = std::map<std::string, Value, std::less<>>;

/// Canonical human-readable text of a value in expression-literal syntax:
/// 1, 2.5, "text", true, red, (1, "a").
std::string format_value(const Value& v);

/// Canonical text of a real so that it re-lexes as a REAL literal
/// (always contains a decimal point, shortest round-trip digits).
std::string format_real(double v);

/// Appends a self-delimiting, injective binary encoding of `v` to `out`.
void encode_value(const Value& v, std::string& out);

/// "x=1;y=(2, 3)" in variable name order.
std::string format_env(const Env& env);

}  // namespace cpn
