#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cpnkit/colorset.hpp"
#include "cpnkit/expr.hpp"
#include "cpnkit/value.hpp"

namespace cpn {

/// Model time in integer units. Never negative.
using Time = std::int64_t;

struct Place {
  std::string name;
  std::string color_set;

  friend bool operator==(const Place&, const Place&) = default;
};

struct Transition {
  std::string name;
  std::vector<std::string> variables;
  std::optional<Expr> guard;
  Time delay = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Place->transition (input) or transition->place (output) arc, identified by
/// endpoint names. The inscription is only absent on hierarchy socket arcs.
struct Arc {
  std::string source;
  std::string target;
  std::optional<ArcInscription> inscription;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Unvalidated net description, as read from a document or built in code.
struct NetDefinition {
  ColorSetRegistry color_sets;
  FunctionTable functions;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;

  friend bool operator==(const NetDefinition&, const NetDefinition&) = default;
};

enum class ViolationKind {
  DuplicateName,
  InvalidName,
  DuplicateVariable,
  UnknownColorSet,
  DanglingEndpoint,
  InvalidArcEndpoints,
  MissingInscription,
  DelayOnInputArc,
  UndeclaredVariable,
  AmbiguousEnumLiteral,
  BindingIncomplete,
  NegativeTransitionDelay,
  UnknownFunction,
  ArityMismatch,
};

std::string_view violation_name(ViolationKind kind) noexcept;

enum class Element { Place, Transition, Arc, Function };

struct Violation {
  ViolationKind kind;
  std::string detail;
  Element element;
  std::size_t index = 0;  // position in the owning list (functions: alphabetical)
  std::string field;      // e.g. "guard", "inscription"; may be empty

  /// Document path such as "transitions[0].guard".
  std::string path() const;
  std::string to_string() const;
};

/// Every well-formedness violation of `def`; empty means valid.
std::vector<Violation> validate_net(const NetDefinition& def);

struct Token {
  Value value;
  Time timestamp = 0;

  friend bool operator==(const Token&, const Token&) = default;
  friend std::strong_ordering operator<=>(const Token&, const Token&) = default;
};

/// "1@0"
std::string format_token(const Token& t);

/// Token multisets per place (by net place index) plus the global clock.
/// Tokens keep insertion order for display; equality is multiset equality.
class Marking {
 public:
  Marking() = default;
  explicit Marking(std::size_t num_places) : places_(num_places) {}

  std::size_t num_places() const noexcept { return places_.size(); }
  const std::vector<Token>& tokens(std::size_t place) const { return places_.at(place); }
  std::size_t count(std::size_t place) const { return places_.at(place).size(); }

  void add(std::size_t place, Token token) { places_.at(place).push_back(std::move(token)); }
  /// Removes one occurrence; false if absent.
  bool remove(std::size_t place, const Token& token);

  Time global_clock() const noexcept { return clock_; }
  void set_global_clock(Time t) { clock_ = t; }

  friend bool operator==(const Marking& a, const Marking& b);

 private:
  std::vector<std::vector<Token>> places_;
  Time clock_ = 0;
};

/// Tokens in canonical order: value, then timestamp.
std::vector<Token> sorted_tokens(const std::vector<Token>& tokens);

/// Marking content keyed by place name; used before a net exists.
struct InitialMarking {
  Time global_clock = 0;
  std::map<std::string, std::vector<Token>, std::less<>> tokens;

  friend bool operator==(const InitialMarking&, const InitialMarking&) = default;
};

/// Validated, immutable net with enum literals resolved and arcs indexed.
class Net {
 public:
  /// Input arc as used by the binding search.
  struct InputArc {
    std::size_t arc;    // declaration index
    std::size_t place;  // place index
    Expr body;          // literal-resolved
    int rank;           // 0 var, 1 literal, 2 tuple pattern, 3 non-pattern
  };
  struct OutputArc {
    std::size_t arc;
    std::size_t place;
    Expr body;
    std::optional<Expr> delay;
  };

  /// Throws Error(ValidationFailed) listing every violation.
  static Net compile(NetDefinition def);

  const NetDefinition& definition() const noexcept { return def_; }
  const ColorSetRegistry& color_sets() const noexcept { return def_.color_sets; }
  /// Function table with enum literals resolved; use for evaluation.
  const FunctionTable& functions() const noexcept { return functions_; }

  std::size_t num_places() const noexcept { return def_.places.size(); }
  std::size_t num_transitions() const noexcept { return def_.transitions.size(); }
  const Place& place(std::size_t i) const { return def_.places.at(i); }
  const Transition& transition(std::size_t i) const { return def_.transitions.at(i); }
  std::optional<std::size_t> find_place(std::string_view name) const;
  std::optional<std::size_t> find_transition(std::string_view name) const;
  std::size_t place_index(std::string_view name) const;       // throws UnknownPlace
  std::size_t transition_index(std::string_view name) const;  // throws UnknownTransition

  bool is_timed(std::size_t place) const { return timed_.at(place); }
  bool has_timed_places() const;

  /// Input arcs in binding-search order (pattern rank, then declaration).
  const std::vector<InputArc>& inputs(std::size_t transition) const { return inputs_.at(transition); }
  /// Output arcs in declaration order.
  const std::vector<OutputArc>& outputs(std::size_t transition) const { return outputs_.at(transition); }
  const std::optional<Expr>& guard(std::size_t transition) const { return guards_.at(transition); }

  Marking empty_marking() const { return Marking(num_places()); }
  /// Throws UnknownPlace, ColorMismatch, or SchemaError for negative or
  /// non-zero timestamps in untimed places.
  Marking make_marking(const InitialMarking& init) const;
  InitialMarking to_initial(const Marking& m) const;

 private:
  NetDefinition def_;
  FunctionTable functions_;
  std::unordered_map<std::string, std::size_t> place_ids_;
  std::unordered_map<std::string, std::size_t> transition_ids_;
  std::vector<bool> timed_;
  std::vector<std::vector<InputArc>> inputs_;
  std::vector<std::vector<OutputArc>> outputs_;
  std::vector<std::optional<Expr>> guards_;
};

/// "P_In: [1@0, -1@0]; P_Out: []; clock=0"
std::string format_marking(const Net& net, const Marking& m);

}  // namespace cpn
