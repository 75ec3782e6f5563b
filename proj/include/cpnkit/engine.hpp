#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cpnkit/net.hpp"

namespace cpn {

/// Timed honors timestamps and delays. Ignore treats every token as available
/// and produces all tokens at timestamp 0 (state-space strip-time mode).
enum class TimeMode { Timed, Ignore };

struct ConsumedToken {
  std::size_t arc;    // declaration index of the input arc
  std::size_t place;  // place index
  Token token;

  friend bool operator==(const ConsumedToken&, const ConsumedToken&) = default;
};

/// One enabling assignment: a value per transition variable plus the token
/// instances it consumes, listed in arc declaration order.
struct Binding {
  Env env;
  std::vector<ConsumedToken> consumed;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct PlacedToken {
  std::string place;
  Token token;

  friend bool operator==(const PlacedToken&, const PlacedToken&) = default;
};

struct FiringRecord {
  std::size_t index = 0;  // position within a trace; 0 outside simulation
  std::string transition;
  Env env;
  std::vector<PlacedToken> consumed;
  std::vector<PlacedToken> produced;
  Time clock = 0;  // global clock at firing

  friend bool operator==(const FiringRecord&, const FiringRecord&) = default;
};

struct EnabledTransition {
  std::size_t transition;
  std::vector<Binding> bindings;
};

/// Every binding of `transition` at the marking's clock, in deterministic
/// depth-first order. Among equal-valued candidate tokens only the one with the
/// smallest timestamp is tried. Evaluation errors propagate with context.
std::vector<Binding> find_bindings(const Net& net, std::size_t transition, const Marking& marking,
                                   TimeMode mode = TimeMode::Timed);

bool is_enabled(const Net& net, std::size_t transition, const Marking& marking, TimeMode mode = TimeMode::Timed);

/// Fires `transition`, choosing the first binding, or the one whose
/// environment equals `env` when given. Throws NotEnabled, ColorMismatch,
/// NegativeDelay, or evaluation errors; the marking is untouched on error.
/// Does not move the global clock.
FiringRecord fire_transition(const Net& net, std::size_t transition, Marking& marking,
                             const std::optional<Env>& env = std::nullopt, TimeMode mode = TimeMode::Timed);

/// Fires a binding previously returned by find_bindings on this marking.
FiringRecord apply_binding(const Net& net, std::size_t transition, Marking& marking, const Binding& binding,
                           TimeMode mode = TimeMode::Timed);

/// Moves the clock to the smallest timestamp strictly after it; returns the
/// (possibly unchanged) clock.
Time advance_global_clock(const Net& net, Marking& marking);

/// Smallest token timestamp strictly after the clock, if any.
std::optional<Time> next_token_time(const Marking& marking);

/// Transitions with at least one binding, in declaration order.
std::vector<EnabledTransition> enabled_transitions(const Net& net, const Marking& marking,
                                                   TimeMode mode = TimeMode::Timed);

}  // namespace cpn
