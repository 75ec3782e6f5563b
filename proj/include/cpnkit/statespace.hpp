#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpnkit/engine.hpp"
#include "cpnkit/net.hpp"

namespace cpn {

/// Injective byte encoding of a marking's per-place value multisets.
/// Timestamps and the global clock are excluded.
class StateKey {
 public:
  StateKey() = default;
  static StateKey of(const Marking& m);

  const std::string& bytes() const noexcept { return bytes_; }

  friend bool operator==(const StateKey&, const StateKey&) = default;
  friend auto operator<=>(const StateKey&, const StateKey&) = default;

 private:
  std::string bytes_;
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& k) const noexcept { return std::hash<std::string>{}(k.bytes()); }
};

struct ExploreLimits {
  std::size_t max_states = 100000;
  std::size_t max_edges = 500000;
  bool strip_time = false;
};

struct ReachEdge {
  std::size_t source;
  std::size_t transition;
  Env env;
  std::size_t target;
};

/// Reachability graph. Node ids follow breadth-first discovery order; node 0 is initial.
struct ReachGraph {
  std::vector<StateKey> keys;
  std::vector<Marking> markings;
  std::vector<bool> expanded;  // false for frontier nodes left when a limit hit
  std::vector<ReachEdge> edges;
  std::unordered_map<StateKey, std::size_t, StateKeyHash> index;
  bool truncated = false;

  std::size_t num_states() const noexcept { return keys.size(); }
  std::optional<std::size_t> find(const StateKey& key) const;
};

struct SccGraph {
  std::vector<std::vector<std::size_t>> components;  // node ids, ascending
  std::vector<std::size_t> component_of;             // node id -> component
  std::set<std::pair<std::size_t, std::size_t>> condensation;
  std::vector<std::size_t> terminal;  // components with no outgoing condensation edge
};

struct PlaceBound {
  std::size_t min = 0;
  std::size_t max = 0;
};

struct TransitionClasses {
  std::vector<std::string> dead;
  std::vector<std::string> live;
  std::vector<std::string> impartial;
};

/// Optional fields are absent when the graph was truncated.
struct SpaceReport {
  std::size_t num_states = 0;
  std::size_t num_edges = 0;
  std::size_t num_sccs = 0;
  bool truncated = false;
  std::optional<std::vector<std::string>> home_markings;
  std::vector<std::string> dead_markings;
  std::optional<std::vector<std::string>> dead_transitions;
  std::optional<std::vector<std::string>> live_transitions;
  std::optional<std::vector<std::string>> impartial_transitions;
  std::vector<std::pair<std::string, PlaceBound>> place_bounds;  // declaration order
};

/// Breadth-first exploration. Throws TimedNetUnsupported for nets with timed
/// places unless `limits.strip_time`, and LimitZero for zero limits.
ReachGraph build_reachability_graph(const Net& net, const Marking& initial, const ExploreLimits& limits = {});

/// Tarjan's algorithm; components are numbered in reverse topological order of discovery.
SccGraph scc_decomposition(const ReachGraph& rg);

/// States of the unique terminal component, or none. Throws HomeUndecidable if truncated.
std::vector<std::size_t> home_markings(const ReachGraph& rg, const SccGraph& scc);

/// Expanded states without outgoing edges.
std::vector<std::size_t> dead_markings(const ReachGraph& rg);

/// Throws LivenessUndecidable if truncated.
TransitionClasses transition_classes(const ReachGraph& rg, const SccGraph& scc, const Net& net);

std::vector<PlaceBound> place_bounds(const ReachGraph& rg, const Net& net);

/// Canonical value multiset per place, e.g. "P1: [\"a\"]; P2: []".
std::string describe_state(const Net& net, const Marking& m);

SpaceReport summarize(const Net& net, const Marking& initial, const ExploreLimits& limits = {});

}  // namespace cpn
