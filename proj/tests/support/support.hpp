#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cpnkit/interchange.hpp"

namespace cpntest {

std::string data_path(std::string_view relative);
std::string read_file(const std::string& path);
cpn::Model load_data(std::string_view relative);

// Random corpus -------------------------------------------------------------

/// Small valid net document: at most 4 places, 3 transitions and 3 tokens per
/// place over INT, an enum C = a | b and P = product C * INT. Output arcs never
/// outnumber input arcs, so untimed nets have finite state spaces.
cpn::Json random_document(std::uint64_t seed, bool timed);

/// Random AST in the shape the parser produces (no enum or pair literals).
cpn::Expr random_expr(std::mt19937_64& rng, int depth);

// Oracles -------------------------------------------------------------------

/// Per-place sorted token values; timestamps dropped.
using Values = std::vector<std::vector<cpn::Value>>;

Values canonical(const cpn::Net& net, const cpn::Marking& m);

/// Enum literal names bound to their values, so definition-level expressions
/// evaluate without the engine's literal resolution.
cpn::Env literal_env(const cpn::ColorSetRegistry& registry);

/// Every env over the transition's variables for which some assignment of
/// distinct available token instances matches each input inscription by
/// evaluation and the guard holds.
std::set<cpn::Env> brute_force_envs(const cpn::Net& net, std::size_t transition, const cpn::Marking& m);

using Edge = std::tuple<std::size_t, std::string, cpn::Env, std::size_t>;

struct NaiveGraph {
  std::map<Values, std::size_t> ids;
  std::vector<Values> states;
  std::set<Edge> edges;
};

/// Recursive depth-first enumeration of an untimed net's markings using the
/// brute-force bindings and firing by direct evaluation.
NaiveGraph naive_reachability(const cpn::Net& net, const cpn::Marking& initial);

struct BruteProperties {
  std::set<std::size_t> home;
  std::set<std::size_t> dead_markings;
  std::set<std::string> dead_transitions;
  std::set<std::string> live_transitions;
  std::set<std::string> impartial_transitions;
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
};

/// Textbook definitions on an explicit graph: home = reachable from all states,
/// live = enabled somewhere below every state, impartial = removing its edges
/// leaves no cycle.
BruteProperties brute_force_properties(const NaiveGraph& g, const cpn::Net& net);

}  // namespace cpntest
