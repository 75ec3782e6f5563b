#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "cpnkit/error.hpp"
#include "cpnkit/expr.hpp"

namespace cpntest {

std::string data_path(std::string_view relative) { return std::string(CPNKIT_TEST_DATA) + "/" + std::string(relative); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cpn::Model load_data(std::string_view relative) { return cpn::import_json(read_file(data_path(relative))); }

// Random corpus -------------------------------------------------------------

namespace {

enum class Ty { I, C, P };

struct Gen {
  std::mt19937_64 rng;
  bool timed;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(int percent) { return pick(1, 100) <= percent; }

  cpn::Json value_json(Ty ty) {
    switch (ty) {
      case Ty::I: return pick(0, 2);
      case Ty::C: return cpn::Json{{"enum", "C"}, {"lit", chance(50) ? "a" : "b"}};
      case Ty::P: return cpn::Json::array({value_json(Ty::C), value_json(Ty::I)});
    }
    return nullptr;
  }
};

struct TransitionBuilder {
  Gen& g;
  std::vector<std::pair<std::string, Ty>> vars;  // first-appearance order
  int& counter;

  std::vector<std::string> vars_of(Ty ty) const {
    std::vector<std::string> out;
    for (const auto& [n, t] : vars)
      if (t == ty) out.push_back(n);
    return out;
  }

  std::string var(Ty ty) {
    auto existing = vars_of(ty);
    if (!existing.empty() && g.chance(30)) return existing[g.pick(0, static_cast<int>(existing.size()) - 1)];
    std::string name = (ty == Ty::I ? "n" : ty == Ty::C ? "c" : "q") + std::to_string(counter++);
    vars.emplace_back(name, ty);
    return name;
  }

  std::string any_of(const std::vector<std::string>& v) { return v[g.pick(0, static_cast<int>(v.size()) - 1)]; }

  std::string pattern(Ty ty) {
    switch (ty) {
      case Ty::I: {
        const int r = g.pick(1, 100);
        if (r <= 20) return std::to_string(g.pick(0, 2));
        if (r <= 45 && !vars_of(Ty::I).empty()) return any_of(vars_of(Ty::I)) + (g.chance(50) ? " + 1" : " - 1");
        return var(Ty::I);
      }
      case Ty::C: return g.chance(25) ? (g.chance(50) ? "a" : "b") : var(Ty::C);
      case Ty::P:
        if (g.chance(70)) return "(" + pattern_strict(Ty::C) + ", " + pattern_strict(Ty::I) + ")";
        return var(Ty::P);
    }
    return {};
  }

  // Pattern-only variant for tuple components.
  std::string pattern_strict(Ty ty) {
    if (ty == Ty::I) return g.chance(25) ? std::to_string(g.pick(0, 2)) : var(Ty::I);
    return pattern(ty);
  }

  std::string output(Ty ty) {
    switch (ty) {
      case Ty::I: {
        auto is = vars_of(Ty::I);
        const int r = g.pick(1, 100);
        if (is.empty() || r <= 20) return std::to_string(g.pick(0, 2));
        if (r <= 50) return "(" + any_of(is) + " + 1) mod 3";
        return any_of(is);
      }
      case Ty::C: {
        auto cs = vars_of(Ty::C);
        if (cs.empty() || g.chance(25)) return g.chance(50) ? "a" : "b";
        return any_of(cs);
      }
      case Ty::P: {
        auto ps = vars_of(Ty::P);
        if (!ps.empty() && g.chance(50)) return any_of(ps);
        return "(" + output(Ty::C) + ", " + output(Ty::I) + ")";
      }
    }
    return {};
  }

  std::string atom_guard() {
    const auto& [v, ty] = vars[g.pick(0, static_cast<int>(vars.size()) - 1)];
    switch (ty) {
      case Ty::I: {
        auto is = vars_of(Ty::I);
        const int r = g.pick(1, 3);
        if (r == 1 || is.size() < 2) return v + " < " + std::to_string(g.pick(1, 2));
        const std::string w = any_of(is);
        return r == 2 ? v + " != " + w : v + " + " + w + " > 1";
      }
      case Ty::C: return v + (g.chance(50) ? " == a" : " != b");
      case Ty::P: return v + " != (a, 0)";
    }
    return {};
  }

  std::string guard() {
    std::string gd = atom_guard();
    if (g.chance(30)) gd += (g.chance(50) ? " and " : " or ") + atom_guard();
    if (g.chance(15)) gd = "not (" + gd + ")";
    return gd;
  }
};

}  // namespace

cpn::Json random_document(std::uint64_t seed, bool timed) {
  Gen g{std::mt19937_64(seed), timed};
  const std::string suffix = timed ? " timed;" : ";";
  cpn::Json doc = cpn::Json::object();
  doc["formatVersion"] = 1;
  doc["colorSets"] = cpn::Json::array(
      {"colset INT = int" + suffix, "colset C = with a | b" + suffix, "colset P = product C * INT" + suffix});

  const int num_places = g.pick(1, 4);
  std::vector<Ty> types;
  cpn::Json places = cpn::Json::array();
  for (int i = 0; i < num_places; ++i) {
    const Ty ty = static_cast<Ty>(g.pick(0, 2));
    types.push_back(ty);
    places.push_back({{"name", "p" + std::to_string(i)}, {"colorSet", ty == Ty::I ? "INT" : ty == Ty::C ? "C" : "P"}});
  }
  doc["places"] = places;

  cpn::Json transitions = cpn::Json::array();
  cpn::Json arcs = cpn::Json::array();
  const int num_transitions = g.pick(1, 3);
  for (int t = 0; t < num_transitions; ++t) {
    int counter = 0;
    TransitionBuilder b{g, {}, counter};
    const std::string name = "t" + std::to_string(t);
    const int inputs = g.chance(10) ? 0 : g.pick(1, 2);
    std::vector<int> sources;
    for (int k = 0; k < inputs; ++k) {
      const int p = g.pick(0, num_places - 1);
      sources.push_back(p);
      arcs.push_back({{"source", "p" + std::to_string(p)}, {"target", name}, {"inscription", b.pattern(types[p])}});
    }
    // Mostly token-conserving, so cycles are common.
    const int outputs = g.chance(65) ? inputs : g.pick(0, inputs);
    for (int k = 0; k < outputs; ++k) {
      const int p = g.chance(50) ? sources[g.pick(0, inputs - 1)] : g.pick(0, num_places - 1);
      std::string ins = b.output(types[p]);
      if (timed && g.chance(30)) ins += " @+" + std::to_string(g.pick(0, 2));
      arcs.push_back({{"source", name}, {"target", "p" + std::to_string(p)}, {"inscription", ins}});
    }
    cpn::Json vars = cpn::Json::array();
    for (const auto& v : b.vars) vars.push_back(v.first);
    cpn::Json guard = nullptr;
    if (!b.vars.empty() && g.chance(40)) guard = b.guard();
    transitions.push_back(
        {{"name", name}, {"variables", vars}, {"guard", guard}, {"transitionDelay", timed ? g.pick(0, 1) : 0}});
  }
  doc["transitions"] = transitions;
  doc["arcs"] = arcs;

  cpn::Json init = cpn::Json::object();
  if (timed) init["globalClock"] = g.pick(0, 2);
  cpn::Json tokens = cpn::Json::object();
  for (int p = 0; p < num_places; ++p) {
    const int n = g.chance(20) ? 0 : g.pick(1, 3);
    if (n == 0) continue;
    cpn::Json list = cpn::Json::array();
    for (int k = 0; k < n; ++k) {
      cpn::Json tok = {{"value", g.value_json(types[p])}};
      if (timed) tok["timestamp"] = g.pick(0, 2);
      list.push_back(tok);
    }
    tokens["p" + std::to_string(p)] = list;
  }
  init["tokens"] = tokens;
  doc["initialMarking"] = init;
  return doc;
}

cpn::Expr random_expr(std::mt19937_64& rng, int depth) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  static const char* kVars[] = {"x", "y", "z", "count", "_tmp1", "andy", "notx"};
  static const char* kFuns[] = {"f", "double", "g2"};
  if (depth <= 0 || pick(0, 3) == 0) {
    switch (pick(0, 5)) {
      case 0: return cpn::Expr::literal(cpn::Value::integer(pick(-20, 1000)));
      case 1: return cpn::Expr::literal(cpn::Value::real(std::uniform_real_distribution<double>(-1e3, 1e3)(rng)));
      case 2: {
        static const std::string alphabet = "ab \"\\\n\tz9";
        std::string s;
        for (int i = pick(0, 5); i > 0; --i) s += alphabet[pick(0, static_cast<int>(alphabet.size()) - 1)];
        return cpn::Expr::literal(cpn::Value::text(s));
      }
      case 3: return cpn::Expr::literal(cpn::Value::boolean(pick(0, 1) == 1));
      default: return cpn::Expr::var(kVars[pick(0, 6)]);
    }
  }
  switch (pick(0, 5)) {
    case 0: return cpn::Expr::unary(pick(0, 1) ? cpn::UnaryOp::Neg : cpn::UnaryOp::Not, random_expr(rng, depth - 1));
    case 1: {
      std::vector<cpn::Expr> args;
      for (int i = pick(0, 3); i > 0; --i) args.push_back(random_expr(rng, depth - 1));
      return cpn::Expr::call(kFuns[pick(0, 2)], std::move(args));
    }
    case 2: return cpn::Expr::tuple(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default:
      return cpn::Expr::binary(static_cast<cpn::BinaryOp>(pick(0, 12)), random_expr(rng, depth - 1),
                               random_expr(rng, depth - 1));
  }
}

// Oracles -------------------------------------------------------------------

Values canonical(const cpn::Net& net, const cpn::Marking& m) {
  Values out(net.num_places());
  for (std::size_t p = 0; p < net.num_places(); ++p) {
    for (const auto& t : m.tokens(p)) out[p].push_back(t.value);
    std::sort(out[p].begin(), out[p].end());
  }
  return out;
}

cpn::Env literal_env(const cpn::ColorSetRegistry& registry) {
  cpn::Env env;
  for (const auto& cs : registry.sets())
    if (cs.kind == cpn::ColorKind::Enumerated)
      for (const auto& lit : cs.literals) env[lit] = cpn::Value::enumerated(cs.name, lit);
  return env;
}

namespace {

struct InputArc {
  std::size_t place;
  cpn::Expr body;
};

std::vector<InputArc> input_arcs(const cpn::Net& net, std::size_t t) {
  const auto& def = net.definition();
  const std::string& name = def.transitions[t].name;
  std::vector<InputArc> out;
  for (const auto& a : def.arcs)
    if (a.target == name) out.push_back({net.place_index(a.source), a.inscription->body});
  return out;
}

// Values a variable can take: those seen at its position inside tokens of the
// places whose pattern mentions it.
void collect_positions(const cpn::Expr& e, const cpn::Value& v, std::map<std::string, std::set<cpn::Value>>& out) {
  if (const auto* var = e.as<cpn::ast::Var>()) {
    out[var->name].insert(v);
  } else if (const auto* tup = e.as<cpn::ast::Tuple>()) {
    if (!v.is_pair()) return;
    collect_positions(tup->first, v.first(), out);
    collect_positions(tup->second, v.second(), out);
  }
}

bool assign_tokens(const std::vector<InputArc>& arcs, const std::vector<cpn::Value>& wanted, std::size_t k,
                   const cpn::Marking& m, std::vector<std::vector<bool>>& used) {
  if (k == arcs.size()) return true;
  const auto& toks = m.tokens(arcs[k].place);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (used[arcs[k].place][i] || toks[i].timestamp > m.global_clock() || !(toks[i].value == wanted[k])) continue;
    used[arcs[k].place][i] = true;
    if (assign_tokens(arcs, wanted, k + 1, m, used)) return true;
    used[arcs[k].place][i] = false;
  }
  return false;
}

}  // namespace

std::set<cpn::Env> brute_force_envs(const cpn::Net& net, std::size_t transition, const cpn::Marking& m) {
  const auto& tr = net.definition().transitions[transition];
  const auto arcs = input_arcs(net, transition);
  const cpn::Env literals = literal_env(net.color_sets());
  const auto& functions = net.definition().functions;

  std::map<std::string, std::set<cpn::Value>> domain;
  for (const auto& a : arcs)
    for (const auto& tok : m.tokens(a.place))
      if (tok.timestamp <= m.global_clock()) collect_positions(a.body, tok.value, domain);

  std::set<cpn::Env> result;
  std::vector<std::vector<cpn::Value>> choices;
  for (const auto& v : tr.variables) {
    const auto& d = domain[v];
    choices.emplace_back(d.begin(), d.end());
  }

  cpn::Env env = literals;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i < tr.variables.size()) {
      for (const auto& val : choices[i]) {
        env[tr.variables[i]] = val;
        rec(i + 1);
      }
      env.erase(tr.variables[i]);
      return;
    }
    std::vector<cpn::Value> wanted;
    try {
      if (tr.guard) {
        const cpn::Value g = cpn::evaluate(*tr.guard, env, functions);
        if (!g.is_bool() || !g.as_bool()) return;
      }
      for (const auto& a : arcs) wanted.push_back(cpn::evaluate(a.body, env, functions));
    } catch (const cpn::Error&) {
      return;
    }
    std::vector<std::vector<bool>> used(net.num_places());
    for (std::size_t p = 0; p < net.num_places(); ++p) used[p].assign(m.tokens(p).size(), false);
    if (!assign_tokens(arcs, wanted, 0, m, used)) return;
    cpn::Env bound;
    for (const auto& v : tr.variables) bound[v] = env.at(v);
    result.insert(std::move(bound));
  };
  rec(0);
  return result;
}

namespace {

Values fire_by_evaluation(const cpn::Net& net, std::size_t t, const Values& state, const cpn::Env& binding) {
  const auto& def = net.definition();
  const std::string& name = def.transitions[t].name;
  cpn::Env env = literal_env(net.color_sets());
  for (const auto& [k, v] : binding) env[k] = v;
  Values next = state;
  for (const auto& a : def.arcs) {
    if (a.target != name) continue;
    auto& vals = next[net.place_index(a.source)];
    auto it = std::find(vals.begin(), vals.end(), cpn::evaluate(a.inscription->body, env, def.functions));
    if (it == vals.end()) throw std::logic_error("oracle binding consumes a missing token");
    vals.erase(it);
  }
  for (const auto& a : def.arcs) {
    if (a.source != name) continue;
    auto& vals = next[net.place_index(a.target)];
    vals.push_back(cpn::evaluate(a.inscription->body, env, def.functions));
    std::sort(vals.begin(), vals.end());
  }
  return next;
}

cpn::Marking to_marking(const cpn::Net& net, const Values& state) {
  cpn::Marking m = net.empty_marking();
  for (std::size_t p = 0; p < state.size(); ++p)
    for (const auto& v : state[p]) m.add(p, cpn::Token{v, 0});
  return m;
}

}  // namespace

NaiveGraph naive_reachability(const cpn::Net& net, const cpn::Marking& initial) {
  NaiveGraph g;
  std::function<std::size_t(const Values&)> visit = [&](const Values& s) -> std::size_t {
    if (auto it = g.ids.find(s); it != g.ids.end()) return it->second;
    const std::size_t id = g.states.size();
    g.ids.emplace(s, id);
    g.states.push_back(s);
    const cpn::Marking m = to_marking(net, s);
    // Reverse declaration order, unlike the engine's breadth-first search.
    for (std::size_t t = net.num_transitions(); t-- > 0;) {
      for (const auto& env : brute_force_envs(net, t, m)) {
        const std::size_t target = visit(fire_by_evaluation(net, t, s, env));
        g.edges.emplace(id, net.transition(t).name, env, target);
      }
    }
    return id;
  };
  Values start = canonical(net, initial);
  visit(start);
  return g;
}

BruteProperties brute_force_properties(const NaiveGraph& g, const cpn::Net& net) {
  const std::size_t n = g.states.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [s, t, env, d] : g.edges) succ[s].push_back(d);

  // reach[i][j]: j reachable from i (reflexive).
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> stack{i};
    reach[i][i] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : succ[u])
        if (!reach[i][v]) {
          reach[i][v] = true;
          stack.push_back(v);
        }
    }
  }

  BruteProperties out;
  for (std::size_t m = 0; m < n; ++m) {
    bool home = true;
    for (std::size_t k = 0; k < n && home; ++k) home = reach[k][m];
    if (home) out.home.insert(m);
    if (succ[m].empty()) out.dead_markings.insert(m);
  }

  for (std::size_t t = 0; t < net.num_transitions(); ++t) {
    const std::string& name = net.transition(t).name;
    std::vector<bool> enables(n, false);
    bool fires = false;
    for (const auto& [s, tn, env, d] : g.edges)
      if (tn == name) enables[s] = fires = true;
    if (!fires) out.dead_transitions.insert(name);

    bool live = true;
    for (std::size_t m = 0; m < n && live; ++m) {
      bool found = false;
      for (std::size_t k = 0; k < n && !found; ++k) found = reach[m][k] && enables[k];
      live = found;
    }
    if (live) out.live_transitions.insert(name);

    // Three-colour DFS cycle search without t-labelled edges.
    std::vector<std::vector<std::size_t>> rest(n);
    for (const auto& [s, tn, env, d] : g.edges)
      if (tn != name) rest[s].push_back(d);
    std::vector<int> colour(n, 0);
    bool cycle = false;
    std::function<void(std::size_t)> dfs = [&](std::size_t u) {
      colour[u] = 1;
      for (std::size_t v : rest[u]) {
        if (cycle) return;
        if (colour[v] == 1) cycle = true;
        else if (colour[v] == 0) dfs(v);
      }
      colour[u] = 2;
    };
    for (std::size_t u = 0; u < n && !cycle; ++u)
      if (colour[u] == 0) dfs(u);
    if (!cycle) out.impartial_transitions.insert(name);
  }

  for (std::size_t p = 0; p < net.num_places(); ++p) {
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& s : g.states) {
      lo = std::min(lo, s[p].size());
      hi = std::max(hi, s[p].size());
    }
    out.bounds.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace cpntest
