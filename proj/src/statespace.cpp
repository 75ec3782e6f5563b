#include "cpnkit/statespace.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_set>

#include "cpnkit/error.hpp"

namespace cpn {

StateKey StateKey::of(const Marking& m) {
  StateKey key;
  std::vector<const Value*> values;
  for (std::size_t p = 0; p < m.num_places(); ++p) {
    const auto& toks = m.tokens(p);
    values.clear();
    for (const auto& t : toks) values.push_back(&t.value);
    std::sort(values.begin(), values.end(), [](const Value* a, const Value* b) { return *a < *b; });
    const auto n = static_cast<std::uint64_t>(values.size());
    for (int i = 7; i >= 0; --i) key.bytes_ += static_cast<char>((n >> (8 * i)) & 0xff);
    for (const auto* v : values) encode_value(*v, key.bytes_);
  }
  return key;
}

std::optional<std::size_t> ReachGraph::find(const StateKey& key) const {
  auto it = index.find(key);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

ReachGraph build_reachability_graph(const Net& net, const Marking& initial, const ExploreLimits& limits) {
  if (limits.max_states == 0 || limits.max_edges == 0)
    throw Error(ErrorCode::LimitZero, "state and edge limits must be positive");
  if (net.has_timed_places() && !limits.strip_time)
    throw Error(ErrorCode::TimedNetUnsupported, "net has timed color sets; enable strip-time to analyze it");
  const TimeMode mode = limits.strip_time ? TimeMode::Ignore : TimeMode::Timed;

  Marking start = initial;
  if (limits.strip_time) {
    Marking zeroed(net.num_places());
    for (std::size_t p = 0; p < net.num_places(); ++p)
      for (const auto& t : initial.tokens(p)) zeroed.add(p, Token{t.value, 0});
    start = std::move(zeroed);
  }

  ReachGraph rg;
  auto add_node = [&](StateKey key, Marking m) {
    const std::size_t id = rg.keys.size();
    rg.index.emplace(key, id);
    rg.keys.push_back(std::move(key));
    rg.markings.push_back(std::move(m));
    rg.expanded.push_back(false);
    return id;
  };
  add_node(StateKey::of(start), start);

  std::unordered_set<std::string> seen_edges;
  for (std::size_t head = 0; head < rg.keys.size() && !rg.truncated; ++head) {
    const Marking current = rg.markings[head];
    bool complete = true;
    for (const auto& en : enabled_transitions(net, current, mode)) {
      for (const auto& b : en.bindings) {
        Marking next = current;
        apply_binding(net, en.transition, next, b, mode);
        StateKey key = StateKey::of(next);
        std::size_t target;
        if (auto found = rg.find(key)) {
          target = *found;
        } else {
          if (rg.keys.size() >= limits.max_states) {
            rg.truncated = true;
            complete = false;
            break;
          }
          target = add_node(std::move(key), std::move(next));
        }
        std::string edge_id = std::to_string(head) + ':' + std::to_string(en.transition) + ':' +
                              std::to_string(target) + ':';
        for (const auto& [name, value] : b.env) {
          edge_id += name + '=';
          encode_value(value, edge_id);
        }
        if (!seen_edges.insert(std::move(edge_id)).second) continue;
        if (rg.edges.size() >= limits.max_edges) {
          rg.truncated = true;
          complete = false;
          break;
        }
        rg.edges.push_back(ReachEdge{head, en.transition, b.env, target});
      }
      if (!complete) break;
    }
    rg.expanded[head] = complete;
  }
  return rg;
}

SccGraph scc_decomposition(const ReachGraph& rg) {
  const std::size_t n = rg.num_states();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& e : rg.edges) succ[e.source].push_back(e.target);

  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  SccGraph out;
  out.component_of.assign(n, 0);
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next_child;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next_child < succ[f.node].size()) {
        const std::size_t w = succ[f.node][f.next_child++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const std::size_t v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component_of[w] = out.components.size();
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.components.push_back(std::move(comp));
      }
    }
  }

  std::vector<bool> has_out(out.components.size(), false);
  for (const auto& e : rg.edges) {
    const auto a = out.component_of[e.source], b = out.component_of[e.target];
    if (a != b) {
      out.condensation.emplace(a, b);
      has_out[a] = true;
    }
  }
  for (std::size_t c = 0; c < out.components.size(); ++c)
    if (!has_out[c]) out.terminal.push_back(c);
  return out;
}

std::vector<std::size_t> home_markings(const ReachGraph& rg, const SccGraph& scc) {
  if (rg.truncated) throw Error(ErrorCode::HomeUndecidable, "reachability graph is truncated");
  if (scc.terminal.size() != 1) return {};
  return scc.components[scc.terminal.front()];
}

std::vector<std::size_t> dead_markings(const ReachGraph& rg) {
  std::vector<bool> has_out(rg.num_states(), false);
  for (const auto& e : rg.edges) has_out[e.source] = true;
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < rg.num_states(); ++s)
    if (rg.expanded[s] && !has_out[s]) out.push_back(s);
  return out;
}

namespace {

// Kahn's algorithm on the graph without edges labeled `skip`.
bool acyclic_without(const ReachGraph& rg, std::size_t skip) {
  const std::size_t n = rg.num_states();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : rg.edges) {
    if (e.transition == skip) continue;
    succ[e.source].push_back(e.target);
    ++indegree[e.target];
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::size_t removed = 0;
  while (!ready.empty()) {
    const auto v = ready.back();
    ready.pop_back();
    ++removed;
    for (auto w : succ[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  return removed == n;
}

}  // namespace

TransitionClasses transition_classes(const ReachGraph& rg, const SccGraph& scc, const Net& net) {
  if (rg.truncated) throw Error(ErrorCode::LivenessUndecidable, "reachability graph is truncated");
  const std::size_t nt = net.num_transitions();
  std::vector<bool> fires(nt, false);
  // internal[t] = terminal components holding a t-edge inside them
  std::vector<std::set<std::size_t>> internal(nt);
  std::set<std::size_t> terminal(scc.terminal.begin(), scc.terminal.end());
  for (const auto& e : rg.edges) {
    fires[e.transition] = true;
    const auto c = scc.component_of[e.source];
    if (c == scc.component_of[e.target] && terminal.count(c)) internal[e.transition].insert(c);
  }
  TransitionClasses out;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& name = net.transition(t).name;
    if (!fires[t]) out.dead.push_back(name);
    if (!terminal.empty() && internal[t].size() == terminal.size()) out.live.push_back(name);
    if (acyclic_without(rg, t)) out.impartial.push_back(name);
  }
  return out;
}

std::vector<PlaceBound> place_bounds(const ReachGraph& rg, const Net& net) {
  std::vector<PlaceBound> out(net.num_places());
  for (std::size_t p = 0; p < net.num_places(); ++p) {
    out[p].min = std::numeric_limits<std::size_t>::max();
    for (const auto& m : rg.markings) {
      out[p].min = std::min(out[p].min, m.count(p));
      out[p].max = std::max(out[p].max, m.count(p));
    }
    if (rg.markings.empty()) out[p].min = 0;
  }
  return out;
}

std::string describe_state(const Net& net, const Marking& m) {
  std::string out;
  for (std::size_t p = 0; p < net.num_places(); ++p) {
    if (p) out += "; ";
    out += net.place(p).name + ": [";
    std::vector<Value> values;
    for (const auto& t : m.tokens(p)) values.push_back(t.value);
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out += ", ";
      out += format_value(values[i]);
    }
    out += ']';
  }
  return out;
}

SpaceReport summarize(const Net& net, const Marking& initial, const ExploreLimits& limits) {
  const ReachGraph rg = build_reachability_graph(net, initial, limits);
  const SccGraph scc = scc_decomposition(rg);
  auto describe = [&](const std::vector<std::size_t>& ids) {
    std::vector<std::string> out;
    for (auto id : ids) out.push_back(describe_state(net, rg.markings[id]));
    return out;
  };

  SpaceReport r;
  r.num_states = rg.num_states();
  r.num_edges = rg.edges.size();
  r.num_sccs = scc.components.size();
  r.truncated = rg.truncated;
  r.dead_markings = describe(dead_markings(rg));
  if (!rg.truncated) {
    r.home_markings = describe(home_markings(rg, scc));
    auto classes = transition_classes(rg, scc, net);
    r.dead_transitions = std::move(classes.dead);
    r.live_transitions = std::move(classes.live);
    r.impartial_transitions = std::move(classes.impartial);
  }
  const auto bounds = place_bounds(rg, net);
  for (std::size_t p = 0; p < net.num_places(); ++p) r.place_bounds.emplace_back(net.place(p).name, bounds[p]);
  return r;
}

}  // namespace cpn
