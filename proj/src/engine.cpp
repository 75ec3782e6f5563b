#include "cpnkit/engine.hpp"

#include <algorithm>
#include <numeric>

#include "cpnkit/error.hpp"

namespace cpn {

namespace {

Value eval_in(const Net& net, const Expr& e, const Env& env, const std::string& where) {
  try {
    return evaluate(e, env, net.functions());
  } catch (const Error& err) {
    throw err.with_context(where);
  }
}

std::string arc_label(const Net& net, std::size_t arc) {
  const auto& a = net.definition().arcs[arc];
  return "arc " + a.source + " -> " + a.target;
}

class BindingSearch {
 public:
  BindingSearch(const Net& net, std::size_t transition, const Marking& marking, TimeMode mode)
      : net_(net), t_(transition), marking_(marking), arcs_(net.inputs(transition)) {
    candidates_.resize(net.num_places());
    used_.resize(net.num_places());
    for (const auto& arc : arcs_) {
      auto& c = candidates_[arc.place];
      if (!c.empty() || used_[arc.place].size()) continue;
      const auto& toks = marking.tokens(arc.place);
      used_[arc.place].assign(toks.size(), false);
      for (std::size_t i = 0; i < toks.size(); ++i)
        if (mode == TimeMode::Ignore || toks[i].timestamp <= marking.global_clock()) c.push_back(i);
      std::stable_sort(c.begin(), c.end(), [&](std::size_t a, std::size_t b) { return toks[a] < toks[b]; });
    }
  }

  std::vector<Binding> run() {
    Env env;
    search(0, env);
    return std::move(results_);
  }

 private:
  void search(std::size_t k, const Env& env) {
    if (k == arcs_.size()) {
      finish(env);
      return;
    }
    const auto& arc = arcs_[k];
    const auto& toks = marking_.tokens(arc.place);
    auto& used = used_[arc.place];
    if (arc.rank < 3) {
      const Value* last = nullptr;
      for (std::size_t idx : candidates_[arc.place]) {
        if (used[idx]) continue;
        const Token& tok = toks[idx];
        if (last && *last == tok.value) continue;
        last = &tok.value;
        auto extended = match_pattern(arc.body, tok.value, env);
        if (!extended) continue;
        take(arc, idx, tok);
        search(k + 1, *extended);
        release(arc, idx);
      }
      return;
    }
    const Value wanted = eval_in(net_, arc.body, env, arc_label(net_, arc.arc));
    for (std::size_t idx : candidates_[arc.place]) {
      if (used[idx] || !(toks[idx].value == wanted)) continue;
      take(arc, idx, toks[idx]);
      search(k + 1, env);
      release(arc, idx);
      return;
    }
  }

  void take(const Net::InputArc& arc, std::size_t idx, const Token& tok) {
    used_[arc.place][idx] = true;
    consumed_.push_back(ConsumedToken{arc.arc, arc.place, tok});
  }

  void release(const Net::InputArc& arc, std::size_t idx) {
    used_[arc.place][idx] = false;
    consumed_.pop_back();
  }

  void finish(const Env& env) {
    if (const auto& guard = net_.guard(t_)) {
      const Value ok = eval_in(net_, *guard, env, "guard of " + net_.transition(t_).name);
      if (!ok.is_bool())
        throw Error(ErrorCode::TypeErrorAtRuntime,
                    "guard of " + net_.transition(t_).name + " evaluated to " + format_value(ok) + ", not a bool");
      if (!ok.as_bool()) return;
    }
    Binding b{env, consumed_};
    std::sort(b.consumed.begin(), b.consumed.end(), [](const auto& x, const auto& y) { return x.arc < y.arc; });
    results_.push_back(std::move(b));
  }

  const Net& net_;
  std::size_t t_;
  const Marking& marking_;
  const std::vector<Net::InputArc>& arcs_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::vector<std::vector<bool>> used_;
  std::vector<ConsumedToken> consumed_;
  std::vector<Binding> results_;
};

}  // namespace

std::vector<Binding> find_bindings(const Net& net, std::size_t transition, const Marking& marking, TimeMode mode) {
  if (transition >= net.num_transitions()) throw Error(ErrorCode::UnknownTransition, "transition index out of range");
  return BindingSearch(net, transition, marking, mode).run();
}

bool is_enabled(const Net& net, std::size_t transition, const Marking& marking, TimeMode mode) {
  return !find_bindings(net, transition, marking, mode).empty();
}

FiringRecord apply_binding(const Net& net, std::size_t transition, Marking& marking, const Binding& binding,
                           TimeMode mode) {
  const auto& tr = net.transition(transition);
  const Time clock = marking.global_clock();
  FiringRecord rec;
  rec.transition = tr.name;
  rec.env = binding.env;
  rec.clock = clock;

  std::vector<std::pair<std::size_t, Token>> produced;
  for (const auto& out : net.outputs(transition)) {
    const std::string where = arc_label(net, out.arc);
    Value v = eval_in(net, out.body, binding.env, where);
    const auto& place = net.place(out.place);
    if (!net.color_sets().is_member(place.color_set, v))
      throw Error(ErrorCode::ColorMismatch,
                  where + ": value " + format_value(v) + " is not a member of " + place.color_set);
    Time ts = 0;
    if (mode == TimeMode::Timed) {
      Time extra = 0;
      if (out.delay) {
        const Value d = eval_in(net, *out.delay, binding.env, where);
        if (!d.is_int()) throw Error(ErrorCode::TypeErrorAtRuntime, where + ": delay must be an integer");
        if (d.as_int() < 0) throw Error(ErrorCode::NegativeDelay, where + ": delay " + format_value(d) + " is negative");
        extra = d.as_int();
      }
      if (net.is_timed(out.place)) {
        if (__builtin_add_overflow(clock, tr.delay, &ts) || __builtin_add_overflow(ts, extra, &ts))
          throw Error(ErrorCode::ArithmeticOverflow, where + ": timestamp overflow");
      }
    }
    produced.emplace_back(out.place, Token{std::move(v), ts});
  }

  for (const auto& c : binding.consumed) {
    if (!marking.remove(c.place, c.token))
      throw Error(ErrorCode::NotEnabled, "token " + format_token(c.token) + " is no longer in " + net.place(c.place).name);
    rec.consumed.push_back(PlacedToken{net.place(c.place).name, c.token});
  }
  for (auto& [p, tok] : produced) {
    rec.produced.push_back(PlacedToken{net.place(p).name, tok});
    marking.add(p, std::move(tok));
  }
  return rec;
}

FiringRecord fire_transition(const Net& net, std::size_t transition, Marking& marking, const std::optional<Env>& env,
                             TimeMode mode) {
  auto bindings = find_bindings(net, transition, marking, mode);
  const auto& name = net.transition(transition).name;
  if (bindings.empty()) throw Error(ErrorCode::NotEnabled, "transition '" + name + "' is not enabled");
  const Binding* chosen = &bindings.front();
  if (env) {
    auto it = std::find_if(bindings.begin(), bindings.end(), [&](const Binding& b) { return b.env == *env; });
    if (it == bindings.end())
      throw Error(ErrorCode::NotEnabled, "transition '" + name + "' is not enabled under {" + format_env(*env) + "}");
    chosen = &*it;
  }
  // Produce into a copy so that a failing output leaves the caller's marking intact.
  Marking next = marking;
  FiringRecord rec = apply_binding(net, transition, next, *chosen, mode);
  marking = std::move(next);
  return rec;
}

std::optional<Time> next_token_time(const Marking& marking) {
  std::optional<Time> best;
  for (std::size_t p = 0; p < marking.num_places(); ++p)
    for (const auto& tok : marking.tokens(p))
      if (tok.timestamp > marking.global_clock() && (!best || tok.timestamp < *best)) best = tok.timestamp;
  return best;
}

Time advance_global_clock(const Net&, Marking& marking) {
  if (auto next = next_token_time(marking)) marking.set_global_clock(*next);
  return marking.global_clock();
}

std::vector<EnabledTransition> enabled_transitions(const Net& net, const Marking& marking, TimeMode mode) {
  std::vector<EnabledTransition> out;
  for (std::size_t t = 0; t < net.num_transitions(); ++t) {
    auto b = find_bindings(net, t, marking, mode);
    if (!b.empty()) out.push_back(EnabledTransition{t, std::move(b)});
  }
  return out;
}

}  // namespace cpn
