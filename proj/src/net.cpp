#include "cpnkit/net.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "cpnkit/error.hpp"
#include "lexer.hpp"

namespace cpn {

std::string_view violation_name(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::InvalidName: return "InvalidName";
    case ViolationKind::DuplicateVariable: return "DuplicateVariable";
    case ViolationKind::UnknownColorSet: return "UnknownColorSet";
    case ViolationKind::DanglingEndpoint: return "DanglingEndpoint";
    case ViolationKind::InvalidArcEndpoints: return "InvalidArcEndpoints";
    case ViolationKind::MissingInscription: return "MissingInscription";
    case ViolationKind::DelayOnInputArc: return "DelayOnInputArc";
    case ViolationKind::UndeclaredVariable: return "UndeclaredVariable";
    case ViolationKind::AmbiguousEnumLiteral: return "AmbiguousEnumLiteral";
    case ViolationKind::BindingIncomplete: return "BindingIncomplete";
    case ViolationKind::NegativeTransitionDelay: return "NegativeTransitionDelay";
    case ViolationKind::UnknownFunction: return "UnknownFunction";
    case ViolationKind::ArityMismatch: return "ArityMismatch";
  }
  return "Violation";
}

std::string Violation::path() const {
  std::string out;
  switch (element) {
    case Element::Place: out = "places"; break;
    case Element::Transition: out = "transitions"; break;
    case Element::Arc: out = "arcs"; break;
    case Element::Function: out = "functions"; break;
  }
  out += "[" + std::to_string(index) + "]";
  if (!field.empty()) out += "." + field;
  return out;
}

std::string Violation::to_string() const {
  return std::string(violation_name(kind)) + " at " + path() + ": " + detail;
}

std::string format_token(const Token& t) { return format_value(t.value) + "@" + std::to_string(t.timestamp); }

bool Marking::remove(std::size_t place, const Token& token) {
  auto& bag = places_.at(place);
  auto it = std::find(bag.begin(), bag.end(), token);
  if (it == bag.end()) return false;
  bag.erase(it);
  return true;
}

bool operator==(const Marking& a, const Marking& b) {
  if (a.clock_ != b.clock_ || a.places_.size() != b.places_.size()) return false;
  for (std::size_t p = 0; p < a.places_.size(); ++p) {
    if (a.places_[p].size() != b.places_[p].size()) return false;
    if (sorted_tokens(a.places_[p]) != sorted_tokens(b.places_[p])) return false;
  }
  return true;
}

std::vector<Token> sorted_tokens(const std::vector<Token>& tokens) {
  std::vector<Token> out = tokens;
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Validation and compilation

namespace {

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return !detail::is_expression_keyword(s);
}

int pattern_rank(const Expr& e) {
  if (e.as<ast::Var>()) return 0;
  if (e.as<ast::Literal>()) return 1;
  if (e.is_pattern()) return 2;
  return 3;
}

struct Analysis {
  FunctionTable functions;
  std::vector<std::optional<Expr>> guards;
  std::vector<std::vector<Net::InputArc>> inputs;
  std::vector<std::vector<Net::OutputArc>> outputs;
};

class Analyzer {
 public:
  explicit Analyzer(const NetDefinition& def) : def_(def) {
    for (const auto& cs : def.color_sets.sets())
      if (cs.kind == ColorKind::Enumerated)
        for (const auto& lit : cs.literals) literal_sets_[lit].push_back(cs.name);
  }

  std::vector<Violation> run(Analysis& out) {
    check_names();
    resolve_functions(out);
    out.guards.resize(def_.transitions.size());
    out.inputs.resize(def_.transitions.size());
    out.outputs.resize(def_.transitions.size());

    std::vector<std::set<std::string>> declared(def_.transitions.size());
    for (std::size_t t = 0; t < def_.transitions.size(); ++t) {
      const auto& tr = def_.transitions[t];
      for (std::size_t i = 0; i < tr.variables.size(); ++i) {
        const auto& v = tr.variables[i];
        if (!valid_identifier(v))
          add(ViolationKind::InvalidName, "variable name '" + v + "' is not an identifier", Element::Transition, t,
              "variables");
        if (!declared[t].insert(v).second)
          add(ViolationKind::DuplicateVariable, "variable '" + v + "' declared twice on '" + tr.name + "'",
              Element::Transition, t, "variables");
      }
      if (tr.delay < 0)
        add(ViolationKind::NegativeTransitionDelay, "transition delay of '" + tr.name + "' is negative",
            Element::Transition, t, "transitionDelay");
      if (tr.guard) out.guards[t] = resolve(*tr.guard, declared[t], Element::Transition, t, "guard");
    }

    for (std::size_t a = 0; a < def_.arcs.size(); ++a) {
      const auto& arc = def_.arcs[a];
      auto sp = find(places_, arc.source), st = find(transitions_, arc.source);
      auto tp = find(places_, arc.target), tt = find(transitions_, arc.target);
      bool dangling = false;
      for (const auto* end : {&arc.source, &arc.target}) {
        if (!find(places_, *end) && !find(transitions_, *end)) {
          add(ViolationKind::DanglingEndpoint, "arc endpoint '" + *end + "' does not exist", Element::Arc, a,
              end == &arc.source ? "source" : "target");
          dangling = true;
        }
      }
      if (dangling) continue;
      const bool is_input = sp && tt;
      const bool is_output = st && tp;
      if (!is_input && !is_output) {
        add(ViolationKind::InvalidArcEndpoints,
            "arc '" + arc.source + "' -> '" + arc.target + "' must connect a place and a transition", Element::Arc, a);
        continue;
      }
      if (!arc.inscription) {
        add(ViolationKind::MissingInscription, "arc '" + arc.source + "' -> '" + arc.target + "' has no inscription",
            Element::Arc, a, "inscription");
        continue;
      }
      const std::size_t t = is_input ? *tt : *st;
      const std::size_t p = is_input ? *sp : *tp;
      Expr body = resolve(arc.inscription->body, declared[t], Element::Arc, a, "inscription");
      if (is_input) {
        if (arc.inscription->delay)
          add(ViolationKind::DelayOnInputArc, "input arc '" + arc.source + "' -> '" + arc.target + "' carries a delay",
              Element::Arc, a, "inscription");
        out.inputs[t].push_back(Net::InputArc{a, p, body, pattern_rank(body)});
      } else {
        std::optional<Expr> delay;
        if (arc.inscription->delay)
          delay = resolve(*arc.inscription->delay, declared[t], Element::Arc, a, "inscription");
        out.outputs[t].push_back(Net::OutputArc{a, p, body, delay});
      }
    }

    for (std::size_t t = 0; t < def_.transitions.size(); ++t) {
      auto& ins = out.inputs[t];
      std::stable_sort(ins.begin(), ins.end(), [](const auto& x, const auto& y) { return x.rank < y.rank; });
      check_binding_completeness(t, ins, declared[t]);
    }
    return std::move(violations_);
  }

 private:
  static std::optional<std::size_t> find(const std::unordered_map<std::string, std::size_t>& m, const std::string& k) {
    auto it = m.find(k);
    if (it == m.end()) return std::nullopt;
    return it->second;
  }

  void add(ViolationKind kind, std::string detail, Element el, std::size_t index, std::string field = {}) {
    violations_.push_back(Violation{kind, std::move(detail), el, index, std::move(field)});
  }

  void check_names() {
    for (std::size_t i = 0; i < def_.places.size(); ++i) {
      const auto& p = def_.places[i];
      if (p.name.empty()) add(ViolationKind::InvalidName, "place name is empty", Element::Place, i, "name");
      if (!places_.emplace(p.name, i).second)
        add(ViolationKind::DuplicateName, "place '" + p.name + "' declared twice", Element::Place, i, "name");
      if (!def_.color_sets.contains(p.color_set))
        add(ViolationKind::UnknownColorSet, "place '" + p.name + "' uses undeclared color set '" + p.color_set + "'",
            Element::Place, i, "colorSet");
    }
    for (std::size_t i = 0; i < def_.transitions.size(); ++i) {
      const auto& t = def_.transitions[i];
      if (t.name.empty()) add(ViolationKind::InvalidName, "transition name is empty", Element::Transition, i, "name");
      if (places_.count(t.name) || !transitions_.emplace(t.name, i).second)
        add(ViolationKind::DuplicateName, "name '" + t.name + "' is already used", Element::Transition, i, "name");
    }
  }

  void resolve_functions(Analysis& out) {
    std::size_t index = 0;
    for (const auto& [name, fn] : def_.functions.entries()) {
      std::set<std::string> params(fn.params.begin(), fn.params.end());
      Function resolved{fn.params, resolve(fn.body, params, Element::Function, index, "body")};
      out.functions.add(name, std::move(resolved));
      ++index;
    }
  }

  Expr resolve(const Expr& e, const std::set<std::string>& bound, Element el, std::size_t index,
               const std::string& field) {
    return std::visit(
        [&](const auto& n) -> Expr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ast::Literal>) {
            return e;
          } else if constexpr (std::is_same_v<T, ast::Var>) {
            if (bound.count(n.name)) return e;
            auto it = literal_sets_.find(n.name);
            if (it == literal_sets_.end()) {
              add(ViolationKind::UndeclaredVariable, "'" + n.name + "' is neither a declared variable nor an enum literal",
                  el, index, field);
              return e;
            }
            if (it->second.size() > 1) {
              add(ViolationKind::AmbiguousEnumLiteral, "literal '" + n.name + "' is declared by several color sets", el,
                  index, field);
              return e;
            }
            return Expr::literal(Value::enumerated(it->second.front(), n.name));
          } else if constexpr (std::is_same_v<T, ast::Unary>) {
            return Expr::unary(n.op, resolve(n.operand, bound, el, index, field));
          } else if constexpr (std::is_same_v<T, ast::Binary>) {
            return Expr::binary(n.op, resolve(n.lhs, bound, el, index, field), resolve(n.rhs, bound, el, index, field));
          } else if constexpr (std::is_same_v<T, ast::Tuple>) {
            return Expr::tuple(resolve(n.first, bound, el, index, field), resolve(n.second, bound, el, index, field));
          } else {
            const Function* fn = def_.functions.find(n.function);
            if (!fn)
              add(ViolationKind::UnknownFunction, "function '" + n.function + "' is not defined", el, index, field);
            else if (fn->params.size() != n.args.size())
              add(ViolationKind::ArityMismatch,
                  "function '" + n.function + "' takes " + std::to_string(fn->params.size()) + " argument(s), " +
                      std::to_string(n.args.size()) + " given",
                  el, index, field);
            std::vector<Expr> args;
            for (const auto& arg : n.args) args.push_back(resolve(arg, bound, el, index, field));
            return Expr::call(n.function, std::move(args));
          }
        },
        e.node().v);
  }

  void check_binding_completeness(std::size_t t, const std::vector<Net::InputArc>& ins,
                                  const std::set<std::string>& declared) {
    std::set<std::string> bound;
    for (const auto& in : ins)
      if (in.rank < 3)
        for (auto& v : free_variables(in.body)) bound.insert(v);
    const auto& tr = def_.transitions[t];
    for (const auto& v : tr.variables)
      if (!bound.count(v))
        add(ViolationKind::BindingIncomplete,
            "variable '" + v + "' of '" + tr.name + "' is not bound by any pattern input arc", Element::Transition, t,
            "variables");
    for (const auto& in : ins) {
      if (in.rank < 3) continue;
      for (const auto& v : free_variables(in.body))
        if (declared.count(v) && !bound.count(v))
          add(ViolationKind::BindingIncomplete,
              "input inscription uses '" + v + "' which no pattern input arc binds", Element::Arc, in.arc,
              "inscription");
    }
  }

  const NetDefinition& def_;
  std::unordered_map<std::string, std::size_t> places_;
  std::unordered_map<std::string, std::size_t> transitions_;
  std::map<std::string, std::vector<std::string>> literal_sets_;
  std::vector<Violation> violations_;
};

}  // namespace

std::vector<Violation> validate_net(const NetDefinition& def) {
  Analysis scratch;
  return Analyzer(def).run(scratch);
}

Net Net::compile(NetDefinition def) {
  Analysis analysis;
  auto violations = Analyzer(def).run(analysis);
  if (!violations.empty()) {
    std::string detail;
    for (const auto& v : violations) {
      if (!detail.empty()) detail += "; ";
      detail += v.to_string();
    }
    throw Error(ErrorCode::ValidationFailed, detail, violations.front().path());
  }
  Net net;
  net.def_ = std::move(def);
  net.functions_ = std::move(analysis.functions);
  net.guards_ = std::move(analysis.guards);
  net.inputs_ = std::move(analysis.inputs);
  net.outputs_ = std::move(analysis.outputs);
  for (std::size_t i = 0; i < net.def_.places.size(); ++i) {
    net.place_ids_.emplace(net.def_.places[i].name, i);
    net.timed_.push_back(net.def_.color_sets.at(net.def_.places[i].color_set).timed);
  }
  for (std::size_t i = 0; i < net.def_.transitions.size(); ++i) net.transition_ids_.emplace(net.def_.transitions[i].name, i);
  return net;
}

std::optional<std::size_t> Net::find_place(std::string_view name) const {
  auto it = place_ids_.find(std::string(name));
  if (it == place_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Net::find_transition(std::string_view name) const {
  auto it = transition_ids_.find(std::string(name));
  if (it == transition_ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t Net::place_index(std::string_view name) const {
  if (auto i = find_place(name)) return *i;
  throw Error(ErrorCode::UnknownPlace, "no place named '" + std::string(name) + "'");
}

std::size_t Net::transition_index(std::string_view name) const {
  if (auto i = find_transition(name)) return *i;
  throw Error(ErrorCode::UnknownTransition, "no transition named '" + std::string(name) + "'");
}

bool Net::has_timed_places() const { return std::find(timed_.begin(), timed_.end(), true) != timed_.end(); }

Marking Net::make_marking(const InitialMarking& init) const {
  if (init.global_clock < 0) throw Error(ErrorCode::SchemaError, "global clock must be non-negative");
  Marking m(num_places());
  m.set_global_clock(init.global_clock);
  for (const auto& [name, tokens] : init.tokens) {
    const std::size_t p = place_index(name);
    const auto& place = def_.places[p];
    for (const auto& tok : tokens) {
      if (!def_.color_sets.is_member(place.color_set, tok.value))
        throw Error(ErrorCode::ColorMismatch,
                    "token " + format_value(tok.value) + " is not a member of " + place.color_set + " (place '" + name + "')");
      if (tok.timestamp < 0) throw Error(ErrorCode::SchemaError, "negative timestamp in place '" + name + "'");
      if (!timed_[p] && tok.timestamp != 0)
        throw Error(ErrorCode::SchemaError, "untimed place '" + name + "' holds a token with a timestamp");
      m.add(p, tok);
    }
  }
  return m;
}

InitialMarking Net::to_initial(const Marking& m) const {
  InitialMarking out;
  out.global_clock = m.global_clock();
  for (std::size_t p = 0; p < num_places(); ++p)
    if (m.count(p)) out.tokens[def_.places[p].name] = m.tokens(p);
  return out;
}

std::string format_marking(const Net& net, const Marking& m) {
  std::string out;
  for (std::size_t p = 0; p < net.num_places(); ++p) {
    out += net.place(p).name + ": [";
    const auto& toks = m.tokens(p);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) out += ", ";
      out += format_token(toks[i]);
    }
    out += "]; ";
  }
  out += "clock=" + std::to_string(m.global_clock());
  return out;
}

}  // namespace cpn
