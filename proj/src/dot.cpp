#include <functional>
#include <map>
#include <optional>
#include <set>

#include "cpnkit/interchange.hpp"

namespace cpn {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out + '"';
}

// Label text with an explicit DOT line break between parts.
std::string lines(std::initializer_list<std::string> parts) {
  std::string q;
  for (const auto& p : parts) {
    if (!q.empty()) q += "\\n";
    auto e = quote(p);
    q += e.substr(1, e.size() - 2);
  }
  return '"' + q + '"';
}

std::string token_text(const std::vector<Token>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ", ";
    out += format_token(toks[i]);
  }
  return out;
}

struct Writer {
  std::string out;
  void line(int indent, const std::string& s) { out += std::string(2 * indent, ' ') + s + "\n"; }
};

void emit_elements(Writer& w, int indent, const std::string& prefix, const std::vector<Place>& places,
                   const std::vector<Transition>& transitions, const std::vector<Arc>& arcs,
                   const std::set<std::string>& substituted,
                   const std::function<std::optional<std::string>(std::size_t)>& place_tokens) {
  std::set<std::string> place_names;
  for (std::size_t i = 0; i < places.size(); ++i) {
    const auto& p = places[i];
    place_names.insert(p.name);
    const auto toks = place_tokens(i);
    const auto label = toks ? lines({p.name + " : " + p.color_set, *toks}) : lines({p.name + " : " + p.color_set});
    w.line(indent, quote(prefix + "p:" + p.name) + " [shape=ellipse, label=" + label + "];");
  }
  for (const auto& t : transitions) {
    std::string label = t.name;
    std::string extra;
    if (t.guard) extra = "[" + pretty_print(*t.guard) + "]";
    if (t.delay) extra += (extra.empty() ? "" : " ") + ("@+" + std::to_string(t.delay));
    const bool sub = substituted.count(t.name) > 0;
    w.line(indent, quote(prefix + "t:" + t.name) + " [shape=box" + (sub ? ", peripheries=2" : "") +
                       ", label=" + (extra.empty() ? lines({label}) : lines({label, extra})) + "];");
  }
  auto node = [&](const std::string& name) { return quote(prefix + (place_names.count(name) ? "p:" : "t:") + name); };
  for (const auto& a : arcs) {
    std::string attrs = a.inscription ? " [label=" + quote(pretty_print(*a.inscription)) + "]" : "";
    w.line(indent, node(a.source) + " -> " + node(a.target) + attrs + ";");
  }
}

}  // namespace

std::string render_dot(const Net& net, const Marking* marking) {
  Writer w;
  w.line(0, "digraph cpn {");
  const auto& def = net.definition();
  if (!def.places.empty() || !def.transitions.empty()) {
    w.line(1, "rankdir=LR;");
    if (marking) w.line(1, "label=" + quote("clock = " + std::to_string(marking->global_clock())) + ";");
    emit_elements(w, 1, "", def.places, def.transitions, def.arcs, {}, [&](std::size_t p) -> std::optional<std::string> {
      if (!marking) return std::nullopt;
      return token_text(marking->tokens(p));
    });
  }
  w.line(0, "}");
  return w.out;
}

std::string render_dot(const Hcpn& h) {
  Writer w;
  w.line(0, "digraph hcpn {");
  w.line(1, "compound=true;");
  w.line(1, "rankdir=LR;");
  std::map<std::string, std::set<std::string>> substituted;
  for (const auto& s : h.substitutions) substituted[s.parent].insert(s.transition);
  for (const auto& m : h.modules) {
    w.line(1, "subgraph " + quote("cluster_" + m.name) + " {");
    w.line(2, "label=" + quote(m.name) + ";");
    const std::string prefix = m.name + ":";
    w.line(2, quote(prefix + "anchor") + " [shape=point, style=invis];");
    emit_elements(w, 2, prefix, m.places, m.transitions, m.arcs, substituted[m.name],
                  [&](std::size_t p) -> std::optional<std::string> {
                    auto it = m.tokens.find(m.places[p].name);
                    if (it == m.tokens.end() || it->second.empty()) return std::nullopt;
                    return token_text(it->second);
                  });
    w.line(1, "}");
  }
  for (const auto& s : h.substitutions)
    w.line(1, quote(s.parent + ":t:" + s.transition) + " -> " + quote(s.child + ":anchor") +
                  " [style=dashed, lhead=" + quote("cluster_" + s.child) + "];");
  w.line(0, "}");
  return w.out;
}

}  // namespace cpn
