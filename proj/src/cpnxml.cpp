#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "cpnkit/error.hpp"
#include "cpnkit/interchange.hpp"

namespace cpn {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string text_of(const pt::ptree& node, const char* child) {
  auto c = node.get_child_optional(child);
  if (!c) return {};
  if (auto t = c->get_child_optional("text")) return trim(t->data());
  return trim(c->data());
}

std::string attr(const pt::ptree& node, const char* name) {
  return node.get<std::string>(std::string("<xmlattr>.") + name, "");
}

bool has_call(const Expr& e) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ast::Call>) return true;
        else if constexpr (std::is_same_v<T, ast::Unary>) return has_call(n.operand);
        else if constexpr (std::is_same_v<T, ast::Binary>) return has_call(n.lhs) || has_call(n.rhs);
        else if constexpr (std::is_same_v<T, ast::Tuple>) return has_call(n.first) || has_call(n.second);
        else return false;
      },
      e.node().v);
}

// Splits on `sep` outside double-quoted strings.
std::vector<std::string> split_outside_quotes(std::string_view s, std::string_view sep) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      cur += c;
      if (c == '\\' && i + 1 < s.size()) cur += s[++i];
      else if (c == '"') quoted = false;
      continue;
    }
    if (c == '"') quoted = true;
    if (s.substr(i, sep.size()) == sep) {
      out.push_back(cur);
      cur.clear();
      i += sep.size() - 1;
      continue;
    }
    cur += c;
  }
  out.push_back(cur);
  return out;
}

std::optional<std::size_t> find_outside_quotes(std::string_view s, char target) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (quoted) {
      if (s[i] == '\\') ++i;
      else if (s[i] == '"') quoted = false;
    } else if (s[i] == '"') {
      quoted = true;
    } else if (s[i] == target) {
      return i;
    }
  }
  return std::nullopt;
}

// Constant value of a marking term, reading bare identifiers as literals of the target set.
Value constant_value(const Expr& e, const ColorSetRegistry& reg, const std::string& set) {
  const ColorSet& cs = reg.at(set);
  if (const auto* v = e.as<ast::Var>()) {
    if (cs.kind == ColorKind::Enumerated) {
      for (const auto& lit : cs.literals)
        if (lit == v->name) return Value::enumerated(cs.name, lit);
    }
    throw Error(ErrorCode::UnboundVariable, "'" + v->name + "' is not a literal of " + set);
  }
  if (const auto* t = e.as<ast::Tuple>(); t && cs.kind == ColorKind::Product)
    return Value::pair(constant_value(t->first, reg, cs.left), constant_value(t->second, reg, cs.right));
  return evaluate(e, {}, FunctionTable{});
}

class XmlReader {
 public:
  XmlImport run(std::string_view xml) {
    pt::ptree tree;
    try {
      std::istringstream in{std::string(xml)};
      pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
      throw Error(ErrorCode::XmlParseError, e.what());
    }
    const pt::ptree* net = nullptr;
    std::string base;
    if (auto ws = tree.get_child_optional("workspaceElements.cpnet")) {
      net = &*ws;
      base = "/workspaceElements/cpnet";
    } else if (auto c = tree.get_child_optional("cpnet")) {
      net = &*c;
      base = "/cpnet";
    } else {
      throw Error(ErrorCode::XmlParseError, "no cpnet element found");
    }

    if (auto g = net->get_child_optional("globbox")) read_globbox(*g, base + "/globbox");
    std::size_t page_index = 0;
    for (const auto& [tag, node] : *net) {
      if (tag == "page") read_page(node, base + "/page[" + std::to_string(page_index++) + "]");
      else if (tag != "globbox" && tag != "<xmlattr>" && tag != "<xmlcomment>")
        issue(base + "/" + tag, "element <" + tag + "> ignored");
    }
    if (page_index > 1) issue(base, "pages merged into a single net");
    build_arcs();
    repair_transitions();
    return finish();
  }

 private:
  struct RawArc {
    std::string path;
    std::string place_id;
    std::string trans_id;
    bool input;
    std::string text;
  };

  void issue(std::string path, std::string reason) { issues_.push_back(XmlIssue{std::move(path), std::move(reason)}); }

  void read_globbox(const pt::ptree& box, const std::string& path) {
    std::map<std::string, std::size_t> counters;
    for (const auto& [tag, node] : box) {
      const std::string at = path + "/" + tag + "[" + std::to_string(counters[tag]++) + "]";
      if (tag == "color") read_color(node, at);
      else if (tag == "block") read_globbox(node, at);
      else if (tag == "<xmlcomment>" || tag == "ml") read_functions(trim(node.data()), at, tag == "ml");
      else if (tag == "var" || tag == "<xmlattr>" || tag == "id") continue;
      else issue(at, "declaration <" + tag + "> not translated");
    }
  }

  void read_functions(const std::string& text, const std::string& path, bool report) {
    if (text.rfind("fun ", 0) != 0) {
      if (report) issue(path, "ML declaration not translated");
      return;
    }
    try {
      FunctionTable parsed = parse_function_definitions(text);
      for (const auto& [name, fn] : parsed.entries()) def_.functions.add(name, fn);
    } catch (const Error& e) {
      if (report) issue(path, "ML declaration not translated: " + e.detail());
    }
  }

  void read_color(const pt::ptree& node, const std::string& path) {
    ColorSet cs;
    cs.name = trim(node.get<std::string>("id", ""));
    cs.timed = node.get_child_optional("timed").has_value();
    if (!is_identifier(cs.name)) {
      issue(path, "color set name '" + cs.name + "' is not an identifier");
      return;
    }
    bool known = true;
    if (node.get_child_optional("int")) cs.kind = ColorKind::Int;
    else if (node.get_child_optional("real")) cs.kind = ColorKind::Real;
    else if (node.get_child_optional("string")) cs.kind = ColorKind::String;
    else if (auto e = node.get_child_optional("enum")) {
      cs.kind = ColorKind::Enumerated;
      for (const auto& [tag, lit] : *e)
        if (tag == "id") cs.literals.push_back(trim(lit.data()));
    } else if (auto p = node.get_child_optional("product")) {
      std::vector<std::string> parts;
      for (const auto& [tag, c] : *p)
        if (tag == "id") parts.push_back(trim(c.data()));
      if (parts.size() == 2) {
        cs.kind = ColorKind::Product;
        cs.left = parts[0];
        cs.right = parts[1];
      } else {
        known = false;
      }
    } else {
      known = false;
    }
    if (!known) {
      issue(path, "color set '" + cs.name + "' has an unsupported kind; declared as string");
      cs = ColorSet{cs.name, ColorKind::String, {}, {}, {}, cs.timed};
    }
    try {
      // Round-trip through the declaration grammar so that the document re-imports.
      ColorSetRegistry copy = def_.color_sets;
      parse_colorset_definitions(format_colorset(cs), copy);
      def_.color_sets = std::move(copy);
    } catch (const Error& e) {
      issue(path, "color set '" + cs.name + "' rejected: " + e.detail());
      if (!def_.color_sets.contains(cs.name) && cs.kind != ColorKind::String) {
        cs = ColorSet{cs.name, ColorKind::String, {}, {}, {}, cs.timed};
        def_.color_sets.add(cs);
      }
    }
  }

  std::string ensure_color_set(const std::string& name, const std::string& path) {
    std::string set = name.empty() ? "STRING" : name;
    if (def_.color_sets.contains(set)) return set;
    if (!is_identifier(set)) {
      issue(path, "color set '" + set + "' is not an identifier; using STRING");
      return ensure_color_set("STRING", path);
    }
    ColorSet cs{set, ColorKind::String, {}, {}, {}, false};
    if (set == "INT") cs.kind = ColorKind::Int;
    else if (set == "REAL") cs.kind = ColorKind::Real;
    else if (set != "STRING") issue(path, "color set '" + set + "' is not declared; declared as string");
    def_.color_sets.add(cs);
    return set;
  }

  std::string unique_name(std::string name, const std::string& id, const std::string& path) {
    if (name.empty()) {
      name = id.empty() ? "unnamed" : id;
      issue(path, "element has no name; using '" + name + "'");
    }
    if (names_.insert(name).second) return name;
    std::string base = name + "_" + (id.empty() ? std::string("dup") : id);
    std::string fresh = base;
    for (int n = 2; !names_.insert(fresh).second; ++n) fresh = base + "_" + std::to_string(n);
    issue(path, "name '" + name + "' already used; renamed to '" + fresh + "'");
    return fresh;
  }

  void read_page(const pt::ptree& page, const std::string& path) {
    std::map<std::string, std::size_t> counters;
    for (const auto& [tag, node] : page) {
      const std::string at = path + "/" + tag + "[" + std::to_string(counters[tag]++) + "]";
      if (tag == "place") read_place(node, at);
      else if (tag == "trans") read_trans(node, at);
      else if (tag == "arc") {
        const auto orientation = attr(node, "orientation");
        const auto trans = node.get<std::string>("transend.<xmlattr>.idref", "");
        const auto place = node.get<std::string>("placeend.<xmlattr>.idref", "");
        const auto text = text_of(node, "annot");
        if (orientation == "PtoT" || orientation == "BOTHDIR") raw_arcs_.push_back(RawArc{at, place, trans, true, text});
        if (orientation == "TtoP" || orientation == "BOTHDIR") raw_arcs_.push_back(RawArc{at, place, trans, false, text});
        if (orientation != "PtoT" && orientation != "TtoP" && orientation != "BOTHDIR")
          issue(at, "arc orientation '" + orientation + "' not supported");
      } else if (tag != "pageattr" && tag != "<xmlattr>" && tag != "<xmlcomment>" && tag != "constraints") {
        issue(at, "element <" + tag + "> ignored");
      }
    }
  }

  void read_place(const pt::ptree& node, const std::string& path) {
    const auto id = attr(node, "id");
    Place p;
    p.name = unique_name(trim(node.get<std::string>("text", "")), id, path);
    p.color_set = ensure_color_set(text_of(node, "type"), path + "/type");
    if (node.get_child_optional("port")) issue(path + "/port", "port information ignored");
    if (node.get_child_optional("fusioninfo")) issue(path + "/fusioninfo", "fusion information ignored");
    place_ids_[id] = def_.places.size();
    def_.places.push_back(p);
    read_initmark(p, text_of(node, "initmark"), path + "/initmark");
  }

  void read_initmark(const Place& p, const std::string& text, const std::string& path) {
    if (text.empty()) return;
    const ColorSet& cs = def_.color_sets.at(p.color_set);
    auto& dst = init_.tokens[p.name];
    for (const auto& raw : split_outside_quotes(text, "++")) {
      std::string term = trim(raw);
      if (term.empty()) continue;
      try {
        Int count = 1;
        if (auto tick = find_outside_quotes(term, '`')) {
          count = evaluate(parse_expression(term.substr(0, *tick)), {}, FunctionTable{}).as_int();
          term = trim(term.substr(*tick + 1));
        }
        Time ts = 0;
        if (auto at = find_outside_quotes(term, '@')) {
          ts = evaluate(parse_expression(term.substr(*at + 1)), {}, FunctionTable{}).as_int();
          term = trim(term.substr(0, *at));
          if (!cs.timed) {
            issue(path, "timestamp on untimed place '" + p.name + "' dropped");
            ts = 0;
          }
        }
        const Value v = constant_value(parse_expression(term), def_.color_sets, p.color_set);
        if (!def_.color_sets.is_member(p.color_set, v) || count < 0 || ts < 0)
          throw Error(ErrorCode::ColorMismatch, "'" + term + "' is not a member of " + p.color_set);
        for (Int k = 0; k < count; ++k) dst.push_back(Token{v, ts});
      } catch (const std::exception&) {
        issue(path, "initial marking term '" + term + "' not translated");
      }
    }
  }

  void read_trans(const pt::ptree& node, const std::string& path) {
    const auto id = attr(node, "id");
    Transition t;
    t.name = unique_name(trim(node.get<std::string>("text", "")), id, path);
    if (node.get_child_optional("subst")) issue(path + "/subst", "substitution transition imported as a plain transition");
    std::string guard = text_of(node, "cond");
    if (guard.size() >= 2 && guard.front() == '[' && guard.back() == ']') guard = trim(guard.substr(1, guard.size() - 2));
    if (!guard.empty()) {
      try {
        t.guard = parse_expression(guard);
      } catch (const Error&) {
        issue(path + "/cond", "untranslated inscription '" + guard + "'; guard omitted");
      }
    }
    std::string time = text_of(node, "time");
    if (!time.empty()) {
      std::string body = time.rfind("@+", 0) == 0 ? trim(time.substr(2)) : time;
      try {
        const Value d = evaluate(parse_expression(body), {}, FunctionTable{});
        if (!d.is_int() || d.as_int() < 0) throw Error(ErrorCode::TypeErrorAtRuntime, "not a non-negative integer");
        t.delay = d.as_int();
      } catch (const Error&) {
        issue(path + "/time", "untranslated delay '" + time + "'; delay omitted");
      }
    }
    trans_ids_[id] = def_.transitions.size();
    trans_paths_.push_back(path);
    def_.transitions.push_back(t);
  }

  void build_arcs() {
    for (const auto& ra : raw_arcs_) {
      auto p = place_ids_.find(ra.place_id);
      auto t = trans_ids_.find(ra.trans_id);
      if (p == place_ids_.end() || t == trans_ids_.end()) {
        issue(ra.path, "arc endpoint not found; arc dropped");
        continue;
      }
      const auto& place = def_.places[p->second].name;
      const auto& trans = def_.transitions[t->second].name;
      Arc a{ra.input ? place : trans, ra.input ? trans : place, std::nullopt};
      try {
        if (ra.text.empty()) throw Error(ErrorCode::SyntaxError, "empty inscription");
        a.inscription = parse_arc_inscription(ra.text);
      } catch (const Error&) {
        issue(ra.path + "/annot", "untranslated inscription '" + ra.text + "'");
      }
      def_.arcs.push_back(std::move(a));
      arc_paths_.push_back(ra.path);
    }
  }

  bool usable(const Expr& e, const std::set<std::string>& bound) const {
    if (has_call(e) && def_.functions.empty()) return false;
    if (has_call(e)) {
      // Accept calls only to functions that exist with matching arity.
      bool ok = true;
      std::function<void(const Expr&)> check = [&](const Expr& x) {
        std::visit(
            [&](const auto& n) {
              using T = std::decay_t<decltype(n)>;
              if constexpr (std::is_same_v<T, ast::Call>) {
                const Function* f = def_.functions.find(n.function);
                if (!f || f->params.size() != n.args.size()) ok = false;
                for (const auto& a : n.args) check(a);
              } else if constexpr (std::is_same_v<T, ast::Unary>) {
                check(n.operand);
              } else if constexpr (std::is_same_v<T, ast::Binary>) {
                check(n.lhs);
                check(n.rhs);
              } else if constexpr (std::is_same_v<T, ast::Tuple>) {
                check(n.first);
                check(n.second);
              }
            },
            x.node().v);
      };
      check(e);
      if (!ok) return false;
    }
    for (const auto& v : free_variables(e))
      if (!bound.count(v) && !literal_count(v)) return false;
    return true;
  }

  std::size_t literal_count(const std::string& name) const {
    std::size_t n = 0;
    for (const auto& cs : def_.color_sets.sets())
      if (cs.kind == ColorKind::Enumerated && std::count(cs.literals.begin(), cs.literals.end(), name)) ++n;
    return n;
  }

  // Replaces anything that would keep the document from validating with placeholders.
  void repair_transitions() {
    std::size_t fresh = 0;
    std::set<std::string> taken;
    for (const auto& a : def_.arcs)
      if (a.inscription) {
        for (const auto& v : free_variables(a.inscription->body)) taken.insert(v);
      }
    auto fresh_var = [&] {
      std::string name;
      do name = "_v" + std::to_string(++fresh);
      while (taken.count(name) || literal_count(name));
      taken.insert(name);
      return name;
    };

    for (std::size_t t = 0; t < def_.transitions.size(); ++t) {
      auto& tr = def_.transitions[t];
      std::vector<std::size_t> ins, outs;
      for (std::size_t i = 0; i < def_.arcs.size(); ++i) {
        if (def_.arcs[i].target == tr.name) ins.push_back(i);
        if (def_.arcs[i].source == tr.name) outs.push_back(i);
      }
      std::vector<std::string> order;
      std::set<std::string> bound;
      auto bind = [&](const Expr& e) {
        for (const auto& v : free_variables(e))
          if (!literal_count(v) && bound.insert(v).second) order.push_back(v);
      };
      auto placeholder_var = [&](std::size_t i, const std::string& why) {
        const std::string v = fresh_var();
        def_.arcs[i].inscription = ArcInscription{Expr::var(v), std::nullopt};
        issue(arc_paths_[i], why + "; replaced by variable " + v);
        bound.insert(v);
        order.push_back(v);
      };
      // Pattern arcs first: they define the variables.
      for (auto i : ins) {
        auto& ins_opt = def_.arcs[i].inscription;
        if (!ins_opt) {
          placeholder_var(i, "untranslated inscription");
          continue;
        }
        if (ins_opt->delay) {
          issue(arc_paths_[i], "delay on input arc dropped");
          ins_opt->delay.reset();
        }
        bool ambiguous = false;
        for (const auto& v : free_variables(ins_opt->body))
          if (literal_count(v) > 1) ambiguous = true;
        if (ambiguous) placeholder_var(i, "ambiguous enumeration literal");
        else if (ins_opt->body.is_pattern()) bind(ins_opt->body);
      }
      for (auto i : ins) {
        const auto& body = def_.arcs[i].inscription->body;
        if (!body.is_pattern() && !usable(body, bound)) placeholder_var(i, "untranslated inscription");
      }
      if (tr.guard && !usable(*tr.guard, bound)) {
        issue(trans_paths_[t] + "/cond", "guard refers to unbound names or unknown functions; guard omitted");
        tr.guard.reset();
      }
      for (auto i : outs) {
        auto& a = def_.arcs[i];
        const auto& set = def_.places[place_ids_by_name(a.target)].color_set;
        if (a.inscription && a.inscription->delay && !usable(*a.inscription->delay, bound)) {
          issue(arc_paths_[i], "untranslated delay dropped");
          a.inscription->delay.reset();
        }
        if (!a.inscription || !usable(a.inscription->body, bound)) {
          const Value v = default_member(def_.color_sets, set);
          issue(arc_paths_[i], "untranslated inscription; replaced by " + format_value(v));
          a.inscription = ArcInscription{Expr::literal(v), std::nullopt};
        }
      }
      tr.variables = order;
    }
  }

  std::size_t place_ids_by_name(const std::string& name) const {
    for (std::size_t i = 0; i < def_.places.size(); ++i)
      if (def_.places[i].name == name) return i;
    throw Error(ErrorCode::UnknownPlace, name);
  }

  XmlImport finish() {
    XmlImport out;
    out.document = document_json(def_, init_);
    try {
      load_model(parse_document(out.document));
    } catch (const Error& e) {
      issue("/", std::string("translated document does not validate: ") + e.what());
    }
    out.issues = std::move(issues_);
    return out;
  }

  NetDefinition def_;
  InitialMarking init_;
  std::vector<XmlIssue> issues_;
  std::set<std::string> names_;
  std::map<std::string, std::size_t> place_ids_, trans_ids_;
  std::vector<std::string> trans_paths_, arc_paths_;
  std::vector<RawArc> raw_arcs_;
};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string comment_safe(std::string s) {
  for (std::size_t i; (i = s.find("--")) != std::string::npos;) s.replace(i, 2, "- -");
  return s;
}

std::string coord(long v) { return std::to_string(v) + ".000000"; }

}  // namespace

XmlImport import_cpn_xml(std::string_view xml) { return XmlReader().run(xml); }

std::string export_cpn_xml_stub(const Json& document) {
  if (document.is_object() &&
      (document.contains("subModules") || document.contains("substitutions") || document.contains("fusionSets")))
    throw Error(ErrorCode::HierarchyUnsupportedInStub, "hierarchical documents cannot be exported as a stub");
  const Document doc = parse_document(document);
  const auto& def = doc.definition;

  std::ostringstream x;
  x << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  x << "<workspaceElements>\n";
  x << "  <generator tool=\"cpnkit\" version=\"0.1.0\" format=\"6\"/>\n";
  x << "  <cpnet>\n";
  x << "    <globbox>\n";
  int next_id = 1;
  auto id = [&] { return "ID" + std::to_string(next_id++); };
  for (const auto& cs : def.color_sets.sets()) {
    x << "      <color id=\"" << id() << "\">\n";
    x << "        <id>" << escape(cs.name) << "</id>\n";
    switch (cs.kind) {
      case ColorKind::Int: x << "        <int/>\n"; break;
      case ColorKind::Real: x << "        <real/>\n"; break;
      case ColorKind::String: x << "        <string/>\n"; break;
      case ColorKind::Enumerated:
        x << "        <enum>\n";
        for (const auto& l : cs.literals) x << "          <id>" << escape(l) << "</id>\n";
        x << "        </enum>\n";
        break;
      case ColorKind::Product:
        x << "        <product>\n          <id>" << escape(cs.left) << "</id>\n          <id>" << escape(cs.right)
          << "</id>\n        </product>\n";
        break;
    }
    if (cs.timed) x << "        <timed/>\n";
    x << "      </color>\n";
  }
  for (const auto& [name, fn] : def.functions.entries())
    x << "      <!-- " << comment_safe(pretty_print(name, fn)) << " -->\n";
  x << "    </globbox>\n";
  x << "    <page id=\"" << id() << "\">\n";
  x << "      <pageattr name=\"Net\"/>\n";

  std::map<std::string, std::string> ids;
  for (std::size_t i = 0; i < def.places.size(); ++i) {
    const auto& p = def.places[i];
    const auto pid = id();
    ids[p.name] = pid;
    x << "      <place id=\"" << pid << "\">\n";
    x << "        <posattr x=\"" << coord(0) << "\" y=\"" << coord(-150L * static_cast<long>(i)) << "\"/>\n";
    x << "        <text>" << escape(p.name) << "</text>\n";
    x << "        <type>\n          <text>" << escape(p.color_set) << "</text>\n        </type>\n";
    auto it = doc.initial.tokens.find(p.name);
    if (it != doc.initial.tokens.end() && !it->second.empty()) {
      std::string mark;
      for (const auto& t : sorted_tokens(it->second)) {
        if (!mark.empty()) mark += "++";
        mark += "1`" + format_value(t.value);
        if (t.timestamp) mark += "@" + std::to_string(t.timestamp);
      }
      x << "        <initmark>\n          <text>" << escape(mark) << "</text>\n        </initmark>\n";
    }
    x << "      </place>\n";
  }
  for (std::size_t i = 0; i < def.transitions.size(); ++i) {
    const auto& t = def.transitions[i];
    const auto tid = id();
    ids[t.name] = tid;
    x << "      <trans id=\"" << tid << "\">\n";
    x << "        <posattr x=\"" << coord(150) << "\" y=\"" << coord(-150L * static_cast<long>(i)) << "\"/>\n";
    x << "        <text>" << escape(t.name) << "</text>\n";
    if (t.guard) x << "        <cond>\n          <text>[" << escape(pretty_print(*t.guard)) << "]</text>\n        </cond>\n";
    if (t.delay) x << "        <time>\n          <text>@+" << t.delay << "</text>\n        </time>\n";
    x << "      </trans>\n";
  }
  std::set<std::string> place_names;
  for (const auto& p : def.places) place_names.insert(p.name);
  for (const auto& a : def.arcs) {
    const bool input = place_names.count(a.source) > 0;
    const auto& place = input ? a.source : a.target;
    const auto& trans = input ? a.target : a.source;
    x << "      <arc id=\"" << id() << "\" orientation=\"" << (input ? "PtoT" : "TtoP") << "\">\n";
    x << "        <transend idref=\"" << ids[trans] << "\"/>\n";
    x << "        <placeend idref=\"" << ids[place] << "\"/>\n";
    if (a.inscription)
      x << "        <annot>\n          <text>" << escape(pretty_print(*a.inscription)) << "</text>\n        </annot>\n";
    x << "      </arc>\n";
  }
  x << "    </page>\n";
  x << "  </cpnet>\n";
  x << "</workspaceElements>\n";
  return x.str();
}

}  // namespace cpn
