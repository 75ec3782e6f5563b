#include <algorithm>
#include <set>

#include "cpnkit/error.hpp"
#include "cpnkit/interchange.hpp"

namespace cpn {

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, msg, path);
}

std::string kind_of(const Json& j) { return j.type_name(); }

const Json& require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "expected an object, got " + kind_of(j));
  return j;
}

const Json& require_array(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "expected an array, got " + kind_of(j));
  return j;
}

std::string require_string(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string, got " + kind_of(j));
  return j.get<std::string>();
}

Int require_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_unsigned() && j.get<std::uint64_t>() > INT64_MAX))
    schema_fail(path, "expected an integer");
  return j.get<Int>();
}

void only_keys(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      schema_fail(path.empty() ? key : path + "." + key, "unknown key '" + key + "'");
}

const Json* member(const Json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const Json& required(const Json& obj, const char* key, const std::string& path) {
  const Json* j = member(obj, key);
  if (!j) schema_fail(path, std::string("missing key '") + key + "'");
  return *j;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

template <class F>
auto located(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.at(path);
  }
}

struct Fragment {
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
};

Fragment parse_fragment(const Json& obj, const std::string& base) {
  Fragment out;
  const auto places_path = join(base, "places");
  const auto& places = require_array(required(obj, "places", base), places_path);
  for (std::size_t i = 0; i < places.size(); ++i) {
    const auto path = item(places_path, i);
    const auto& p = require_object(places[i], path);
    only_keys(p, path, {"name", "colorSet"});
    out.places.push_back(Place{require_string(required(p, "name", path), path + ".name"),
                               require_string(required(p, "colorSet", path), path + ".colorSet")});
  }

  const auto trans_path = join(base, "transitions");
  const auto& transitions = require_array(required(obj, "transitions", base), trans_path);
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto path = item(trans_path, i);
    const auto& t = require_object(transitions[i], path);
    only_keys(t, path, {"name", "variables", "guard", "transitionDelay"});
    Transition tr;
    tr.name = require_string(required(t, "name", path), path + ".name");
    if (const Json* vars = member(t, "variables")) {
      require_array(*vars, path + ".variables");
      for (std::size_t k = 0; k < vars->size(); ++k)
        tr.variables.push_back(require_string((*vars)[k], item(path + ".variables", k)));
    }
    if (const Json* g = member(t, "guard"); g && !g->is_null()) {
      const auto text = require_string(*g, path + ".guard");
      tr.guard = located(path + ".guard", [&] { return parse_expression(text); });
    }
    if (const Json* d = member(t, "transitionDelay")) tr.delay = require_int(*d, path + ".transitionDelay");
    out.transitions.push_back(std::move(tr));
  }

  const auto arcs_path = join(base, "arcs");
  const auto& arcs = require_array(required(obj, "arcs", base), arcs_path);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const auto path = item(arcs_path, i);
    const auto& a = require_object(arcs[i], path);
    only_keys(a, path, {"source", "target", "inscription"});
    Arc arc;
    arc.source = require_string(required(a, "source", path), path + ".source");
    arc.target = require_string(required(a, "target", path), path + ".target");
    const auto text = require_string(required(a, "inscription", path), path + ".inscription");
    if (text.find_first_not_of(" \t\r\n") != std::string::npos)
      arc.inscription = located(path + ".inscription", [&] { return parse_arc_inscription(text); });
    out.arcs.push_back(std::move(arc));
  }
  return out;
}

std::map<std::string, std::vector<Token>, std::less<>> parse_tokens(const Json& obj, const std::string& path) {
  std::map<std::string, std::vector<Token>, std::less<>> out;
  require_object(obj, path);
  for (const auto& [place, list] : obj.items()) {
    const auto place_path = path + "." + place;
    require_array(list, place_path);
    auto& dst = out[place];
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto tok_path = item(place_path, i);
      const auto& t = require_object(list[i], tok_path);
      only_keys(t, tok_path, {"value", "timestamp"});
      Token tok;
      tok.value = located(tok_path + ".value", [&] { return value_from_json(required(t, "value", tok_path)); });
      if (const Json* ts = member(t, "timestamp")) {
        tok.timestamp = require_int(*ts, tok_path + ".timestamp");
        if (tok.timestamp < 0) schema_fail(tok_path + ".timestamp", "timestamp must be non-negative");
      }
      dst.push_back(std::move(tok));
    }
  }
  return out;
}

PortMode parse_mode(const Json& j, const std::string& path) {
  const auto s = require_string(j, path);
  if (s == "in") return PortMode::In;
  if (s == "out") return PortMode::Out;
  if (s == "inout") return PortMode::InOut;
  schema_fail(path, "port mode must be in, out or inout");
}

Hcpn parse_hierarchy(const Json& doc, const Document& flat) {
  Hcpn h;
  h.color_sets = flat.definition.color_sets;
  h.functions = flat.definition.functions;
  h.global_clock = flat.initial.global_clock;
  Module root;
  root.name = h.root;
  root.places = flat.definition.places;
  root.transitions = flat.definition.transitions;
  root.arcs = flat.definition.arcs;
  for (const auto& [p, toks] : flat.initial.tokens) root.tokens.emplace(p, toks);
  h.modules.push_back(std::move(root));

  if (const Json* subs = member(doc, "subModules")) {
    require_array(*subs, "subModules");
    for (std::size_t i = 0; i < subs->size(); ++i) {
      const auto path = item("subModules", i);
      const auto& m = require_object((*subs)[i], path);
      only_keys(m, path, {"name", "places", "transitions", "arcs", "ports", "initialMarking"});
      Module mod;
      mod.name = require_string(required(m, "name", path), path + ".name");
      if (mod.name == h.root) schema_fail(path + ".name", "module name '" + h.root + "' is reserved for the top level");
      auto frag = parse_fragment(m, path);
      mod.places = std::move(frag.places);
      mod.transitions = std::move(frag.transitions);
      mod.arcs = std::move(frag.arcs);
      if (const Json* ports = member(m, "ports")) {
        require_array(*ports, path + ".ports");
        for (std::size_t k = 0; k < ports->size(); ++k) {
          const auto pp = item(path + ".ports", k);
          const auto& po = require_object((*ports)[k], pp);
          only_keys(po, pp, {"place", "mode"});
          mod.ports.push_back(Port{require_string(required(po, "place", pp), pp + ".place"),
                                   parse_mode(required(po, "mode", pp), pp + ".mode")});
        }
      }
      if (const Json* im = member(m, "initialMarking")) {
        require_object(*im, path + ".initialMarking");
        only_keys(*im, path + ".initialMarking", {"tokens"});
        if (const Json* toks = member(*im, "tokens")) mod.tokens = parse_tokens(*toks, path + ".initialMarking.tokens");
      }
      h.modules.push_back(std::move(mod));
    }
  }

  if (const Json* subs = member(doc, "substitutions")) {
    require_array(*subs, "substitutions");
    for (std::size_t i = 0; i < subs->size(); ++i) {
      const auto path = item("substitutions", i);
      const auto& s = require_object((*subs)[i], path);
      only_keys(s, path, {"transition", "parent", "child", "portMap"});
      SubstitutionTransition st;
      st.transition = require_string(required(s, "transition", path), path + ".transition");
      st.parent = require_string(required(s, "parent", path), path + ".parent");
      st.child = require_string(required(s, "child", path), path + ".child");
      const auto& pm = require_array(required(s, "portMap", path), path + ".portMap");
      for (std::size_t k = 0; k < pm.size(); ++k) {
        const auto pp = item(path + ".portMap", k);
        const auto& e = require_object(pm[k], pp);
        only_keys(e, pp, {"socket", "port"});
        st.port_map.push_back(SocketPort{require_string(required(e, "socket", pp), pp + ".socket"),
                                         require_string(required(e, "port", pp), pp + ".port")});
      }
      h.substitutions.push_back(std::move(st));
    }
  }

  if (const Json* fs = member(doc, "fusionSets")) {
    require_array(*fs, "fusionSets");
    for (std::size_t i = 0; i < fs->size(); ++i) {
      const auto path = item("fusionSets", i);
      const auto& f = require_object((*fs)[i], path);
      only_keys(f, path, {"name", "members"});
      FusionSet set;
      set.name = require_string(required(f, "name", path), path + ".name");
      const auto& members = require_array(required(f, "members", path), path + ".members");
      for (std::size_t k = 0; k < members.size(); ++k) {
        const auto mp = item(path + ".members", k);
        const auto& e = require_object(members[k], mp);
        only_keys(e, mp, {"module", "place"});
        set.members.push_back(FusionMember{require_string(required(e, "module", mp), mp + ".module"),
                                           require_string(required(e, "place", mp), mp + ".place")});
      }
      h.fusion_sets.push_back(std::move(set));
    }
  }
  return h;
}

Json token_list(const std::vector<Token>& tokens) {
  Json list = Json::array();
  for (const auto& t : sorted_tokens(tokens)) {
    Json tok = Json::object();
    tok["value"] = value_to_json(t.value);
    tok["timestamp"] = t.timestamp;
    list.push_back(std::move(tok));
  }
  return list;
}

template <class TokenMap>
Json tokens_json(const std::vector<Place>& places, const TokenMap& tokens) {
  Json out = Json::object();
  std::set<std::string, std::less<>> seen;
  for (const auto& p : places) {
    seen.insert(p.name);
    auto it = tokens.find(p.name);
    if (it != tokens.end() && !it->second.empty()) out[p.name] = token_list(it->second);
  }
  for (const auto& [name, toks] : tokens)
    if (!seen.count(name) && !toks.empty()) out[name] = token_list(toks);
  return out;
}

void fragment_json(Json& out, const std::vector<Place>& places, const std::vector<Transition>& transitions,
                   const std::vector<Arc>& arcs) {
  Json ps = Json::array();
  for (const auto& p : places) ps.push_back(Json{{"name", p.name}, {"colorSet", p.color_set}});
  Json ts = Json::array();
  for (const auto& t : transitions) {
    Json tj = Json::object();
    tj["name"] = t.name;
    tj["variables"] = t.variables;
    tj["guard"] = t.guard ? Json(pretty_print(*t.guard)) : Json(nullptr);
    tj["transitionDelay"] = t.delay;
    ts.push_back(std::move(tj));
  }
  Json as = Json::array();
  for (const auto& a : arcs)
    as.push_back(Json{{"source", a.source},
                      {"target", a.target},
                      {"inscription", a.inscription ? pretty_print(*a.inscription) : std::string()}});
  out["places"] = std::move(ps);
  out["transitions"] = std::move(ts);
  out["arcs"] = std::move(as);
}

Json header(const ColorSetRegistry& sets, const FunctionTable& fns) {
  Json out = Json::object();
  out["formatVersion"] = kFormatVersion;
  Json cs = Json::array();
  for (const auto& s : sets.sets()) cs.push_back(format_colorset(s));
  out["colorSets"] = std::move(cs);
  if (!fns.empty()) {
    Json fs = Json::array();
    for (const auto& [name, fn] : fns.entries()) fs.push_back(pretty_print(name, fn));
    out["functions"] = std::move(fs);
  }
  return out;
}

}  // namespace

Json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int: return Json(v.as_int());
    case Value::Kind::Real: return Json(v.as_real());
    case Value::Kind::String: return Json(v.as_string());
    case Value::Kind::Bool: return Json(v.as_bool());
    case Value::Kind::Enum: return Json{{"enum", v.as_enum().set}, {"lit", v.as_enum().literal}};
    case Value::Kind::Pair: return Json::array({value_to_json(v.first()), value_to_json(v.second())});
  }
  return Json();
}

Value value_from_json(const Json& j) {
  if (j.is_boolean()) return Value::boolean(j.get<bool>());
  if (j.is_number_unsigned()) {
    if (j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
      throw Error(ErrorCode::SchemaError, "integer out of range");
    return Value::integer(static_cast<Int>(j.get<std::uint64_t>()));
  }
  if (j.is_number_integer()) return Value::integer(j.get<Int>());
  if (j.is_number_float()) return Value::real(j.get<double>());
  if (j.is_string()) return Value::text(j.get<std::string>());
  if (j.is_array()) {
    if (j.size() != 2) throw Error(ErrorCode::SchemaError, "a pair value must have exactly two elements");
    return Value::pair(value_from_json(j[0]), value_from_json(j[1]));
  }
  if (j.is_object()) {
    if (j.size() != 2 || !j.contains("enum") || !j.contains("lit") || !j["enum"].is_string() || !j["lit"].is_string())
      throw Error(ErrorCode::SchemaError, "an enum value must be {\"enum\": set, \"lit\": literal}");
    return Value::enumerated(j["enum"].get<std::string>(), j["lit"].get<std::string>());
  }
  throw Error(ErrorCode::SchemaError, "unsupported value of type " + std::string(j.type_name()));
}

Document parse_document(const Json& doc) {
  require_object(doc, "");
  only_keys(doc, "",
            {"formatVersion", "colorSets", "functions", "places", "transitions", "arcs", "initialMarking", "subModules",
             "substitutions", "fusionSets"});
  const Int version = require_int(required(doc, "formatVersion", ""), "formatVersion");
  if (version != kFormatVersion) schema_fail("formatVersion", "unsupported format version " + std::to_string(version));

  Document out;
  const auto& sets = require_array(required(doc, "colorSets", ""), "colorSets");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto path = item("colorSets", i);
    const auto text = require_string(sets[i], path);
    located(path, [&] { parse_colorset_definitions(text, out.definition.color_sets, &out.warnings); });
  }
  if (const Json* fns = member(doc, "functions")) {
    require_array(*fns, "functions");
    for (std::size_t i = 0; i < fns->size(); ++i) {
      const auto path = item("functions", i);
      const auto text = require_string((*fns)[i], path);
      located(path, [&] { parse_function_definitions(text, out.definition.functions); });
    }
  }
  auto frag = parse_fragment(doc, "");
  out.definition.places = std::move(frag.places);
  out.definition.transitions = std::move(frag.transitions);
  out.definition.arcs = std::move(frag.arcs);

  const auto& im = require_object(required(doc, "initialMarking", ""), "initialMarking");
  only_keys(im, "initialMarking", {"globalClock", "tokens"});
  if (const Json* clock = member(im, "globalClock")) {
    out.initial.global_clock = require_int(*clock, "initialMarking.globalClock");
    if (out.initial.global_clock < 0) schema_fail("initialMarking.globalClock", "global clock must be non-negative");
  }
  if (const Json* toks = member(im, "tokens")) out.initial.tokens = parse_tokens(*toks, "initialMarking.tokens");

  if (member(doc, "subModules") || member(doc, "substitutions") || member(doc, "fusionSets"))
    out.hierarchy = parse_hierarchy(doc, out);
  return out;
}

Model load_model(const Document& doc) {
  Model m;
  m.warnings = doc.warnings;
  InitialMarking init = doc.initial;
  if (doc.hierarchy) {
    FlatNet flat = flatten(*doc.hierarchy);
    m.net = Net::compile(std::move(flat.definition));
    init = std::move(flat.initial);
    m.hierarchy = doc.hierarchy;
    m.names = std::move(flat.names);
  } else {
    m.net = Net::compile(doc.definition);
  }
  for (const auto& [place, toks] : init.tokens) {
    InitialMarking one;
    one.tokens.emplace(place, toks);
    located("initialMarking.tokens." + place, [&] { return m.net.make_marking(one); });
  }
  m.marking = m.net.make_marking(init);
  return m;
}

Model import_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
  return load_model(parse_document(doc));
}

Json document_json(const NetDefinition& def, const InitialMarking& init) {
  Json out = header(def.color_sets, def.functions);
  fragment_json(out, def.places, def.transitions, def.arcs);
  Json im = Json::object();
  if (init.global_clock != 0) im["globalClock"] = init.global_clock;
  Json toks = tokens_json(def.places, init.tokens);
  if (!toks.empty()) im["tokens"] = std::move(toks);
  out["initialMarking"] = std::move(im);
  return out;
}

Json document_json(const Hcpn& h) {
  const Module* root = h.find_module(h.root);
  if (!root) throw Error(ErrorCode::ValidationFailed, "root module '" + h.root + "' is missing");
  Json out = header(h.color_sets, h.functions);
  fragment_json(out, root->places, root->transitions, root->arcs);
  Json im = Json::object();
  if (h.global_clock != 0) im["globalClock"] = h.global_clock;
  Json toks = tokens_json(root->places, root->tokens);
  if (!toks.empty()) im["tokens"] = std::move(toks);
  out["initialMarking"] = std::move(im);

  Json subs = Json::array();
  for (const auto& m : h.modules) {
    if (m.name == h.root) continue;
    Json mj = Json::object();
    mj["name"] = m.name;
    fragment_json(mj, m.places, m.transitions, m.arcs);
    Json ports = Json::array();
    for (const auto& p : m.ports) ports.push_back(Json{{"place", p.place}, {"mode", std::string(port_mode_name(p.mode))}});
    mj["ports"] = std::move(ports);
    Json mt = tokens_json(m.places, m.tokens);
    if (!mt.empty()) mj["initialMarking"] = Json{{"tokens", std::move(mt)}};
    subs.push_back(std::move(mj));
  }
  out["subModules"] = std::move(subs);

  Json st = Json::array();
  for (const auto& s : h.substitutions) {
    Json pm = Json::array();
    for (const auto& sp : s.port_map) pm.push_back(Json{{"socket", sp.socket}, {"port", sp.port}});
    st.push_back(Json{{"transition", s.transition}, {"parent", s.parent}, {"child", s.child}, {"portMap", std::move(pm)}});
  }
  out["substitutions"] = std::move(st);

  Json fs = Json::array();
  for (const auto& f : h.fusion_sets) {
    Json members = Json::array();
    for (const auto& m : f.members) members.push_back(Json{{"module", m.module}, {"place", m.place}});
    fs.push_back(Json{{"name", f.name}, {"members", std::move(members)}});
  }
  out["fusionSets"] = std::move(fs);
  return out;
}

std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

std::string export_json(const Net& net, const Marking& marking) {
  return dump_document(document_json(net.definition(), net.to_initial(marking)));
}

std::string export_json(const Hcpn& h) { return dump_document(document_json(h)); }

std::string export_json(const Model& model) {
  return model.hierarchy ? export_json(*model.hierarchy) : export_json(model.net, model.marking);
}

}  // namespace cpn

namespace cpn {

Json env_json(const Env& env) {
  Json out = Json::object();
  for (const auto& [k, v] : env) out[k] = value_to_json(v);
  return out;
}

Env env_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "a binding must be an object of variable values");
  Env env;
  for (const auto& [k, v] : j.items()) env.emplace(k, located(k, [&] { return value_from_json(v); }));
  return env;
}

Json marking_json(const Net& net, const Marking& m) {
  Json out = Json::object();
  for (std::size_t p = 0; p < net.num_places(); ++p) {
    Json list = Json::array();
    for (const auto& t : m.tokens(p)) list.push_back(Json{{"value", value_to_json(t.value)}, {"timestamp", t.timestamp}});
    out[net.place(p).name] = std::move(list);
  }
  return out;
}

namespace {

Json placed_json(const std::vector<PlacedToken>& toks) {
  Json out = Json::array();
  for (const auto& t : toks)
    out.push_back(Json{{"place", t.place}, {"value", value_to_json(t.token.value)}, {"timestamp", t.token.timestamp}});
  return out;
}

Json optional_names(const std::optional<std::vector<std::string>>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json record_json(const FiringRecord& rec) {
  Json out = Json::object();
  out["index"] = rec.index;
  out["transition"] = rec.transition;
  out["binding"] = env_json(rec.env);
  out["consumed"] = placed_json(rec.consumed);
  out["produced"] = placed_json(rec.produced);
  out["clock"] = rec.clock;
  return out;
}

Json enabled_json(const Net& net, const std::vector<EnabledTransition>& enabled) {
  Json out = Json::array();
  for (const auto& en : enabled) {
    Json bindings = Json::array();
    for (const auto& b : en.bindings) bindings.push_back(env_json(b.env));
    out.push_back(Json{{"transition", net.transition(en.transition).name}, {"bindings", std::move(bindings)}});
  }
  return out;
}

Json report_json(const SpaceReport& r) {
  Json out = Json::object();
  out["num_states"] = r.num_states;
  out["num_edges"] = r.num_edges;
  out["num_sccs"] = r.num_sccs;
  out["truncated"] = r.truncated;
  out["home_markings"] = optional_names(r.home_markings);
  out["dead_markings"] = r.dead_markings;
  out["dead_transitions"] = optional_names(r.dead_transitions);
  out["live_transitions"] = optional_names(r.live_transitions);
  out["impartial_transitions"] = optional_names(r.impartial_transitions);
  Json bounds = Json::object();
  for (const auto& [name, b] : r.place_bounds) bounds[name] = Json{{"min", b.min}, {"max", b.max}};
  out["place_bounds"] = std::move(bounds);
  return out;
}

Json trace_json(const Net& net, const Trace& t) {
  Json out = Json::object();
  out["run_id"] = t.run_id;
  out["initial"] = marking_json(net, t.initial);
  out["initialClock"] = t.initial.global_clock();
  Json recs = Json::array();
  for (const auto& r : t.records) recs.push_back(record_json(r));
  out["records"] = std::move(recs);
  out["final"] = marking_json(net, t.final_marking);
  out["finalClock"] = t.final_marking.global_clock();
  out["reason"] = std::string(termination_name(t.reason));
  return out;
}

}  // namespace cpn
