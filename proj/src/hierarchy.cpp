#include "cpnkit/hierarchy.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "cpnkit/error.hpp"

namespace cpn {

std::string_view port_mode_name(PortMode m) noexcept {
  switch (m) {
    case PortMode::In: return "in";
    case PortMode::Out: return "out";
    case PortMode::InOut: return "inout";
  }
  return "inout";
}

std::string_view hierarchy_issue_name(HierarchyIssueKind k) noexcept {
  switch (k) {
    case HierarchyIssueKind::DuplicateModule: return "DuplicateModule";
    case HierarchyIssueKind::UnknownModule: return "UnknownModule";
    case HierarchyIssueKind::UnknownPlace: return "UnknownPlace";
    case HierarchyIssueKind::UnknownTransition: return "UnknownTransition";
    case HierarchyIssueKind::UnknownPort: return "UnknownPort";
    case HierarchyIssueKind::DuplicatePort: return "DuplicatePort";
    case HierarchyIssueKind::DuplicateSubstitution: return "DuplicateSubstitution";
    case HierarchyIssueKind::CyclicInstantiation: return "CyclicInstantiation";
    case HierarchyIssueKind::SocketPortColorMismatch: return "SocketPortColorMismatch";
    case HierarchyIssueKind::PortMapNotBijective: return "PortMapNotBijective";
    case HierarchyIssueKind::PortModeMismatch: return "PortModeMismatch";
    case HierarchyIssueKind::FusionTooSmall: return "FusionTooSmall";
    case HierarchyIssueKind::FusionColorMismatch: return "FusionColorMismatch";
    case HierarchyIssueKind::PlaceInSeveralFusionSets: return "PlaceInSeveralFusionSets";
  }
  return "HierarchyIssue";
}

std::string HierarchyIssue::to_string() const {
  std::string out(hierarchy_issue_name(kind));
  if (!path.empty()) out += " at " + path;
  return out + ": " + detail;
}

const Module* Hcpn::find_module(std::string_view name) const {
  for (const auto& m : modules)
    if (m.name == name) return &m;
  return nullptr;
}

namespace {

const Place* find_place(const Module& m, std::string_view name) {
  for (const auto& p : m.places)
    if (p.name == name) return &p;
  return nullptr;
}

bool has_transition(const Module& m, std::string_view name) {
  return std::any_of(m.transitions.begin(), m.transitions.end(), [&](const auto& t) { return t.name == name; });
}

const Port* find_port(const Module& m, std::string_view place) {
  for (const auto& p : m.ports)
    if (p.place == place) return &p;
  return nullptr;
}

class HcpnChecker {
 public:
  explicit HcpnChecker(const Hcpn& h) : h_(h) {}

  std::vector<HierarchyIssue> run() {
    check_modules();
    if (!h_.find_module(h_.root))
      add(HierarchyIssueKind::UnknownModule, "root module '" + h_.root + "' is missing", "");
    for (std::size_t i = 0; i < h_.substitutions.size(); ++i) check_substitution(i);
    check_cycles();
    check_fusions();
    return std::move(issues_);
  }

 private:
  void add(HierarchyIssueKind k, std::string detail, std::string path) {
    issues_.push_back(HierarchyIssue{k, std::move(detail), std::move(path)});
  }

  std::string module_path(std::size_t i) const {
    if (h_.modules[i].name == h_.root) return "";
    std::size_t k = 0;
    for (std::size_t j = 0; j < i; ++j)
      if (h_.modules[j].name != h_.root) ++k;
    return "subModules[" + std::to_string(k) + "].";
  }

  void check_modules() {
    std::set<std::string> names;
    for (std::size_t i = 0; i < h_.modules.size(); ++i) {
      const auto& m = h_.modules[i];
      if (!names.insert(m.name).second)
        add(HierarchyIssueKind::DuplicateModule, "module '" + m.name + "' declared twice", module_path(i) + "name");
      std::set<std::string> ports;
      for (std::size_t p = 0; p < m.ports.size(); ++p) {
        const auto path = module_path(i) + "ports[" + std::to_string(p) + "]";
        if (!find_place(m, m.ports[p].place))
          add(HierarchyIssueKind::UnknownPlace, "port '" + m.ports[p].place + "' is not a place of " + m.name, path);
        if (!ports.insert(m.ports[p].place).second)
          add(HierarchyIssueKind::DuplicatePort, "port '" + m.ports[p].place + "' declared twice", path);
      }
    }
  }

  void check_substitution(std::size_t i) {
    const auto& s = h_.substitutions[i];
    const std::string path = "substitutions[" + std::to_string(i) + "]";
    for (std::size_t j = 0; j < i; ++j)
      if (h_.substitutions[j].parent == s.parent && h_.substitutions[j].transition == s.transition)
        add(HierarchyIssueKind::DuplicateSubstitution, "transition '" + s.transition + "' substituted twice", path);
    const Module* parent = h_.find_module(s.parent);
    const Module* child = h_.find_module(s.child);
    if (!parent) add(HierarchyIssueKind::UnknownModule, "parent module '" + s.parent + "' is missing", path + ".parent");
    if (!child) add(HierarchyIssueKind::UnknownModule, "child module '" + s.child + "' is missing", path + ".child");
    if (!parent || !child) return;
    if (!has_transition(*parent, s.transition)) {
      add(HierarchyIssueKind::UnknownTransition, "'" + s.transition + "' is not a transition of " + s.parent,
          path + ".transition");
      return;
    }

    // Directions of arcs between the substitution transition and each adjacent place.
    std::map<std::string, std::pair<bool, bool>> adjacent;  // place -> (into transition, out of transition)
    for (const auto& a : parent->arcs) {
      if (a.target == s.transition) adjacent[a.source].first = true;
      if (a.source == s.transition) adjacent[a.target].second = true;
    }

    std::set<std::string> sockets, ports;
    for (std::size_t k = 0; k < s.port_map.size(); ++k) {
      const auto& sp = s.port_map[k];
      const std::string at = path + ".portMap[" + std::to_string(k) + "]";
      const Place* socket = find_place(*parent, sp.socket);
      const Port* port = find_port(*child, sp.port);
      const Place* port_place = find_place(*child, sp.port);
      if (!socket) add(HierarchyIssueKind::UnknownPlace, "socket '" + sp.socket + "' is not a place of " + s.parent, at);
      if (!port || !port_place) add(HierarchyIssueKind::UnknownPort, "'" + sp.port + "' is not a port of " + s.child, at);
      if (!sockets.insert(sp.socket).second || !ports.insert(sp.port).second)
        add(HierarchyIssueKind::PortMapNotBijective, "socket or port mapped twice", at);
      if (!socket || !port || !port_place) continue;
      if (socket->color_set != port_place->color_set)
        add(HierarchyIssueKind::SocketPortColorMismatch,
            "socket '" + sp.socket + "' (" + socket->color_set + ") and port '" + sp.port + "' (" +
                port_place->color_set + ") differ",
            at);
      auto it = adjacent.find(sp.socket);
      if (it == adjacent.end()) continue;
      const auto [in, out] = it->second;
      const bool ok = port->mode == PortMode::InOut || (port->mode == PortMode::In && in && !out) ||
                      (port->mode == PortMode::Out && out && !in);
      if (!ok)
        add(HierarchyIssueKind::PortModeMismatch,
            "port '" + sp.port + "' has mode " + std::string(port_mode_name(port->mode)) +
                " but the arcs at socket '" + sp.socket + "' disagree",
            at);
    }
    for (const auto& [place, dirs] : adjacent)
      if (!sockets.count(place))
        add(HierarchyIssueKind::PortMapNotBijective, "socket '" + place + "' has no port", path + ".portMap");
    for (const auto& sock : sockets)
      if (find_place(*parent, sock) && !adjacent.count(sock))
        add(HierarchyIssueKind::PortMapNotBijective, "'" + sock + "' is not adjacent to " + s.transition,
            path + ".portMap");
    for (const auto& p : child->ports)
      if (!ports.count(p.place))
        add(HierarchyIssueKind::PortMapNotBijective, "port '" + p.place + "' of " + s.child + " is unmapped",
            path + ".portMap");
  }

  void check_cycles() {
    std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> children;
    for (std::size_t i = 0; i < h_.substitutions.size(); ++i)
      children[h_.substitutions[i].parent].emplace_back(h_.substitutions[i].child, i);
    std::map<std::string, int> state;  // 1 on stack, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& m) {
      state[m] = 1;
      for (const auto& [c, i] : children[m]) {
        if (state[c] == 1)
          add(HierarchyIssueKind::CyclicInstantiation, "module '" + c + "' instantiates itself through " + m,
              "substitutions[" + std::to_string(i) + "]");
        else if (state[c] == 0)
          visit(c);
      }
      state[m] = 2;
    };
    for (const auto& m : h_.modules)
      if (state[m.name] == 0) visit(m.name);
  }

  void check_fusions() {
    std::map<std::pair<std::string, std::string>, std::string> owner;
    for (std::size_t i = 0; i < h_.fusion_sets.size(); ++i) {
      const auto& f = h_.fusion_sets[i];
      const std::string path = "fusionSets[" + std::to_string(i) + "]";
      if (f.members.size() < 2) add(HierarchyIssueKind::FusionTooSmall, "fusion set '" + f.name + "' needs two members", path);
      std::optional<std::string> color;
      for (std::size_t k = 0; k < f.members.size(); ++k) {
        const auto& mem = f.members[k];
        const std::string at = path + ".members[" + std::to_string(k) + "]";
        const Module* m = h_.find_module(mem.module);
        if (!m) {
          add(HierarchyIssueKind::UnknownModule, "module '" + mem.module + "' is missing", at);
          continue;
        }
        const Place* p = find_place(*m, mem.place);
        if (!p) {
          add(HierarchyIssueKind::UnknownPlace, "'" + mem.place + "' is not a place of " + mem.module, at);
          continue;
        }
        if (!color) color = p->color_set;
        else if (*color != p->color_set)
          add(HierarchyIssueKind::FusionColorMismatch,
              "fusion set '" + f.name + "' mixes " + *color + " and " + p->color_set, at);
        auto [it, fresh] = owner.emplace(std::make_pair(mem.module, mem.place), f.name);
        if (!fresh && it->second != f.name)
          add(HierarchyIssueKind::PlaceInSeveralFusionSets,
              mem.module + "." + mem.place + " is in fusion sets " + it->second + " and " + f.name, at);
      }
    }
  }

  const Hcpn& h_;
  std::vector<HierarchyIssue> issues_;
};

struct UnionFind {
  std::vector<std::size_t> parent;
  std::size_t make() {
    parent.push_back(parent.size());
    return parent.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Keeps the smaller id as root so that representatives follow creation order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

std::string qualify(const std::string& instance, const std::string& local) {
  return instance.empty() ? local : instance + "::" + local;
}

class Flattener {
 public:
  explicit Flattener(const Hcpn& h) : h_(h) {
    for (const auto& s : h.substitutions) subs_[s.parent].push_back(&s);
  }

  FlatNet run() {
    expand(*h_.find_module(h_.root), "");
    fuse();
    return emit();
  }

 private:
  struct RawPlace {
    Origin origin;
    std::string color_set;
  };
  struct Instance {
    const Module* module;
    std::string path;
    std::map<std::string, std::size_t, std::less<>> places;  // local -> raw id
    std::set<std::string, std::less<>> substituted;
  };

  std::size_t expand(const Module& m, const std::string& path) {
    const std::size_t id = instances_.size();
    instances_.push_back(Instance{&m, path, {}, {}});
    for (const auto& p : m.places) {
      const std::size_t raw = uf_.make();
      raw_.push_back(RawPlace{Origin{path, p.name}, p.color_set});
      instances_[id].places.emplace(p.name, raw);
    }
    for (const auto* s : subs_[m.name]) {
      instances_[id].substituted.insert(s->transition);
      const std::size_t child = expand(*h_.find_module(s->child), qualify(path, s->transition));
      for (const auto& sp : s->port_map)
        uf_.unite(instances_[id].places.at(sp.socket), instances_[child].places.at(sp.port));
    }
    return id;
  }

  void fuse() {
    std::vector<std::vector<std::size_t>> members(h_.fusion_sets.size());
    for (std::size_t f = 0; f < h_.fusion_sets.size(); ++f) {
      for (const auto& mem : h_.fusion_sets[f].members)
        for (const auto& inst : instances_)
          if (inst.module->name == mem.module) members[f].push_back(inst.places.at(mem.place));
      for (std::size_t k = 1; k < members[f].size(); ++k) uf_.unite(members[f][0], members[f][k]);
    }
    for (std::size_t f = 0; f < members.size(); ++f) {
      if (members[f].empty()) continue;
      const auto root = uf_.find(members[f][0]);
      auto [it, fresh] = fusion_name_.emplace(root, h_.fusion_sets[f].name);
      if (!fresh && it->second != h_.fusion_sets[f].name)
        throw Error(ErrorCode::ValidationFailed,
                    "fusion sets " + it->second + " and " + h_.fusion_sets[f].name + " are joined through a socket");
    }
  }

  FlatNet emit() {
    FlatNet out;
    out.definition.color_sets = h_.color_sets;
    out.definition.functions = h_.functions;
    out.initial.global_clock = h_.global_clock;

    std::map<std::size_t, std::string> group_name;
    for (std::size_t raw = 0; raw < raw_.size(); ++raw) {
      const auto root = uf_.find(raw);
      if (!group_name.count(root)) {
        auto f = fusion_name_.find(root);
        std::string name = f != fusion_name_.end() ? f->second : qualify(raw_[root].origin.instance, raw_[root].origin.local);
        out.definition.places.push_back(Place{name, raw_[root].color_set});
        out.names.origin_of[name] = raw_[root].origin;
        group_name.emplace(root, std::move(name));
      }
      out.names.flat_of[raw_[raw].origin] = group_name.at(root);
    }

    for (const auto& inst : instances_) {
      const Module& m = *inst.module;
      for (const auto& t : m.transitions) {
        if (inst.substituted.count(t.name)) continue;
        Transition copy = t;
        copy.name = qualify(inst.path, t.name);
        out.names.origin_of[copy.name] = Origin{inst.path, t.name};
        out.names.flat_of[Origin{inst.path, t.name}] = copy.name;
        out.definition.transitions.push_back(std::move(copy));
      }
      auto endpoint = [&](const std::string& local) {
        auto it = inst.places.find(local);
        if (it != inst.places.end()) return group_name.at(uf_.find(it->second));
        return qualify(inst.path, local);
      };
      for (const auto& a : m.arcs) {
        if (inst.substituted.count(a.source) || inst.substituted.count(a.target)) continue;
        out.definition.arcs.push_back(Arc{endpoint(a.source), endpoint(a.target), a.inscription});
      }
      for (const auto& [local, toks] : m.tokens) {
        auto& dst = out.initial.tokens[endpoint(local)];
        dst.insert(dst.end(), toks.begin(), toks.end());
      }
    }
    return out;
  }

  const Hcpn& h_;
  std::map<std::string, std::vector<const SubstitutionTransition*>> subs_;
  std::vector<Instance> instances_;
  std::vector<RawPlace> raw_;
  UnionFind uf_;
  std::map<std::size_t, std::string> fusion_name_;
};

}  // namespace

std::vector<HierarchyIssue> validate_hcpn(const Hcpn& h) { return HcpnChecker(h).run(); }

FlatNet flatten(const Hcpn& h) {
  const auto issues = validate_hcpn(h);
  if (!issues.empty()) {
    std::string detail;
    for (const auto& i : issues) detail += (detail.empty() ? "" : "; ") + i.to_string();
    throw Error(ErrorCode::ValidationFailed, detail, issues.front().path);
  }
  return Flattener(h).run();
}

Hcpn as_hcpn(const NetDefinition& def, const InitialMarking& init) {
  Hcpn h;
  h.color_sets = def.color_sets;
  h.functions = def.functions;
  h.global_clock = init.global_clock;
  Module root;
  root.name = h.root;
  root.places = def.places;
  root.transitions = def.transitions;
  root.arcs = def.arcs;
  for (const auto& [place, toks] : init.tokens) root.tokens.emplace(place, toks);
  h.modules.push_back(std::move(root));
  return h;
}

}  // namespace cpn
