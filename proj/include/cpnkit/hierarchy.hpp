#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpnkit/net.hpp"

namespace cpn {

enum class PortMode { In, Out, InOut };

std::string_view port_mode_name(PortMode m) noexcept;

struct Port {
  std::string place;
  PortMode mode = PortMode::InOut;

  friend bool operator==(const Port&, const Port&) = default;
};

/// Net fragment of one module. Color sets and functions are shared by the whole Hcpn.
struct Module {
  std::string name;
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;
  std::vector<Port> ports;
  std::map<std::string, std::vector<Token>, std::less<>> tokens;  // initial tokens by local place

  friend bool operator==(const Module&, const Module&) = default;
};

struct SocketPort {
  std::string socket;  // parent place
  std::string port;    // child port place

  friend bool operator==(const SocketPort&, const SocketPort&) = default;
};

struct SubstitutionTransition {
  std::string transition;  // transition of `parent` replaced by a child instance
  std::string parent;
  std::string child;
  std::vector<SocketPort> port_map;

  friend bool operator==(const SubstitutionTransition&, const SubstitutionTransition&) = default;
};

struct FusionMember {
  std::string module;
  std::string place;

  friend bool operator==(const FusionMember&, const FusionMember&) = default;
};

struct FusionSet {
  std::string name;
  std::vector<FusionMember> members;

  friend bool operator==(const FusionSet&, const FusionSet&) = default;
};

struct Hcpn {
  ColorSetRegistry color_sets;
  FunctionTable functions;
  std::vector<Module> modules;  // includes the root
  std::string root = "root";
  std::vector<SubstitutionTransition> substitutions;
  std::vector<FusionSet> fusion_sets;
  Time global_clock = 0;

  const Module* find_module(std::string_view name) const;

  friend bool operator==(const Hcpn&, const Hcpn&) = default;
};

enum class HierarchyIssueKind {
  DuplicateModule,
  UnknownModule,
  UnknownPlace,
  UnknownTransition,
  UnknownPort,
  DuplicatePort,
  DuplicateSubstitution,
  CyclicInstantiation,
  SocketPortColorMismatch,
  PortMapNotBijective,
  PortModeMismatch,
  FusionTooSmall,
  FusionColorMismatch,
  PlaceInSeveralFusionSets,
};

std::string_view hierarchy_issue_name(HierarchyIssueKind k) noexcept;

struct HierarchyIssue {
  HierarchyIssueKind kind;
  std::string detail;
  std::string path;  // e.g. "substitutions[0].portMap[1]"

  std::string to_string() const;
};

/// Structural problems of the hierarchy itself. Fragment-level net problems
/// surface when the flattened net is compiled.
std::vector<HierarchyIssue> validate_hcpn(const Hcpn& h);

/// Origin of a flat element: substitution path from the root ("" for the root,
/// "S", "S::S2", ...) and the module-local name.
struct Origin {
  std::string instance;
  std::string local;

  friend bool operator==(const Origin&, const Origin&) = default;
  friend auto operator<=>(const Origin&, const Origin&) = default;
};

struct NameMap {
  std::map<std::string, Origin> origin_of;  // flat name -> representative origin
  std::map<Origin, std::string> flat_of;    // every instantiated element -> flat name
};

struct FlatNet {
  NetDefinition definition;
  InitialMarking initial;
  NameMap names;
};

/// Macro-expands every substitution, merges sockets with ports and collapses
/// fusion sets. Throws ValidationFailed when validate_hcpn reports issues.
FlatNet flatten(const Hcpn& h);

/// An Hcpn without submodules whose root is the given net.
Hcpn as_hcpn(const NetDefinition& def, const InitialMarking& init);

}  // namespace cpn
