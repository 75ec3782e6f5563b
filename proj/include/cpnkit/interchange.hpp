#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cpnkit/hierarchy.hpp"
#include "cpnkit/net.hpp"
#include "cpnkit/simlog.hpp"
#include "cpnkit/statespace.hpp"

namespace cpn {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// A parsed but not yet validated net document. For hierarchical documents
/// `definition` and `initial` hold the root module and `hierarchy` the rest.
struct Document {
  NetDefinition definition;
  InitialMarking initial;
  std::optional<Hcpn> hierarchy;
  std::vector<std::string> warnings;
};

/// Validated net plus initial marking. Hierarchical documents are flattened.
struct Model {
  Net net;
  Marking marking;
  std::optional<Hcpn> hierarchy;
  std::optional<NameMap> names;
  std::vector<std::string> warnings;
};

/// Throws SchemaError for structural problems and the parser's own error
/// (SyntaxError, UnknownColorSet, ...) for bad declarations, each located
/// at the offending JSON path.
Document parse_document(const Json& doc);

/// Compiles (flattening if needed) and builds the initial marking.
Model load_model(const Document& doc);

/// parse_document + load_model on JSON text.
Model import_json(std::string_view text);

Json value_to_json(const Value& v);
/// Throws SchemaError (pathless; callers locate it).
Value value_from_json(const Json& j);

/// {"x": 1, ...}
Json env_json(const Env& env);
/// Throws SchemaError.
Env env_from_json(const Json& j);
/// Every place in declaration order with its tokens in insertion order.
Json marking_json(const Net& net, const Marking& m);
Json record_json(const FiringRecord& rec);
Json enabled_json(const Net& net, const std::vector<EnabledTransition>& enabled);
/// Exactly the report fields; undecidable ones are null on truncated graphs.
Json report_json(const SpaceReport& r);
Json trace_json(const Net& net, const Trace& t);

/// Canonical document: schema key order, declaration order, sorted tokens,
/// default-valued keys omitted.
Json document_json(const NetDefinition& def, const InitialMarking& init);
Json document_json(const Hcpn& h);

std::string dump_document(const Json& doc);  // two-space indent, trailing newline

std::string export_json(const Net& net, const Marking& marking);
std::string export_json(const Hcpn& h);
/// The hierarchy when present, else the flat net with its marking.
std::string export_json(const Model& model);

struct XmlIssue {
  std::string path;  // e.g. "/workspaceElements/cpnet/page[0]/trans[1]/cond"
  std::string reason;
};

struct XmlImport {
  Json document;
  std::vector<XmlIssue> issues;
};

/// Structural CPN Tools import. Inscriptions outside the expression language
/// are replaced by placeholders and reported. Throws XmlParseError.
XmlImport import_cpn_xml(std::string_view xml);

/// Single-page CPN Tools document with grid coordinates.
/// Throws HierarchyUnsupportedInStub for hierarchical documents.
std::string export_cpn_xml_stub(const Json& document);

/// Graphviz text. Places are ellipses, transitions boxes; with a marking the
/// place labels list tokens and the graph label shows the clock.
std::string render_dot(const Net& net, const Marking* marking = nullptr);
/// Clusters per module; substitution transitions get dashed edges to their child cluster.
std::string render_dot(const Hcpn& h);

}  // namespace cpn
