#include <gtest/gtest.h>

#include "cpnkit/error.hpp"
#include "cpnkit/interchange.hpp"
#include "support.hpp"

using namespace cpn;

namespace {

Json doubler_doc() { return Json::parse(cpntest::read_file(cpntest::data_path("doubler.json"))); }

std::pair<ErrorCode, std::string> import_error(const Json& doc) {
  try {
    import_json(doc.dump());
  } catch (const Error& e) {
    return {e.code(), e.path()};
  }
  ADD_FAILURE() << "imported " << doc.dump();
  return {ErrorCode::IoError, ""};
}

const char* kEmptyExport = R"({"formatVersion":1,"colorSets":[],"places":[],"transitions":[],"arcs":[],"initialMarking":{}})";

}  // namespace

TEST(Json, ImportDoubler) {
  const Model m = cpntest::load_data("doubler.json");
  EXPECT_EQ(m.net.num_places(), 2u);
  EXPECT_EQ(m.net.num_transitions(), 1u);
  EXPECT_EQ(m.net.transition(0).delay, 1);
  EXPECT_TRUE(m.net.is_timed(0));
  EXPECT_EQ(format_marking(m.net, m.marking), "P_In: [1@0, -1@0]; P_Out: []; clock=0");
  EXPECT_FALSE(m.hierarchy);
}

TEST(Json, EmptyNet) {
  const Model m = import_json(kEmptyExport);
  EXPECT_EQ(m.net.num_places(), 0u);
  EXPECT_EQ(Json::parse(export_json(m.net, m.marking)), Json::parse(kEmptyExport));
}

TEST(Json, SchemaErrors) {
  {
    Json d = doubler_doc();
    d["formatVersion"] = 2;
    EXPECT_EQ(import_error(d).first, ErrorCode::SchemaError);
  }
  {
    Json d = doubler_doc();
    d["places"][0].erase("colorSet");
    const auto [code, path] = import_error(d);
    EXPECT_EQ(code, ErrorCode::SchemaError);
    EXPECT_EQ(path, "places[0]");
  }
  {
    Json d = doubler_doc();
    d["transitions"][0]["transitionDelay"] = "1";
    const auto [code, path] = import_error(d);
    EXPECT_EQ(code, ErrorCode::SchemaError);
    EXPECT_EQ(path, "transitions[0].transitionDelay");
  }
  {
    Json d = doubler_doc();
    d["surprise"] = true;
    const auto [code, path] = import_error(d);
    EXPECT_EQ(code, ErrorCode::SchemaError);
    EXPECT_EQ(path, "surprise");
  }
  {
    Json d = doubler_doc();
    d["initialMarking"]["tokens"]["P_In"][0]["timestamp"] = -1;
    EXPECT_EQ(import_error(d).first, ErrorCode::SchemaError);
  }
  {
    Json d = doubler_doc();
    d["transitions"][0]["guard"] = "x >";
    const auto [code, path] = import_error(d);
    EXPECT_EQ(code, ErrorCode::SyntaxError);
    EXPECT_EQ(path, "transitions[0].guard");
  }
  {
    Json d = doubler_doc();
    d["places"][1]["colorSet"] = "NOPE";
    EXPECT_EQ(import_error(d).first, ErrorCode::ValidationFailed);
  }
  {
    Json d = doubler_doc();
    d["initialMarking"]["tokens"]["P_In"][0]["value"] = "one";
    EXPECT_EQ(import_error(d).first, ErrorCode::ColorMismatch);
  }
  {
    Json d = doubler_doc();
    d["initialMarking"]["tokens"]["Nowhere"] = Json::array();
    EXPECT_EQ(import_error(d).first, ErrorCode::UnknownPlace);
  }
}

TEST(Json, ValueEncoding) {
  const Value v = Value::pair(Value::enumerated("C", "red"), Value::pair(Value::real(2.5), Value::text("s")));
  EXPECT_EQ(value_from_json(value_to_json(v)), v);
  EXPECT_EQ(value_to_json(Value::integer(3)), Json(3));
  EXPECT_THROW(value_from_json(Json::array({1})), Error);
  EXPECT_THROW(value_from_json(Json(nullptr)), Error);
}

TEST(Json, GoldenExport) {
  const Model m = cpntest::load_data("doubler.json");
  const Json out = Json::parse(export_json(m.net, m.marking));
  std::vector<std::string> keys;
  for (const auto& [k, _] : out.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"formatVersion", "colorSets", "functions", "places", "transitions", "arcs",
                                            "initialMarking"}));
  EXPECT_EQ(out["colorSets"], Json::array({"colset INT = int timed;"}));
  EXPECT_EQ(out["transitions"][0]["guard"], "x > 0");
  EXPECT_EQ(out["arcs"][1]["inscription"], "double(x) @+2");
  EXPECT_EQ(out["initialMarking"]["tokens"]["P_In"][0]["value"], -1);
  EXPECT_EQ(out["initialMarking"]["tokens"]["P_In"][1]["value"], 1);
}

TEST(Json, ExportIsFixpoint) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Model m = import_json(cpntest::random_document(seed, seed % 3 == 0).dump());
    const std::string once = export_json(m.net, m.marking);
    const Model again = import_json(once);
    EXPECT_EQ(export_json(again.net, again.marking), once);
    EXPECT_EQ(again.net.definition(), m.net.definition());
    EXPECT_EQ(again.marking, m.marking);
  }
}

TEST(Json, HierarchicalRoundTrip) {
  const Model m = cpntest::load_data("hcpn/nested.json");
  ASSERT_TRUE(m.hierarchy);
  const std::string text = export_json(*m.hierarchy);
  const Model again = import_json(text);
  EXPECT_EQ(export_json(again), text);
  EXPECT_EQ(*import_json(export_json(again)).hierarchy, *again.hierarchy);
  EXPECT_EQ(again.hierarchy->substitutions, m.hierarchy->substitutions);
  EXPECT_EQ(again.hierarchy->fusion_sets, m.hierarchy->fusion_sets);
}

TEST(Xml, StubShape) {
  const std::string xml = export_cpn_xml_stub(doubler_doc());
  for (const char* needle : {"<generator tool=\"cpnkit\"", "<pageattr name=\"Net\"/>", "<text>1`-1++1`1</text>",
                             "<text>[x &gt; 0]</text>", "<text>@+1</text>", "orientation=\"PtoT\"",
                             "orientation=\"TtoP\"", "<text>double(x) @+2</text>", "<!-- fun double(n) = n * 2; -->"})
    EXPECT_NE(xml.find(needle), std::string::npos) << needle;
}

TEST(Xml, StubRoundTrip) {
  const XmlImport back = import_cpn_xml(export_cpn_xml_stub(doubler_doc()));
  const Model original = cpntest::load_data("doubler.json");
  const Model m = load_model(parse_document(back.document));
  EXPECT_EQ(m.net.num_places(), original.net.num_places());
  EXPECT_EQ(m.net.transition(0).guard, original.net.transition(0).guard);
  EXPECT_EQ(m.net.transition(0).delay, 1);
  EXPECT_EQ(sorted_tokens(m.marking.tokens(0)), sorted_tokens(original.marking.tokens(0)));
  EXPECT_EQ(m.net.definition().arcs, original.net.definition().arcs);
}

TEST(Xml, EmptyStub) {
  const std::string xml = export_cpn_xml_stub(Json::parse(kEmptyExport));
  EXPECT_NE(xml.find("<globbox>\n    </globbox>"), std::string::npos);
  EXPECT_NE(xml.find("<pageattr name=\"Net\"/>"), std::string::npos);
  EXPECT_TRUE(import_cpn_xml(xml).issues.empty());
}

TEST(Xml, HierarchyUnsupportedInStub) {
  try {
    export_cpn_xml_stub(Json::parse(cpntest::read_file(cpntest::data_path("hcpn/simple.json"))));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HierarchyUnsupportedInStub);
  }
}

TEST(Xml, ImportReportsUntranslatedInscriptions) {
  const std::string xml = R"(<?xml version="1.0"?>
<workspaceElements><cpnet>
  <globbox><color id="c1"><id>INT</id><int/></color></globbox>
  <page id="pg"><pageattr name="Main"/>
    <place id="p1"><text>A</text><type><text>INT</text></type><initmark><text>2`5</text></initmark></place>
    <place id="p2"><text>B</text><type><text>INT</text></type></place>
    <trans id="t1"><text>T</text><cond><text>[if x then 1 else 2]</text></cond></trans>
    <arc id="a1" orientation="PtoT"><transend idref="t1"/><placeend idref="p1"/><annot><text>x</text></annot></arc>
    <arc id="a2" orientation="TtoP"><transend idref="t1"/><placeend idref="p2"/><annot><text>case x of 1 =&gt; 2</text></annot></arc>
  </page>
</cpnet></workspaceElements>)";
  const XmlImport r = import_cpn_xml(xml);
  EXPECT_GE(r.issues.size(), 2u);
  const Model m = load_model(parse_document(r.document));
  EXPECT_EQ(m.net.num_places(), 2u);
  EXPECT_EQ(m.marking.count(0), 2u);
  EXPECT_FALSE(m.net.transition(0).guard);
  for (const auto& issue : r.issues) EXPECT_FALSE(issue.path.empty());
}

TEST(Xml, Malformed) {
  for (const char* bad : {"", "<workspaceElements>", "<notcpn/>"}) {
    try {
      import_cpn_xml(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::XmlParseError) << bad;
    }
  }
}

TEST(Dot, Doubler) {
  const Model m = cpntest::load_data("doubler.json");
  const std::string with = render_dot(m.net, &m.marking);
  EXPECT_NE(with.find("\"p:P_In\" [shape=ellipse, label=\"P_In : INT\\n1@0, -1@0\"]"), std::string::npos) << with;
  EXPECT_NE(with.find("\"t:T\" [shape=box, label=\"T\\n[x > 0] @+1\"]"), std::string::npos);
  EXPECT_NE(with.find("label=\"clock = 0\""), std::string::npos);
  EXPECT_NE(with.find("\"t:T\" -> \"p:P_Out\" [label=\"double(x) @+2\"]"), std::string::npos);
  EXPECT_EQ(render_dot(m.net).find("clock"), std::string::npos);
}

TEST(Dot, Empty) {
  const Model m = import_json(kEmptyExport);
  EXPECT_EQ(render_dot(m.net), "digraph cpn {\n}\n");
}

TEST(Dot, Hierarchy) {
  const Model m = cpntest::load_data("hcpn/simple.json");
  const std::string dot = render_dot(*m.hierarchy);
  EXPECT_NE(dot.find("subgraph"), std::string::npos);
  EXPECT_NE(dot.find("dashed"), std::string::npos);
}
