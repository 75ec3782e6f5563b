#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cpnkit/engine.hpp"
#include "cpnkit/error.hpp"
#include "cpnkit/expr.hpp"
#include "cpnkit/interchange.hpp"
#include "cpnkit/service.hpp"
#include "cpnkit/simlog.hpp"
#include "cpnkit/statespace.hpp"

namespace py = pybind11;

namespace {

PyObject* g_cpn_error = nullptr;

cpn::Json parse_json(const std::string& text, const char* what) {
  try {
    return cpn::Json::parse(text);
  } catch (const cpn::Json::parse_error& e) {
    throw cpn::Error(cpn::ErrorCode::SchemaError, std::string("invalid JSON ") + what + ": " + e.what());
  }
}

// Mutable simulation session around an imported model.
class PyModel {
 public:
  explicit PyModel(const std::string& document) : model_(cpn::import_json(document)), marking_(model_.marking) {}

  std::vector<std::string> places() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < net().num_places(); ++i) out.push_back(net().place(i).name);
    return out;
  }

  std::vector<std::string> transitions() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < net().num_transitions(); ++i) out.push_back(net().transition(i).name);
    return out;
  }

  std::vector<std::string> warnings() const { return model_.warnings; }

  cpn::Time clock() const { return marking_.global_clock(); }

  std::string marking() const { return cpn::marking_json(net(), marking_).dump(); }

  std::string enabled() const { return cpn::enabled_json(net(), cpn::enabled_transitions(net(), marking_)).dump(); }

  bool is_enabled(const std::string& transition) const {
    return cpn::is_enabled(net(), net().transition_index(transition), marking_);
  }

  std::string fire(const std::string& transition, const std::optional<std::string>& binding) {
    const std::size_t t = net().transition_index(transition);
    std::optional<cpn::Env> env;
    if (binding) env = cpn::env_from_json(parse_json(*binding, "binding"));
    cpn::Marking next = marking_;
    cpn::FiringRecord rec = cpn::fire_transition(net(), t, next, env);
    marking_ = std::move(next);
    return cpn::record_json(rec).dump();
  }

  cpn::Time advance() { return cpn::advance_global_clock(net(), marking_); }

  void reset() { marking_ = model_.marking; }

  std::string export_json() const { return cpn::export_json(net(), marking_); }

  std::string dot(bool with_marking) const { return cpn::render_dot(net(), with_marking ? &marking_ : nullptr); }

  std::string analyze(std::size_t max_states, std::size_t max_edges, bool strip_time) const {
    return cpn::report_json(cpn::summarize(net(), marking_, cpn::ExploreLimits{max_states, max_edges, strip_time})).dump();
  }

  std::string simulate(std::uint64_t seed, std::size_t max_steps, std::optional<cpn::Time> max_clock,
                       const std::string& run_id) const {
    return cpn::trace_json(net(), run(seed, max_steps, max_clock, run_id)).dump();
  }

  std::string event_log(const std::vector<std::uint64_t>& seeds, std::size_t max_steps,
                        std::optional<cpn::Time> max_clock, const std::string& format) const {
    cpn::LogFormat f;
    if (format == "csv")
      f = cpn::LogFormat::Csv;
    else if (format == "jsonl")
      f = cpn::LogFormat::Jsonl;
    else
      throw py::value_error("format must be 'csv' or 'jsonl'");
    std::vector<cpn::Trace> traces;
    for (std::size_t i = 0; i < seeds.size(); ++i)
      traces.push_back(run(seeds[i], max_steps, max_clock, "run-" + std::to_string(i)));
    return cpn::export_event_log(traces, f);
  }

  bool replay_matches(std::uint64_t seed, std::size_t max_steps) const {
    const cpn::Trace trace = run(seed, max_steps, std::nullopt, "run-0");
    return cpn::replay_trace(net(), trace) == trace.final_marking;
  }

 private:
  const cpn::Net& net() const { return model_.net; }

  cpn::Trace run(std::uint64_t seed, std::size_t max_steps, std::optional<cpn::Time> max_clock,
                 const std::string& run_id) const {
    cpn::SimulationLimits limits;
    limits.max_steps = max_steps;
    limits.max_clock = max_clock;
    return cpn::run_simulation(net(), marking_, cpn::RandomPolicy{seed}, limits, run_id);
  }

  cpn::Model model_;
  cpn::Marking marking_;
};

py::tuple import_cpn_xml(const std::string& xml) {
  const cpn::XmlImport result = cpn::import_cpn_xml(xml);
  py::list issues;
  for (const auto& issue : result.issues) issues.append(py::make_tuple(issue.path, issue.reason));
  return py::make_tuple(result.document.dump(), issues);
}

std::string evaluate_expression(const std::string& text, const std::string& env, const std::string& functions) {
  const cpn::FunctionTable table = cpn::parse_function_definitions(functions);
  return cpn::value_to_json(cpn::evaluate(cpn::parse_expression(text), cpn::env_from_json(parse_json(env, "env")), table))
      .dump();
}

py::tuple service_handle(cpn::Service& service, const std::string& method, const std::string& path,
                         const std::map<std::string, std::string>& query, const std::string& body) {
  cpn::HttpResponse res;
  {
    py::gil_scoped_release release;
    res = service.handle(cpn::HttpRequest{method, path, query, body});
  }
  return py::make_tuple(res.status, res.body);
}

}  // namespace

PYBIND11_MODULE(_cpnkit, m) {
  m.doc() = "Colored Petri net engine";

  static py::exception<cpn::Error> cpn_error(m, "CpnError", PyExc_ValueError);
  g_cpn_error = cpn_error.ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cpn::Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(g_cpn_error);
      py::object exc = type(e.what());
      exc.attr("code") = std::string(cpn::error_name(e.code()));
      exc.attr("detail") = e.detail();
      exc.attr("path") = e.path();
      PyErr_SetObject(g_cpn_error, exc.ptr());
    }
  });

  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&>(), py::arg("document"))
      .def("places", &PyModel::places)
      .def("transitions", &PyModel::transitions)
      .def("warnings", &PyModel::warnings)
      .def_property_readonly("clock", &PyModel::clock)
      .def("marking", &PyModel::marking)
      .def("enabled", &PyModel::enabled)
      .def("is_enabled", &PyModel::is_enabled, py::arg("transition"))
      .def("fire", &PyModel::fire, py::arg("transition"), py::arg("binding") = std::nullopt)
      .def("advance", &PyModel::advance)
      .def("reset", &PyModel::reset)
      .def("export_json", &PyModel::export_json)
      .def("dot", &PyModel::dot, py::arg("with_marking") = true)
      .def("analyze", &PyModel::analyze, py::arg("max_states") = 100000, py::arg("max_edges") = 500000,
           py::arg("strip_time") = false)
      .def("simulate", &PyModel::simulate, py::arg("seed"), py::arg("max_steps") = 1000,
           py::arg("max_clock") = std::nullopt, py::arg("run_id") = "run-0")
      .def("event_log", &PyModel::event_log, py::arg("seeds"), py::arg("max_steps") = 1000,
           py::arg("max_clock") = std::nullopt, py::arg("format") = "csv")
      .def("replay_matches", &PyModel::replay_matches, py::arg("seed"), py::arg("max_steps") = 1000);

  py::class_<cpn::Service>(m, "Service")
      .def(py::init<>())
      .def("handle", &service_handle, py::arg("method"), py::arg("path"),
           py::arg("query") = std::map<std::string, std::string>{}, py::arg("body") = "")
      .def("session_count", &cpn::Service::session_count);

  m.def("import_cpn_xml", &import_cpn_xml, py::arg("xml"));
  m.def(
      "export_cpn_xml_stub", [](const std::string& doc) { return cpn::export_cpn_xml_stub(parse_json(doc, "document")); },
      py::arg("document"));
  m.def(
      "canonical_expression", [](const std::string& text) { return cpn::pretty_print(cpn::parse_expression(text)); },
      py::arg("text"));
  m.def("evaluate_expression", &evaluate_expression, py::arg("text"), py::arg("env") = "{}",
        py::arg("functions") = "");
}
