// cpnkit command-line tool.
//
// Exit codes: 0 success, 1 domain failure (invalid net, analysis error),
// 2 usage or I/O failure.

#include <pthread.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "cpnkit/error.hpp"
#include "cpnkit/interchange.hpp"
#include "cpnkit/service.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cpn::Error(cpn::ErrorCode::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw cpn::Error(cpn::ErrorCode::IoError, "cannot write " + path);
}

cpn::Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return cpn::Json::parse(text);
  } catch (const cpn::Json::parse_error& e) {
    throw cpn::Error(cpn::ErrorCode::SchemaError, std::string("invalid JSON: ") + e.what());
  }
}

cpn::Model load(const std::string& path) { return cpn::load_model(cpn::parse_document(read_json(path))); }

std::string lower_ext(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

bool is_xml_ext(const std::string& ext) { return ext == ".cpn" || ext == ".xml"; }

int cmd_validate(const std::string& input) {
  const cpn::Document doc = cpn::parse_document(read_json(input));
  bool clean = true;
  if (doc.hierarchy) {
    for (const auto& issue : cpn::validate_hcpn(*doc.hierarchy)) {
      std::cout << issue.to_string() << "\n";
      clean = false;
    }
  } else {
    for (const auto& v : cpn::validate_net(doc.definition)) {
      std::cout << v.to_string() << "\n";
      clean = false;
    }
  }
  if (!clean) return kDomainFailure;
  const cpn::Model model = cpn::load_model(doc);
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "ok: " << model.net.num_places() << " places, " << model.net.num_transitions() << " transitions\n";
  return kOk;
}

struct SimulateArgs {
  std::string input;
  std::uint64_t seed = 0;
  std::size_t max_steps = 100;
  std::optional<cpn::Time> max_clock;
  std::size_t runs = 1;
  std::string log;
  std::string format;
};

int cmd_simulate(const SimulateArgs& a) {
  std::string format = a.format;
  if (format.empty()) format = lower_ext(a.log) == ".jsonl" ? "jsonl" : "csv";
  const cpn::Model model = load(a.input);
  cpn::SimulationLimits limits;
  limits.max_steps = a.max_steps;
  limits.max_clock = a.max_clock;
  std::vector<cpn::Trace> traces;
  for (std::size_t r = 0; r < a.runs; ++r)
    traces.push_back(cpn::run_simulation(model.net, model.marking, cpn::RandomPolicy{a.seed + r}, limits,
                                         "run-" + std::to_string(r)));
  for (const auto& t : traces)
    std::cerr << t.run_id << ": " << t.records.size() << " firings, " << cpn::termination_name(t.reason) << ", clock "
              << t.final_marking.global_clock() << "\n";
  write_output(a.log, cpn::export_event_log(traces, format == "jsonl" ? cpn::LogFormat::Jsonl : cpn::LogFormat::Csv));
  return kOk;
}

int cmd_analyze(const std::string& input, std::size_t max_states, std::size_t max_edges, bool strip_time) {
  const cpn::Model model = load(input);
  cpn::ExploreLimits limits{max_states, max_edges, strip_time};
  std::cout << cpn::report_json(cpn::summarize(model.net, model.marking, limits)).dump(2) << "\n";
  return kOk;
}

int cmd_convert(const std::string& in, const std::string& out) {
  const std::string from = lower_ext(in), to = lower_ext(out);
  if (from == ".json" && is_xml_ext(to)) {
    write_output(out, cpn::export_cpn_xml_stub(read_json(in)));
    return kOk;
  }
  if (is_xml_ext(from) && to == ".json") {
    const cpn::XmlImport result = cpn::import_cpn_xml(read_file(in));
    for (const auto& issue : result.issues) std::cerr << "issue: " << issue.path << ": " << issue.reason << "\n";
    write_output(out, cpn::dump_document(result.document));
    return kOk;
  }
  throw UsageError("convert needs one .json and one .cpn/.xml file (got " + in + " -> " + out + ")");
}

int cmd_render(const std::string& input, const std::string& out, bool with_marking, bool flat) {
  const cpn::Document doc = cpn::parse_document(read_json(input));
  if (doc.hierarchy && !flat) {
    cpn::validate_hcpn(*doc.hierarchy);
    write_output(out, cpn::render_dot(*doc.hierarchy));
    return kOk;
  }
  const cpn::Model model = cpn::load_model(doc);
  write_output(out, cpn::render_dot(model.net, with_marking ? &model.marking : nullptr));
  return kOk;
}

int cmd_serve(const std::string& host, int port) {
  // Block termination signals in every thread; a dedicated thread waits for them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  cpn::Service service;
  cpn::HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound < 0) throw cpn::Error(cpn::ErrorCode::IoError, "cannot listen on " + host + ":" + std::to_string(port));
  std::cout << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() may also end on its own; wake the waiter so it can be joined.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Colored Petri net toolkit"};
  app.require_subcommand(1);

  std::string input, output, host = "127.0.0.1";
  std::string convert_in, convert_out;
  SimulateArgs sim;
  std::size_t max_states = 100000, max_edges = 500000;
  bool strip_time = false, with_marking = false, flat = false;
  int port = 8080;
  cpn::Time max_clock = 0;

  auto* validate = app.add_subcommand("validate", "Load and validate a net document");
  validate->add_option("net", input, "Net document (JSON)")->required();

  auto* simulate = app.add_subcommand("simulate", "Run random simulations and write an event log");
  simulate->add_option("net", sim.input, "Net document (JSON)")->required();
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--max-steps", sim.max_steps, "Firings per run")->check(CLI::PositiveNumber);
  auto* max_clock_opt = simulate->add_option("--max-clock", max_clock, "Stop before the clock passes this value")
                            ->check(CLI::NonNegativeNumber);
  simulate->add_option("--runs", sim.runs, "Number of runs")->check(CLI::PositiveNumber);
  simulate->add_option("--log", sim.log, "Output file (default: stdout)");
  simulate->add_option("--format", sim.format, "Log format")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* analyze = app.add_subcommand("analyze", "Explore the state space and print a report");
  analyze->add_option("net", input, "Net document (JSON)")->required();
  analyze->add_option("--max-states", max_states, "State limit")->check(CLI::PositiveNumber);
  analyze->add_option("--max-edges", max_edges, "Edge limit")->check(CLI::PositiveNumber);
  analyze->add_flag("--strip-time", strip_time, "Ignore timestamps and delays");

  auto* convert = app.add_subcommand("convert", "Convert between JSON and CPN-XML by file extension");
  convert->add_option("in", convert_in, "Input file")->required();
  convert->add_option("out", convert_out, "Output file")->required();

  auto* render = app.add_subcommand("render", "Write a Graphviz DOT rendering");
  render->add_option("net", input, "Net document (JSON)")->required();
  render->add_option("-o,--output", output, "Output file (default: stdout)");
  render->add_flag("--with-marking", with_marking, "Show tokens and the clock");
  render->add_flag("--flat", flat, "Render hierarchical nets flattened");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Listen address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return cmd_validate(input);
    if (*simulate) {
      if (*max_clock_opt) sim.max_clock = max_clock;
      return cmd_simulate(sim);
    }
    if (*analyze) return cmd_analyze(input, max_states, max_edges, strip_time);
    if (*convert) return cmd_convert(convert_in, convert_out);
    if (*render) return cmd_render(input, output, with_marking, flat);
    if (*serve) return cmd_serve(host, port);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const cpn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == cpn::ErrorCode::IoError ? kUsage : kDomainFailure;
  }
  return kUsage;
}
