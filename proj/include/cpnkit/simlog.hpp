#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpnkit/engine.hpp"
#include "cpnkit/net.hpp"

namespace cpn {

enum class TerminationReason { Deadlock, StepLimit, ClockLimit, UserStop };

std::string_view termination_name(TerminationReason r) noexcept;

struct Trace {
  std::string run_id;
  Marking initial;
  std::vector<FiringRecord> records;
  Marking final_marking;
  TerminationReason reason = TerminationReason::Deadlock;
};

/// One enabled (transition, binding) pair.
struct Choice {
  std::size_t transition;
  Binding binding;
};

/// Enabled pairs in transition declaration order, then binding order.
std::vector<Choice> enabled_choices(const Net& net, const Marking& marking);

using Rng = std::mt19937_64;

/// Fires one uniformly chosen enabled pair, advancing the clock once first if
/// nothing is enabled. Absent on deadlock.
std::optional<FiringRecord> step_random(const Net& net, Marking& marking, Rng& rng);

struct RandomPolicy {
  std::uint64_t seed = 0;
};

/// Receives the marking and its enabled pairs; returns an index into the
/// pairs, or nothing to stop the run.
using ChoiceCallback = std::function<std::optional<std::size_t>(const Marking&, const std::vector<Choice>&)>;

struct InteractivePolicy {
  ChoiceCallback choose;
};

using Policy = std::variant<RandomPolicy, InteractivePolicy>;

struct SimulationLimits {
  std::size_t max_steps = 1000;
  std::optional<Time> max_clock;  // the clock never moves past this
};

/// Fires until deadlock or a limit. Moves the clock to the next token time
/// only when nothing is enabled at the current time.
Trace run_simulation(const Net& net, const Marking& initial, const Policy& policy, const SimulationLimits& limits,
                     std::string run_id = "run-0");

/// Re-fires every record from the trace's initial marking.
Marking replay_trace(const Net& net, const Trace& trace);

enum class LogFormat { Csv, Jsonl };

/// One row per firing ordered by (case_id, index). CSV rows end in CRLF.
/// Throws EmptyInput when `traces` is empty.
std::string export_event_log(const std::vector<Trace>& traces, LogFormat format);

}  // namespace cpn
