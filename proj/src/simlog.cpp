#include "cpnkit/simlog.hpp"

#include <algorithm>

#include "json.hpp"

#include "cpnkit/error.hpp"

namespace cpn {

std::string_view termination_name(TerminationReason r) noexcept {
  switch (r) {
    case TerminationReason::Deadlock: return "deadlock";
    case TerminationReason::StepLimit: return "step limit";
    case TerminationReason::ClockLimit: return "clock limit";
    case TerminationReason::UserStop: return "user stop";
  }
  return "deadlock";
}

std::vector<Choice> enabled_choices(const Net& net, const Marking& marking) {
  std::vector<Choice> out;
  for (auto& en : enabled_transitions(net, marking))
    for (auto& b : en.bindings) out.push_back(Choice{en.transition, std::move(b)});
  return out;
}

namespace {

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace

std::optional<FiringRecord> step_random(const Net& net, Marking& marking, Rng& rng) {
  auto choices = enabled_choices(net, marking);
  if (choices.empty()) {
    advance_global_clock(net, marking);
    choices = enabled_choices(net, marking);
    if (choices.empty()) return std::nullopt;
  }
  const auto& c = choices[pick(rng, choices.size())];
  return apply_binding(net, c.transition, marking, c.binding);
}

Trace run_simulation(const Net& net, const Marking& initial, const Policy& policy, const SimulationLimits& limits,
                     std::string run_id) {
  Trace trace;
  trace.run_id = std::move(run_id);
  trace.initial = initial;
  Marking m = initial;
  std::optional<Rng> rng;
  if (const auto* r = std::get_if<RandomPolicy>(&policy)) rng.emplace(r->seed);

  while (true) {
    if (trace.records.size() >= limits.max_steps) {
      trace.reason = TerminationReason::StepLimit;
      break;
    }
    auto choices = enabled_choices(net, m);
    if (choices.empty()) {
      const auto next = next_token_time(m);
      if (!next) {
        trace.reason = TerminationReason::Deadlock;
        break;
      }
      if (limits.max_clock && *next > *limits.max_clock) {
        trace.reason = TerminationReason::ClockLimit;
        break;
      }
      m.set_global_clock(*next);
      continue;
    }
    std::size_t index;
    if (rng) {
      index = pick(*rng, choices.size());
    } else {
      const auto chosen = std::get<InteractivePolicy>(policy).choose(m, choices);
      if (!chosen) {
        trace.reason = TerminationReason::UserStop;
        break;
      }
      if (*chosen >= choices.size()) throw Error(ErrorCode::NotEnabled, "choice index out of range");
      index = *chosen;
    }
    Marking next = m;
    FiringRecord rec = apply_binding(net, choices[index].transition, next, choices[index].binding);
    m = std::move(next);
    rec.index = trace.records.size();
    trace.records.push_back(std::move(rec));
  }
  trace.final_marking = std::move(m);
  return trace;
}

Marking replay_trace(const Net& net, const Trace& trace) {
  Marking m = trace.initial;
  for (const auto& rec : trace.records) {
    if (rec.clock < m.global_clock()) throw Error(ErrorCode::NotEnabled, "record clock runs backwards");
    m.set_global_clock(rec.clock);
    fire_transition(net, net.transition_index(rec.transition), m, rec.env);
  }
  m.set_global_clock(trace.final_marking.global_clock());
  return m;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string export_event_log(const std::vector<Trace>& traces, LogFormat format) {
  if (traces.empty()) throw Error(ErrorCode::EmptyInput, "no traces to export");
  std::vector<const Trace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Trace* a, const Trace* b) { return a->run_id < b->run_id; });

  std::string out;
  if (format == LogFormat::Csv) out += "case_id,activity,timestamp,binding\r\n";
  for (const Trace* t : ordered) {
    for (const auto& rec : t->records) {
      const std::string binding = format_env(rec.env);
      if (format == LogFormat::Csv) {
        out += csv_field(t->run_id) + ',' + csv_field(rec.transition) + ',' + std::to_string(rec.clock) + ',' +
               csv_field(binding) + "\r\n";
      } else {
        nlohmann::ordered_json row;
        row["case_id"] = t->run_id;
        row["activity"] = rec.transition;
        row["timestamp"] = rec.clock;
        row["binding"] = binding;
        out += row.dump() + "\n";
      }
    }
  }
  return out;
}

}  // namespace cpn
