#include "confine/harness/scenario.hpp"

#include <random>
#include <string>

#include "confine/error.hpp"

namespace confine::harness {
namespace {

// 2022-07-14T00:00:00Z in milliseconds.
constexpr Timestamp kScenarioStart = 1657756800000;
constexpr Timestamp kMinute = 60'000;

std::string padded(std::size_t i, std::size_t width) {
  auto s = std::to_string(i);
  return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

const std::vector<ActivityLabel>& scenario_activities() {
  static const std::vector<ActivityLabel> kActivities{
      "PH",  "COPA", "OD",  "DOR", "PDL", "SD",   "RD",  "AD",  "TP", "PAFH",
      "PIA", "PT",   "VRT", "TPB", "RPB", "PRTA", "PCD", "DPH", "DP"};
  return kActivities;
}

OrgMap scenario_org_map() {
  OrgMap m;
  for (const auto* a : {"PH", "COPA", "OD", "RD", "AD", "TP", "RPB", "PRTA", "PCD", "DPH", "DP"}) m[a] = "hospital";
  for (const auto* a : {"DOR", "PDL", "SD"}) m[a] = "pharma";
  for (const auto* a : {"PAFH", "PIA", "PT", "VRT", "TPB"}) m[a] = "clinic";
  return m;
}

OrgMap pooled_org_map(unsigned n_orgs) {
  const auto& acts = scenario_activities();
  if (n_orgs < 1 || n_orgs > acts.size())
    throw Error(Errc::kInvalidConfig, "n_orgs must be between 1 and " + std::to_string(acts.size()));
  OrgMap m;
  for (std::size_t i = 0; i < acts.size(); ++i) m[acts[i]] = "org" + std::to_string(i * n_orgs / acts.size() + 1);
  return m;
}

Scenario generate_scenario_log(const ScenarioParams& p) {
  if (p.x_loop < 1) throw Error(Errc::kInvalidConfig, "x_loop must be at least 1");
  if (p.clinic_probability < 0.0 || p.clinic_probability > 1.0)
    throw Error(Errc::kInvalidConfig, "clinic_probability must lie in [0, 1]");
  Scenario out;
  out.org_map = p.n_orgs == 3 ? scenario_org_map() : pooled_org_map(p.n_orgs);

  std::mt19937_64 rng(p.seed);
  std::bernoulli_distribution clinic(p.clinic_probability);
  std::bernoulli_distribution swap_tail(0.5);
  std::uniform_int_distribution<Timestamp> case_gap(10, 90);
  std::uniform_int_distribution<Timestamp> step_gap(1, 180);

  const std::size_t width = std::max<std::size_t>(4, std::to_string(p.n_cases).size());
  std::vector<Event> events;
  events.reserve(p.n_cases * 15 * p.x_loop);
  Timestamp case_start = kScenarioStart;
  for (std::size_t i = 1; i <= p.n_cases; ++i) {
    const auto iid = padded(i, width);
    std::vector<ActivityLabel> trace{"PH"};
    for (unsigned k = 0; k < p.x_loop; ++k) {
      for (const auto* a : {"COPA", "OD", "DOR", "PDL", "SD", "RD", "AD"}) trace.emplace_back(a);
      if (clinic(rng)) {
        for (const auto* a : {"TP", "PAFH", "PIA", "PT", "VRT", "TPB", "RPB"}) trace.emplace_back(a);
      } else {
        trace.emplace_back("PRTA");
      }
      if (swap_tail(rng)) {
        trace.emplace_back("DPH");
        trace.emplace_back("PCD");
      } else {
        trace.emplace_back("PCD");
        trace.emplace_back("DPH");
      }
    }
    trace.emplace_back("DP");

    case_start += case_gap(rng) * kMinute;
    Timestamp t = case_start;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      if (k > 0) t += step_gap(rng) * kMinute;
      Event e;
      e.event_id = iid + "-" + padded(k + 1, 3);
      e.iid = iid;
      e.activity = trace[k];
      e.timestamp = t;
      e.provisioner_id = out.org_map.at(trace[k]);
      events.push_back(std::move(e));
    }
  }
  out.log = EventLog::from_events(std::move(events));
  return out;
}

mining::DeclareModel scenario_declare_model() {
  using T = mining::DeclareTemplate;
  mining::DeclareModel m;
  const auto& acts = scenario_activities();
  m.alphabet.insert(acts.begin(), acts.end());
  m.constraints = {
      {T::kInit, "PH", std::nullopt},
      {T::kEnd, "DP", std::nullopt},
      {T::kExactlyOne, "PH", std::nullopt},
      {T::kExactlyOne, "DP", std::nullopt},
      {T::kExistence, "AD", std::nullopt},
      {T::kAbsence, "PRTA", std::nullopt},
      {T::kRespondedExistence, "TP", "PAFH"},
      {T::kResponse, "OD", "DOR"},
      {T::kResponse, "PCD", "DPH"},
      {T::kPrecedence, "COPA", "OD"},
      {T::kSuccession, "DOR", "PDL"},
      {T::kChainResponse, "PDL", "SD"},
      {T::kChainResponse, "AD", "TP"},
      {T::kChainPrecedence, "SD", "RD"},
      {T::kNotSuccession, "DP", "PH"},
  };
  return m;
}

}  // namespace confine::harness
