#pragma once

#include <cstdint>
#include <vector>

#include "confine/harness/split.hpp"
#include "confine/mining/declare.hpp"
#include "confine/model.hpp"

namespace confine::harness {

struct ScenarioParams {
  std::size_t n_cases = 1000;
  std::uint64_t seed = 1;
  /// Iterations of the treatment loop; a case has at most
  /// 18 + 16 * (x_loop - 1) events.
  unsigned x_loop = 1;
  /// 3 gives the hospital / pharma / clinic split; other values split the
  /// activities into contiguous pools org1..orgN.
  unsigned n_orgs = 3;
  /// Probability that a loop iteration takes the clinic branch.
  double clinic_probability = 1.0 / 3.0;
};

struct Scenario {
  EventLog log;
  OrgMap org_map;
};

/// The 19 activities of the care process, in process order.
const std::vector<ActivityLabel>& scenario_activities();

/// hospital (11 activities), pharma (3) and clinic (5).
OrgMap scenario_org_map();
/// Activities in process order, cut into `n_orgs` contiguous pools of
/// near-equal size named org1..orgN. Throws kInvalidConfig unless
/// 1 <= n_orgs <= 19.
OrgMap pooled_org_map(unsigned n_orgs);

/// Simulates the care process. Every case starts with PH and ends with DP;
/// in between, x_loop iterations of COPA, OD, DOR, PDL, SD, RD, AD, then
/// either the clinic branch (TP, PAFH, PIA, PT, VRT, TPB, RPB) or PRTA, then
/// PCD and DPH in random order. Timestamps have minute granularity and
/// strictly increase within a case. Events carry the provisioner of their
/// activity under the returned org map.
Scenario generate_scenario_log(const ScenarioParams& params);

/// Declare model the scenario's cases are checked against.
mining::DeclareModel scenario_declare_model();

}  // namespace confine::harness
