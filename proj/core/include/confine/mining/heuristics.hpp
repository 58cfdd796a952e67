#pragma once

#include <map>
#include <set>
#include <vector>

#include "confine/mining/dfg.hpp"
#include "confine/mining/petri.hpp"

namespace confine::mining {

struct HeuristicsConfig {
  /// Minimum dependency measure for an arc (and for a length-one loop).
  double dependency_threshold = 0.9;
  /// Two successors (predecessors) with an AND measure at or above this value
  /// are concurrent; below it they are exclusive.
  double and_threshold = 0.65;
  /// Minimum length-two-loop measure.
  double loop2_threshold = 0.9;
  /// An arc must be within this distance of the best outgoing arc of its
  /// source or the best incoming arc of its target.
  double relative_to_best = 0.05;
};

/// Throws kInvalidConfig for non-finite thresholds.
void validate(const HeuristicsConfig& cfg);

/// (|a>b| - |b>a|) / (|a>b| + |b>a| + 1) for a != b, |a>a| / (|a>a| + 1)
/// for a == b.
double hm_dependency(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b);

/// (|a>>b| + |b>>a|) / (|a>>b| + |b>>a| + 1).
double hm_loop2_dependency(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b);

/// AND measure of successors b, c of a: (|b>c| + |c>b|) / (|a>b| + |a>c| + 1).
double hm_and_split(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b,
                    const ActivityLabel& c);

/// AND measure of predecessors b, c of a: (|b>c| + |c>b|) / (|b>a| + |c>a| + 1).
double hm_and_join(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b,
                   const ActivityLabel& c);

/// Dependency graph with split/join bindings. Within a binding group the
/// members are exclusive; distinct groups of the same node are concurrent.
struct CausalNet {
  std::set<ActivityLabel> activities;
  std::map<ActivityPair, double> arcs;
  std::set<ActivityLabel> start_activities;
  std::set<ActivityLabel> end_activities;
  /// Output groups. The empty label is the artificial end, a successor of
  /// every end activity; in input groups it is the artificial start.
  std::map<ActivityLabel, std::vector<std::set<ActivityLabel>>> output_groups;
  std::map<ActivityLabel, std::vector<std::set<ActivityLabel>>> input_groups;

  friend bool operator==(const CausalNet&, const CausalNet&) = default;
};

/// Throws kNoObservations if no case has been observed.
CausalNet hm_causal_net(const DfgState& state, const HeuristicsConfig& cfg);

/// Binding-to-places translation of a causal net into a workflow net.
WorkflowNet to_workflow_net(const CausalNet& net);

/// hm_causal_net followed by to_workflow_net.
WorkflowNet hm_finalize(const DfgState& state, const HeuristicsConfig& cfg);

}  // namespace confine::mining
