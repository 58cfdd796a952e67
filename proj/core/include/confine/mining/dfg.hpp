#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "confine/model.hpp"

namespace confine::mining {

using ActivityPair = std::pair<ActivityLabel, ActivityLabel>;

/// Frequency counts the heuristics miner works from. All counts are sums over
/// cases, so the state is independent of case arrival order.
struct DfgState {
  std::map<ActivityLabel, std::uint64_t> activity_counts;
  /// |a>b|: b directly follows a within a case.
  std::map<ActivityPair, std::uint64_t> directly_follows;
  /// |a>>b|: occurrences of the pattern a,b,a within a case.
  std::map<ActivityPair, std::uint64_t> two_loops;
  std::map<ActivityLabel, std::uint64_t> start_counts;
  std::map<ActivityLabel, std::uint64_t> end_counts;
  std::uint64_t cases_seen = 0;

  std::uint64_t follows(const ActivityLabel& a, const ActivityLabel& b) const;
  std::uint64_t two_loop(const ActivityLabel& a, const ActivityLabel& b) const;

  friend bool operator==(const DfgState&, const DfgState&) = default;
};

/// Folds one case into the counts. Throws kEmptyCase for an empty case and
/// kInvalidEvent if the events do not share one iid.
void hm_observe(DfgState& state, const Case& c);

/// Non-incremental entry point: observes every case of `log`.
void hm_observe_log(DfgState& state, const EventLog& log);

/// Rough footprint of the state, used for enclave accounting.
std::uint64_t footprint_bytes(const DfgState& state) noexcept;

}  // namespace confine::mining
