#include "confine/mining/dfg.hpp"

#include "confine/error.hpp"

namespace confine::mining {

std::uint64_t DfgState::follows(const ActivityLabel& a, const ActivityLabel& b) const {
  auto it = directly_follows.find({a, b});
  return it == directly_follows.end() ? 0 : it->second;
}

std::uint64_t DfgState::two_loop(const ActivityLabel& a, const ActivityLabel& b) const {
  auto it = two_loops.find({a, b});
  return it == two_loops.end() ? 0 : it->second;
}

void hm_observe(DfgState& state, const Case& c) {
  if (c.empty()) throw Error(Errc::kEmptyCase, "cannot observe an empty case");
  const auto& events = c.events();
  for (const auto& e : events) {
    if (e.iid != events.front().iid)
      throw Error(Errc::kInvalidEvent, "case mixes iids " + events.front().iid + " and " + e.iid);
  }

  for (std::size_t i = 0; i < events.size(); ++i) {
    ++state.activity_counts[events[i].activity];
    if (i + 1 < events.size()) ++state.directly_follows[{events[i].activity, events[i + 1].activity}];
    if (i + 2 < events.size() && events[i].activity == events[i + 2].activity &&
        events[i].activity != events[i + 1].activity)
      ++state.two_loops[{events[i].activity, events[i + 1].activity}];
  }
  ++state.start_counts[events.front().activity];
  ++state.end_counts[events.back().activity];
  ++state.cases_seen;
}

void hm_observe_log(DfgState& state, const EventLog& log) {
  for (const auto& [iid, c] : split_by_case(log)) hm_observe(state, c);
}

std::uint64_t footprint_bytes(const DfgState& state) noexcept {
  // Per map node: key strings plus a fixed node overhead of 48 bytes.
  constexpr std::uint64_t kNode = 48;
  std::uint64_t n = sizeof(DfgState);
  auto labels = [&](const std::map<ActivityLabel, std::uint64_t>& m) {
    for (const auto& [k, v] : m) n += kNode + k.size();
  };
  auto pairs = [&](const std::map<ActivityPair, std::uint64_t>& m) {
    for (const auto& [k, v] : m) n += kNode + k.first.size() + k.second.size();
  };
  labels(state.activity_counts);
  labels(state.start_counts);
  labels(state.end_counts);
  pairs(state.directly_follows);
  pairs(state.two_loops);
  return n;
}

}  // namespace confine::mining
