#include "confine/mining/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <tuple>

#include "confine/error.hpp"

namespace confine::mining {
namespace {

// Stands for the artificial start (as a predecessor) and the artificial end
// (as a successor). Activities are never empty, so there is no clash.
const ActivityLabel kMarker;

double ratio(double num, double den) { return num / den; }

using Adjacency = std::map<ActivityLabel, std::set<ActivityLabel>>;

std::set<ActivityLabel> reachable(const std::set<ActivityLabel>& roots, const Adjacency& adj) {
  std::set<ActivityLabel> seen(roots.begin(), roots.end());
  std::deque<ActivityLabel> queue(roots.begin(), roots.end());
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) {
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

// Connected components of the "exclusive" graph over `members`: two members
// land in the same group unless `parallel` says they are concurrent.
template <typename ParallelFn>
std::vector<std::set<ActivityLabel>> exclusive_groups(const std::vector<ActivityLabel>& members,
                                                      ParallelFn parallel) {
  std::vector<std::size_t> parent(members.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (!parallel(members[i], members[j])) parent[find(i)] = find(j);
    }
  }
  std::map<std::size_t, std::set<ActivityLabel>> by_root;
  for (std::size_t i = 0; i < members.size(); ++i) by_root[find(i)].insert(members[i]);
  std::vector<std::set<ActivityLabel>> out;
  for (auto& [root, group] : by_root) out.push_back(std::move(group));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void validate(const HeuristicsConfig& cfg) {
  for (double v : {cfg.dependency_threshold, cfg.and_threshold, cfg.loop2_threshold,
                   cfg.relative_to_best}) {
    if (!std::isfinite(v)) throw Error(Errc::kInvalidConfig, "heuristics thresholds must be finite");
  }
}

double hm_dependency(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b) {
  const double ab = static_cast<double>(state.follows(a, b));
  if (a == b) return ratio(ab, ab + 1.0);
  const double ba = static_cast<double>(state.follows(b, a));
  return ratio(ab - ba, ab + ba + 1.0);
}

double hm_loop2_dependency(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b) {
  const double n =
      static_cast<double>(state.two_loop(a, b)) + static_cast<double>(state.two_loop(b, a));
  return ratio(n, n + 1.0);
}

double hm_and_split(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b,
                    const ActivityLabel& c) {
  const double num =
      static_cast<double>(state.follows(b, c)) + static_cast<double>(state.follows(c, b));
  const double den =
      static_cast<double>(state.follows(a, b)) + static_cast<double>(state.follows(a, c)) + 1.0;
  return ratio(num, den);
}

double hm_and_join(const DfgState& state, const ActivityLabel& a, const ActivityLabel& b,
                   const ActivityLabel& c) {
  const double num =
      static_cast<double>(state.follows(b, c)) + static_cast<double>(state.follows(c, b));
  const double den =
      static_cast<double>(state.follows(b, a)) + static_cast<double>(state.follows(c, a)) + 1.0;
  return ratio(num, den);
}

CausalNet hm_causal_net(const DfgState& state, const HeuristicsConfig& cfg) {
  validate(cfg);
  if (state.cases_seen == 0) throw Error(Errc::kNoObservations, "no case observed");

  CausalNet net;
  for (const auto& [a, n] : state.activity_counts) net.activities.insert(a);
  for (const auto& [a, n] : state.start_counts) net.start_activities.insert(a);
  for (const auto& [a, n] : state.end_counts) net.end_activities.insert(a);

  std::map<ActivityLabel, double> best_out, best_in;
  for (const auto& [pair, n] : state.directly_follows) {
    const auto& [a, b] = pair;
    if (a == b) continue;
    const double d = hm_dependency(state, a, b);
    auto& bo = best_out.try_emplace(a, -1.0).first->second;
    bo = std::max(bo, d);
    auto& bi = best_in.try_emplace(b, -1.0).first->second;
    bi = std::max(bi, d);
  }

  std::set<ActivityLabel> self_loops;
  for (const auto& [pair, n] : state.directly_follows) {
    const auto& [a, b] = pair;
    const double d = hm_dependency(state, a, b);
    if (a == b) {
      if (d >= cfg.dependency_threshold) {
        self_loops.insert(a);
        net.arcs[pair] = d;
      }
      continue;
    }
    if (d < cfg.dependency_threshold) continue;
    if (best_out[a] - d <= cfg.relative_to_best || best_in[b] - d <= cfg.relative_to_best)
      net.arcs[pair] = d;
  }

  for (const auto& [pair, n] : state.two_loops) {
    const auto& [a, b] = pair;
    if (a == b || self_loops.contains(a) || self_loops.contains(b)) continue;
    if (hm_loop2_dependency(state, a, b) < cfg.loop2_threshold) continue;
    if (state.follows(a, b) > 0) net.arcs[{a, b}] = hm_dependency(state, a, b);
    if (state.follows(b, a) > 0) net.arcs[{b, a}] = hm_dependency(state, b, a);
  }

  // Every activity keeps at least its best successor and best predecessor.
  auto has_out = [&](const ActivityLabel& a) {
    for (auto it = net.arcs.lower_bound({a, kMarker}); it != net.arcs.end() && it->first.first == a;
         ++it) {
      if (it->first.second != a) return true;
    }
    return false;
  };
  auto has_in = [&](const ActivityLabel& b) {
    for (const auto& [pair, d] : net.arcs) {
      if (pair.second == b && pair.first != b) return true;
    }
    return false;
  };
  // Ranking for "best": dependency, then frequency, then smallest label.
  auto better = [&](const ActivityPair& x, const ActivityPair& y) {
    const auto kx = std::make_tuple(hm_dependency(state, x.first, x.second),
                                    state.follows(x.first, x.second));
    const auto ky = std::make_tuple(hm_dependency(state, y.first, y.second),
                                    state.follows(y.first, y.second));
    if (kx != ky) return kx > ky;
    return x < y;
  };
  for (const auto& a : net.activities) {
    if (!net.end_activities.contains(a) && !has_out(a)) {
      std::optional<ActivityPair> best;
      for (const auto& [pair, n] : state.directly_follows) {
        if (pair.first != a || pair.second == a) continue;
        if (!best || better(pair, *best)) best = pair;
      }
      if (best) net.arcs[*best] = hm_dependency(state, best->first, best->second);
    }
    if (!net.start_activities.contains(a) && !has_in(a)) {
      std::optional<ActivityPair> best;
      for (const auto& [pair, n] : state.directly_follows) {
        if (pair.second != a || pair.first == a) continue;
        if (!best || better(pair, *best)) best = pair;
      }
      if (best) net.arcs[*best] = hm_dependency(state, best->first, best->second);
    }
  }

  // Connect anything the pruning cut off from the start or from the end,
  // using the most frequent directly-follows edge into (out of) the
  // connected region. Each case starts at a start activity and ends at an
  // end activity, so every round makes progress.
  for (bool forward : {true, false}) {
    while (true) {
      Adjacency adj;
      for (const auto& [pair, d] : net.arcs) {
        if (forward)
          adj[pair.first].insert(pair.second);
        else
          adj[pair.second].insert(pair.first);
      }
      const auto connected =
          reachable(forward ? net.start_activities : net.end_activities, adj);
      if (connected.size() == net.activities.size()) break;
      std::optional<ActivityPair> pick;
      std::uint64_t pick_count = 0;
      for (const auto& [pair, n] : state.directly_follows) {
        const auto& inside = forward ? pair.first : pair.second;
        const auto& outside = forward ? pair.second : pair.first;
        if (!connected.contains(inside) || connected.contains(outside)) continue;
        if (!pick || n > pick_count) {
          pick = pair;
          pick_count = n;
        }
      }
      if (!pick) break;  // unreachable for counts produced by hm_observe
      net.arcs[*pick] = hm_dependency(state, pick->first, pick->second);
    }
  }

  for (const auto& a : net.activities) {
    std::vector<ActivityLabel> outs, ins;
    for (const auto& [pair, d] : net.arcs) {
      if (pair.first == a) outs.push_back(pair.second);
      if (pair.second == a) ins.push_back(pair.first);
    }
    if (net.end_activities.contains(a)) outs.push_back(kMarker);
    if (net.start_activities.contains(a)) ins.push_back(kMarker);
    std::sort(outs.begin(), outs.end());
    std::sort(ins.begin(), ins.end());

    net.output_groups[a] = exclusive_groups(outs, [&](const auto& b, const auto& c) {
      if (b == kMarker || c == kMarker || b == a || c == a) return false;
      return hm_and_split(state, a, b, c) >= cfg.and_threshold;
    });
    net.input_groups[a] = exclusive_groups(ins, [&](const auto& b, const auto& c) {
      if (b == kMarker || c == kMarker || b == a || c == a) return false;
      return hm_and_join(state, a, b, c) >= cfg.and_threshold;
    });
  }
  return net;
}

WorkflowNet to_workflow_net(const CausalNet& net) {
  // Each causal arc (including start->a and a->end) is a slot; slots joined
  // by an exclusive binding share a place.
  std::vector<ActivityPair> slots;
  std::map<ActivityPair, std::size_t> slot_of;
  auto slot = [&](const ActivityLabel& from, const ActivityLabel& to) {
    auto [it, fresh] = slot_of.try_emplace({from, to}, slots.size());
    if (fresh) slots.emplace_back(from, to);
    return it->second;
  };
  for (const auto& a : net.start_activities) slot(kMarker, a);
  for (const auto& [pair, d] : net.arcs) slot(pair.first, pair.second);
  for (const auto& a : net.end_activities) slot(a, kMarker);

  std::vector<std::size_t> parent(slots.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t x, std::size_t y) { parent[find(x)] = find(y); };
  auto join_group = [&](const std::vector<std::size_t>& members) {
    for (std::size_t i = 1; i < members.size(); ++i) unite(members[0], members[i]);
  };

  {
    std::vector<std::size_t> starts, ends;
    for (const auto& a : net.start_activities) starts.push_back(slot(kMarker, a));
    for (const auto& a : net.end_activities) ends.push_back(slot(a, kMarker));
    join_group(starts);
    join_group(ends);
  }
  for (const auto& [a, groups] : net.output_groups) {
    for (const auto& g : groups) {
      std::vector<std::size_t> members;
      for (const auto& b : g) members.push_back(slot_of.at({a, b}));
      join_group(members);
    }
  }
  for (const auto& [a, groups] : net.input_groups) {
    for (const auto& g : groups) {
      std::vector<std::size_t> members;
      for (const auto& b : g) members.push_back(slot_of.at({b, a}));
      join_group(members);
    }
  }

  struct ProtoPlace {
    std::set<ActivityLabel> preset, postset;
    bool from_start = false, to_end = false;
  };
  std::map<std::size_t, ProtoPlace> by_root;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    auto& p = by_root[find(i)];
    const auto& [from, to] = slots[i];
    if (from == kMarker)
      p.from_start = true;
    else
      p.preset.insert(from);
    if (to == kMarker)
      p.to_end = true;
    else
      p.postset.insert(to);
  }
  std::vector<ProtoPlace> protos;
  for (auto& [root, p] : by_root) protos.push_back(std::move(p));
  std::sort(protos.begin(), protos.end(), [](const ProtoPlace& x, const ProtoPlace& y) {
    return std::tie(x.preset, x.postset) < std::tie(y.preset, y.postset);
  });

  WorkflowNet wf;
  std::map<ActivityLabel, std::string> tid;
  {
    std::size_t i = 0;
    for (const auto& a : net.activities) {
      tid[a] = "t" + std::to_string(++i);
      wf.transitions.push_back({tid[a], a, false});
    }
  }
  wf.source_place = "source";
  wf.sink_place = "sink";

  std::vector<Place> places;
  std::vector<Arc> arcs;
  std::size_t counter = 0;
  for (const auto& p : protos) {
    std::string id;
    const bool clean_source = p.from_start && p.preset.empty() && !p.to_end;
    const bool clean_sink = p.to_end && p.postset.empty() && !p.from_start;
    if (clean_source)
      id = "source";
    else if (clean_sink)
      id = "sink";
    else
      id = "p" + std::to_string(++counter);
    places.push_back({id});
    for (const auto& a : p.preset) arcs.push_back({tid.at(a), id});
    for (const auto& a : p.postset) arcs.push_back({id, tid.at(a)});
    if (p.from_start && !clean_source) {
      places.push_back({"source"});
      wf.transitions.push_back({"tau_start", "tau_start", true});
      arcs.push_back({"source", "tau_start"});
      arcs.push_back({"tau_start", id});
    }
    if (p.to_end && !clean_sink) {
      places.push_back({"sink"});
      wf.transitions.push_back({"tau_end", "tau_end", true});
      arcs.push_back({id, "tau_end"});
      arcs.push_back({"tau_end", "sink"});
    }
  }

  // Canonical order: source, inner places by id number, sink.
  auto rank = [](const std::string& id) -> std::pair<int, std::size_t> {
    if (id == "source") return {0, 0};
    if (id == "sink") return {2, 0};
    return {1, std::stoul(id.substr(1))};
  };
  std::sort(places.begin(), places.end(),
            [&](const Place& x, const Place& y) { return rank(x.id) < rank(y.id); });
  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  });
  wf.places = std::move(places);
  wf.arcs = std::move(arcs);
  return wf;
}

WorkflowNet hm_finalize(const DfgState& state, const HeuristicsConfig& cfg) {
  return to_workflow_net(hm_causal_net(state, cfg));
}

}  // namespace confine::mining
