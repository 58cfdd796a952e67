#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "confine/harness/log_io.hpp"
#include "confine/model.hpp"
#include "confine/timestamp.hpp"

namespace confine::testing {

inline std::filesystem::path data_dir() { return CONFINE_TEST_DATA_DIR; }

inline Event make_event(std::string id, std::string iid, std::string activity, std::string_view ts,
                        std::string provisioner = "p") {
  Event e;
  e.event_id = std::move(id);
  e.iid = std::move(iid);
  e.activity = std::move(activity);
  e.timestamp = parse_timestamp(ts);
  e.provisioner_id = std::move(provisioner);
  return e;
}

/// The three partitions of the motivating example, keyed by org.
inline std::map<OrgId, LogPartition> motivating_partitions() {
  const auto dir = data_dir() / "motivating";
  return harness::load_partitions(harness::parse_provisioner_refs(harness::read_file(dir / "providers.json")), dir);
}

inline std::vector<std::string> ids_of(const EventLog& log) {
  std::vector<std::string> out;
  for (const auto& e : log) out.push_back(e.event_id);
  return out;
}

/// Random events with unique ids and a small pool of iids, activities and
/// timestamps so that ties and shared cases are common.
struct RandomLogGen {
  std::mt19937_64 rng;
  std::size_t next_id = 0;

  explicit RandomLogGen(std::uint64_t seed) : rng(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); }

  Event event(const std::string& provisioner, std::size_t n_cases, std::size_t n_times) {
    Event e;
    e.event_id = "ev" + std::to_string(next_id++);
    e.iid = "c" + std::to_string(uniform(0, n_cases - 1));
    e.activity = std::string(1, static_cast<char>('A' + uniform(0, 7)));
    e.timestamp = static_cast<Timestamp>(uniform(0, n_times - 1)) * 60'000;
    e.provisioner_id = provisioner;
    if (uniform(0, 3) == 0) e.extras["cost"] = std::to_string(uniform(1, 500));
    return e;
  }

  std::vector<Event> events(const std::string& provisioner, std::size_t n, std::size_t n_cases = 8,
                            std::size_t n_times = 20) {
    std::vector<Event> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(event(provisioner, n_cases, n_times));
    return out;
  }

  EventLog log(const std::string& provisioner, std::size_t n, std::size_t n_cases = 8, std::size_t n_times = 20) {
    return EventLog::from_events(events(provisioner, n, n_cases, n_times));
  }
};

/// Brute-force oracle: concatenate and sort.
inline std::vector<Event> sorted_union(const std::vector<EventLog>& logs) {
  std::vector<Event> all;
  for (const auto& l : logs) all.insert(all.end(), l.begin(), l.end());
  std::sort(all.begin(), all.end(), CanonicalLess{});
  return all;
}

}  // namespace confine::testing
