#include "confine/harness/split.hpp"

#include <set>
#include <vector>

#include "confine/error.hpp"
#include "json.hpp"

namespace confine::harness {

std::map<OrgId, LogPartition> split_log(const EventLog& log, const OrgMap& org_map) {
  std::map<OrgId, std::vector<Event>> buckets;
  for (const auto& e : log) {
    auto it = org_map.find(e.activity);
    if (it == org_map.end()) throw Error(Errc::kUnmappedActivity, "no organization records '" + e.activity + "'");
    Event copy = e;
    copy.provisioner_id = it->second;
    buckets[it->second].push_back(std::move(copy));
  }
  std::map<OrgId, LogPartition> out;
  for (auto& [org, events] : buckets) out[org] = EventLog::from_events(std::move(events));
  return out;
}

OrgMap org_map_from_json(std::string_view text) {
  OrgMap map;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [org, acts] : j.items()) {
      for (const auto& a : acts) {
        const auto label = a.get<std::string>();
        if (!map.emplace(label, org).second)
          throw Error(Errc::kInvalidConfig, "activity '" + label + "' is mapped to two organizations");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidConfig, std::string("org map: ") + e.what());
  }
  return map;
}

std::string to_json(const OrgMap& map) {
  std::map<OrgId, std::vector<ActivityLabel>> by_org;
  for (const auto& [a, org] : map) by_org[org].push_back(a);
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [org, acts] : by_org) j[org] = acts;
  return j.dump(2) + "\n";
}

}  // namespace confine::harness
