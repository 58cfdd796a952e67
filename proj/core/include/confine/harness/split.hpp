#pragma once

#include <map>
#include <string>
#include <string_view>

#include "confine/model.hpp"

namespace confine::harness {

/// activity -> organization recording it.
using OrgMap = std::map<ActivityLabel, OrgId>;

/// Splits a log by the organization of each activity and stamps every event
/// with that organization as provisioner. Throws kUnmappedActivity if an
/// activity is missing from the map.
std::map<OrgId, LogPartition> split_log(const EventLog& log, const OrgMap& org_map);

/// {"org": ["activity", ...], ...}; throws kInvalidConfig if an activity
/// is listed under two organizations.
OrgMap org_map_from_json(std::string_view json);
std::string to_json(const OrgMap& map);

}  // namespace confine::harness
