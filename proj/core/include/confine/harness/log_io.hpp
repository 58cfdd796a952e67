#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "confine/model.hpp"

namespace confine::harness {

enum class LogFormat { kCsv, kXes };

/// kCsv for ".csv", kXes for ".xes"; throws kInvalidConfig otherwise.
LogFormat format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  /// Column (CSV) or trace attribute (XES) holding the iid; remapped to the
  /// shared iid field. Matched exactly first, then case-insensitively.
  std::string iid_attribute = "case";
  /// Provisioner id for events that do not carry one.
  OrgId provisioner_id;
};

// CSV schema: header `case,activity,timestamp[,extras...]` (RFC 4180
// quoting). Two extra columns are reserved: `event_id` (generated as
// "<provisioner>:<row>" when absent) and `provisioner`. Empty extra cells
// are treated as absent attributes.

/// Throws kMissingAttribute, kUnparsableTimestamp and kIo.
EventLog load_log(const std::filesystem::path& path, LogFormat format, const LoadOptions& opts = {});
EventLog parse_csv(std::string_view text, const LoadOptions& opts = {});
/// Writes `case,activity,timestamp,event_id,provisioner` followed by the
/// union of extra attribute names in sorted order.
std::string to_csv(const EventLog& log);
void save_log(const std::filesystem::path& path, const EventLog& log);

/// XES subset: trace/event elements with concept:name and time:timestamp;
/// other event attributes become extras.
EventLog parse_xes(std::string_view text, const LoadOptions& opts = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Where the miner finds a provisioner and how that provisioner labels its
/// iid column.
struct ProvisionerRef {
  OrgId org_id;
  /// "file:<path>" for a local partition or "tcp://host:port".
  std::string endpoint;
  std::string iid_attribute_label;

  friend bool operator==(const ProvisionerRef&, const ProvisionerRef&) = default;
};

/// JSON list of {org_id, endpoint, iid_attribute_label}.
std::vector<ProvisionerRef> parse_provisioner_refs(std::string_view json);
std::string to_json(const std::vector<ProvisionerRef>& refs);

/// Loads every "file:" reference (relative paths resolve against `base`)
/// into a partition tagged with the reference's org id.
std::map<OrgId, LogPartition> load_partitions(const std::vector<ProvisionerRef>& refs,
                                              const std::filesystem::path& base);

}  // namespace confine::harness
