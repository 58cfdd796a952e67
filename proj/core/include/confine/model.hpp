#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "confine/timestamp.hpp"

namespace confine {

using CaseId = std::string;
using ActivityLabel = std::string;
using OrgId = std::string;

/// One recorded event. iid, activity and timestamp are mandatory; any other
/// attribute of the source log travels in `extras`.
struct Event {
  std::string event_id;
  CaseId iid;
  ActivityLabel activity;
  Timestamp timestamp = 0;
  OrgId provisioner_id;
  std::map<std::string, std::string> extras;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Strict total order over events: timestamp first, then provisioner id,
/// then event id. Two events compare equal only when their ids match.
std::strong_ordering canonical_compare(const Event& lhs, const Event& rhs) noexcept;

struct CanonicalLess {
  bool operator()(const Event& lhs, const Event& rhs) const noexcept {
    return canonical_compare(lhs, rhs) < 0;
  }
};

/// A totally ordered, duplicate-free sequence of events.
///
/// The class invariant (sorted by canonical_compare, unique event ids,
/// well-formed events) is established at construction; every operation in
/// this header preserves it. Partitions, segments and cases are all
/// EventLogs restricted in what they contain.
class EventLog {
 public:
  using const_iterator = std::vector<Event>::const_iterator;

  EventLog() = default;

  /// Sorts `events` canonically. Throws kDuplicateEvent / kInvalidEvent.
  static EventLog from_events(std::vector<Event> events);

  /// Adopts an already sorted sequence; throws kUnsortedLog if it is not.
  static EventLog from_sorted(std::vector<Event> events);

  const std::vector<Event>& events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  const_iterator begin() const noexcept { return events_.begin(); }
  const_iterator end() const noexcept { return events_.end(); }

  /// Moves the events out, leaving the log empty.
  std::vector<Event> release() && { return std::move(events_); }

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  friend EventLog merge(const EventLog&, const EventLog&);

  explicit EventLog(std::vector<Event> events) : events_(std::move(events)) {}

  std::vector<Event> events_;
};

/// Log partition: every event has the same provisioner_id.
using LogPartition = EventLog;
/// Case: every event has the same iid.
using Case = EventLog;
/// Segment: case-complete slice of one partition.
using Segment = EventLog;

/// Safe merge. Linear two-way merge under the canonical order; the result
/// holds every event of both inputs exactly once.
/// Throws kDuplicateEvent if an event id appears in both inputs.
EventLog merge(const EventLog& lhs, const EventLog& rhs);

/// Merge of all `logs`. Same result as a left fold of merge (the operation
/// is associative and commutative), computed in one sort.
EventLog merge_all(const std::vector<EventLog>& logs);

/// All events with the given iid, order preserved.
Case extract_case(const EventLog& log, std::string_view iid);

/// Distinct iids in the log.
std::set<CaseId> iid_set(const EventLog& log);

/// Groups the log by iid in one pass; equivalent to calling extract_case for
/// every element of iid_set.
std::map<CaseId, Case> split_by_case(const EventLog& log);

/// Activity sequence (trace) of a case.
std::vector<ActivityLabel> trace_of(const Case& c);

}  // namespace confine
