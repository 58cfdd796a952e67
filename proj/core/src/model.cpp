#include "confine/model.hpp"

#include <algorithm>
#include <unordered_set>

#include "confine/error.hpp"

namespace confine {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kDuplicateEvent: return "DuplicateEvent";
    case Errc::kInvalidEvent: return "InvalidEvent";
    case Errc::kUnsortedLog: return "UnsortedLog";
    case Errc::kInvalidSegSize: return "InvalidSegSize";
    case Errc::kSegmentOverflow: return "SegmentOverflow";
    case Errc::kDecode: return "DecodeError";
    case Errc::kEmptyCase: return "EmptyCase";
    case Errc::kNoObservations: return "NoObservations";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kAuthFailure: return "AuthFailure";
    case Errc::kKeyUnwrapFailure: return "KeyUnwrapFailure";
    case Errc::kSenderMismatch: return "SenderMismatch";
    case Errc::kCapacityExceeded: return "CapacityExceeded";
    case Errc::kUnderflowBug: return "UnderflowBug";
    case Errc::kNoProvisioners: return "NoProvisioners";
    case Errc::kUnknownProvisioner: return "UnknownProvisioner";
    case Errc::kDuplicateResponse: return "DuplicateResponse";
    case Errc::kUnexpectedIid: return "UnexpectedIid";
    case Errc::kPhaseViolation: return "PhaseViolation";
    case Errc::kTruncatedStream: return "TruncatedStream";
    case Errc::kAttestationRejected: return "AttestationRejected";
    case Errc::kLinkClosed: return "LinkClosed";
    case Errc::kSessionEnded: return "SessionEnded";
    case Errc::kHandshakeRejected: return "HandshakeRejected";
    case Errc::kIo: return "IoError";
    case Errc::kMissingAttribute: return "MissingAttribute";
    case Errc::kUnparsableTimestamp: return "UnparsableTimestamp";
    case Errc::kUnmappedActivity: return "UnmappedActivity";
    case Errc::kDegenerateInput: return "DegenerateInput";
    case Errc::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

std::strong_ordering canonical_compare(const Event& lhs, const Event& rhs) noexcept {
  if (auto c = lhs.timestamp <=> rhs.timestamp; c != 0) return c;
  if (auto c = lhs.provisioner_id <=> rhs.provisioner_id; c != 0) return c;
  return lhs.event_id <=> rhs.event_id;
}

namespace {

void validate(const Event& e) {
  if (e.event_id.empty()) throw Error(Errc::kInvalidEvent, "event without id");
  if (e.iid.empty()) throw Error(Errc::kInvalidEvent, "event " + e.event_id + " has no iid");
  if (e.activity.empty())
    throw Error(Errc::kInvalidEvent, "event " + e.event_id + " has no activity");
  if (e.timestamp < 0)
    throw Error(Errc::kInvalidEvent, "event " + e.event_id + " has a negative timestamp");
}

void check_unique_ids(const std::vector<Event>& events) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(events.size());
  for (const auto& e : events) {
    if (!seen.insert(e.event_id).second)
      throw Error(Errc::kDuplicateEvent, "event id " + e.event_id + " occurs twice");
  }
}

}  // namespace

EventLog EventLog::from_events(std::vector<Event> events) {
  for (const auto& e : events) validate(e);
  std::sort(events.begin(), events.end(), CanonicalLess{});
  check_unique_ids(events);
  return EventLog(std::move(events));
}

EventLog EventLog::from_sorted(std::vector<Event> events) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    validate(events[i]);
    if (i > 0 && canonical_compare(events[i - 1], events[i]) >= 0)
      throw Error(Errc::kUnsortedLog, "event " + events[i].event_id + " out of canonical order");
  }
  check_unique_ids(events);
  return EventLog(std::move(events));
}

EventLog merge(const EventLog& lhs, const EventLog& rhs) {
  if (rhs.empty()) return lhs;
  if (lhs.empty()) return rhs;

  const auto& small = lhs.size() <= rhs.size() ? lhs : rhs;
  const auto& large = lhs.size() <= rhs.size() ? rhs : lhs;
  std::unordered_set<std::string_view> ids;
  ids.reserve(small.size());
  for (const auto& e : small) ids.insert(e.event_id);
  for (const auto& e : large) {
    if (ids.contains(e.event_id))
      throw Error(Errc::kDuplicateEvent, "event id " + e.event_id + " present in both logs");
  }

  std::vector<Event> out;
  out.reserve(lhs.size() + rhs.size());
  std::merge(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(), std::back_inserter(out),
             CanonicalLess{});
  return EventLog(std::move(out));
}

EventLog merge_all(const std::vector<EventLog>& logs) {
  std::size_t total = 0;
  for (const auto& l : logs) total += l.size();
  std::vector<Event> out;
  out.reserve(total);
  for (const auto& l : logs) out.insert(out.end(), l.begin(), l.end());
  return EventLog::from_events(std::move(out));
}

Case extract_case(const EventLog& log, std::string_view iid) {
  std::vector<Event> out;
  for (const auto& e : log) {
    if (e.iid == iid) out.push_back(e);
  }
  return EventLog::from_sorted(std::move(out));
}

std::set<CaseId> iid_set(const EventLog& log) {
  std::set<CaseId> out;
  for (const auto& e : log) out.insert(e.iid);
  return out;
}

std::map<CaseId, Case> split_by_case(const EventLog& log) {
  std::map<CaseId, std::vector<Event>> groups;
  for (const auto& e : log) groups[e.iid].push_back(e);
  std::map<CaseId, Case> out;
  for (auto& [iid, events] : groups) out.emplace(iid, EventLog::from_sorted(std::move(events)));
  return out;
}

std::vector<ActivityLabel> trace_of(const Case& c) {
  std::vector<ActivityLabel> out;
  out.reserve(c.size());
  for (const auto& e : c) out.push_back(e.activity);
  return out;
}

}  // namespace confine
