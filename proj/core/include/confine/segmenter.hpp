#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "confine/model.hpp"

namespace confine {

enum class OversizePolicy {
  /// A case larger than seg_size travels alone in its own segment and is
  /// reported in SegmentPlan::oversized_cases.
  kIsolate,
  /// A case larger than seg_size is an error (kSegmentOverflow).
  kStrict,
};

struct SegmentPlan {
  std::vector<Segment> segments;
  std::int64_t seg_size = 0;
  /// Cases that alone exceed seg_size (kIsolate only).
  std::vector<CaseId> oversized_cases;

  friend bool operator==(const SegmentPlan&, const SegmentPlan&) = default;
};

/// Greedy first-fit packing of whole cases into segments of at most
/// `seg_size` encoded bytes (wire::size_of).
///
/// Cases are visited in ascending iid order. A case is appended to the open
/// segment unless the enlarged segment would exceed `seg_size`, in which case
/// the open segment is sealed and the case starts a new one. Cases are never
/// split. Events whose iid is not in `iids` are left out; iids absent from
/// the partition contribute nothing.
///
/// Throws kInvalidSegSize if seg_size <= 0.
SegmentPlan segment_event_log(const LogPartition& partition, const std::set<CaseId>& iids,
                              std::int64_t seg_size,
                              OversizePolicy policy = OversizePolicy::kIsolate);

}  // namespace confine
