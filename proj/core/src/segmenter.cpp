#include "confine/segmenter.hpp"

#include "confine/error.hpp"
#include "confine/log_codec.hpp"

namespace confine {

SegmentPlan segment_event_log(const LogPartition& partition, const std::set<CaseId>& iids,
                              std::int64_t seg_size, OversizePolicy policy) {
  if (seg_size <= 0)
    throw Error(Errc::kInvalidSegSize, "seg_size must be positive, got " + std::to_string(seg_size));

  SegmentPlan plan;
  plan.seg_size = seg_size;
  const auto budget = static_cast<std::uint64_t>(seg_size);

  // Group once instead of calling extract_case per iid.
  auto cases = split_by_case(partition);

  std::vector<Case> open;
  std::uint64_t open_size = wire::kEnvelopeBytes;
  auto seal = [&] {
    if (open.empty()) return;
    plan.segments.push_back(merge_all(open));
    open.clear();
    open_size = wire::kEnvelopeBytes;
  };

  for (const auto& iid : iids) {
    auto it = cases.find(iid);
    if (it == cases.end()) continue;
    Case& c = it->second;
    const std::uint64_t case_payload = wire::size_of(c) - wire::kEnvelopeBytes;

    if (wire::kEnvelopeBytes + case_payload > budget) {
      if (policy == OversizePolicy::kStrict)
        throw Error(Errc::kSegmentOverflow,
                    "case " + iid + " needs " + std::to_string(wire::kEnvelopeBytes + case_payload) +
                        " bytes, seg_size is " + std::to_string(seg_size));
      plan.oversized_cases.push_back(iid);
    }
    if (!open.empty() && open_size + case_payload > budget) seal();
    open.push_back(std::move(c));
    open_size += case_payload;
  }
  seal();
  return plan;
}

}  // namespace confine
