#include "confine/protocol/log_processor.hpp"

namespace confine::protocol {

void DeclareProcessor::process_log(const EventLog& log) {
  for (const auto& [iid, c] : split_by_case(log)) acc_.observe(c);
}

EventLog CollectingProcessor::collected() const {
  std::vector<EventLog> all(cases_.begin(), cases_.end());
  all.insert(all.end(), logs_.begin(), logs_.end());
  return merge_all(all);
}

}  // namespace confine::protocol
