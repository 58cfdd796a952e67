#include "confine/enclave/accountant.hpp"

#include <string>

#include "confine/error.hpp"

namespace confine::enclave {

void EnclaveAccountant::account(std::int64_t delta) {
  if (delta < 0 && static_cast<std::uint64_t>(-delta) > current_)
    throw Error(Errc::kUnderflowBug, "releasing " + std::to_string(-delta) + " bytes with only " +
                                         std::to_string(current_) + " held");
  const std::uint64_t next =
      delta < 0 ? current_ - static_cast<std::uint64_t>(-delta) : current_ + static_cast<std::uint64_t>(delta);
  if (capacity_ && next > *capacity_)
    throw Error(Errc::kCapacityExceeded, std::to_string(next) + " bytes exceed the enclave capacity of " +
                                             std::to_string(*capacity_));
  current_ = next;
  if (current_ > peak_) peak_ = current_;
}

}  // namespace confine::enclave
