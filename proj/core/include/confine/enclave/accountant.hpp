#pragma once

#include <cstdint>
#include <optional>

namespace confine::enclave {

/// Bytes held inside the simulated protected memory.
class EnclaveAccountant {
 public:
  explicit EnclaveAccountant(std::optional<std::uint64_t> capacity = std::nullopt)
      : capacity_(capacity) {}

  /// Applies `delta`. Throws kCapacityExceeded if the result would exceed the
  /// capacity and kUnderflowBug if it would drop below zero; in both cases the
  /// state is left unchanged.
  void account(std::int64_t delta);

  std::uint64_t current() const noexcept { return current_; }
  std::uint64_t peak() const noexcept { return peak_; }
  std::optional<std::uint64_t> capacity() const noexcept { return capacity_; }

 private:
  std::uint64_t current_ = 0;
  std::uint64_t peak_ = 0;
  std::optional<std::uint64_t> capacity_;
};

}  // namespace confine::enclave
