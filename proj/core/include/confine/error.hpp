#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confine {

/// Every failure raised by the library carries one of these codes so that
/// callers (and tests) can branch on the kind without string matching.
enum class Errc {
  kDuplicateEvent,
  kInvalidEvent,
  kUnsortedLog,
  kInvalidSegSize,
  kSegmentOverflow,
  kDecode,
  kEmptyCase,
  kNoObservations,
  kEmptyInput,
  kAuthFailure,
  kKeyUnwrapFailure,
  kSenderMismatch,
  kCapacityExceeded,
  kUnderflowBug,
  kNoProvisioners,
  kUnknownProvisioner,
  kDuplicateResponse,
  kUnexpectedIid,
  kPhaseViolation,
  kTruncatedStream,
  kAttestationRejected,
  kLinkClosed,
  kSessionEnded,
  kHandshakeRejected,
  kIo,
  kMissingAttribute,
  kUnparsableTimestamp,
  kUnmappedActivity,
  kDegenerateInput,
  kInvalidConfig,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace confine
