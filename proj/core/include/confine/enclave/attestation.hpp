#pragma once

#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "confine/bytes.hpp"
#include "confine/enclave/crypto.hpp"

namespace confine::enclave {

/// Data the enclave binds into its evidence.
struct CustomData {
  /// Credential token of the organization running the miner.
  std::string identity_proof;
  Bytes k_pub;
  /// Verifier-chosen freshness value echoed back.
  Bytes nonce;

  friend bool operator==(const CustomData&, const CustomData&) = default;
};

struct AttestationEvidence {
  Measurement measurement{};
  CustomData custom;
  /// Hardware-root signature over signed_payload().
  Bytes signature;

  /// measurement || blob identity_proof || blob k_pub || blob nonce.
  Bytes signed_payload() const;

  friend bool operator==(const AttestationEvidence&, const AttestationEvidence&) = default;
};

Bytes encode_evidence(const AttestationEvidence& ev);
/// Throws kDecode on malformed input.
AttestationEvidence decode_evidence(ByteView bytes);

/// The simulated CPU vendor key that endorses all evidence. Fixed, so that
/// every party agrees on it without a vendor service.
const Signer& simulated_hardware_root();

/// Canonical manifest string of a miner build; its digest is the reference
/// measurement provisioners expect.
std::string miner_build_manifest(std::string_view algorithm);

AttestationEvidence build_evidence(const Measurement& measurement, std::string identity_proof,
                                   ByteView k_pub, ByteView nonce,
                                   const Signer& root = simulated_hardware_root());

enum class RejectReason {
  kMeasurementMismatch,
  kSignatureInvalid,
  kMalformedKey,
  kNonceMismatch,
  kOrgNotAuthorized,
};

std::string_view to_string(RejectReason r) noexcept;

struct Trusted {
  Bytes k_pub;
  friend bool operator==(const Trusted&, const Trusted&) = default;
};
struct Rejected {
  RejectReason reason;
  friend bool operator==(const Rejected&, const Rejected&) = default;
};
using TrustDecision = std::variant<Trusted, Rejected>;

/// Checks, in order: measurement against the reference, the root signature,
/// the shape of k_pub, the nonce, and the organization allow-list. Pure.
TrustDecision verify_evidence(const AttestationEvidence& ev, const Measurement& reference,
                              const std::set<std::string>& allowed_orgs, ByteView expected_nonce,
                              ByteView root_public_key = simulated_hardware_root().public_key());

}  // namespace confine::enclave
