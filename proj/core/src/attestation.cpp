#include "confine/enclave/attestation.hpp"

#include <algorithm>

#include "confine/error.hpp"

namespace confine::enclave {

Bytes AttestationEvidence::signed_payload() const {
  Bytes out;
  ByteWriter w(out);
  w.raw(measurement);
  w.blob(custom.identity_proof);
  w.blob(custom.k_pub);
  w.blob(custom.nonce);
  return out;
}

Bytes encode_evidence(const AttestationEvidence& ev) {
  Bytes out = ev.signed_payload();
  ByteWriter(out).blob(ev.signature);
  return out;
}

AttestationEvidence decode_evidence(ByteView bytes) {
  ByteReader r(bytes);
  AttestationEvidence ev;
  const auto m = r.raw(kMeasurementBytes);
  std::copy(m.begin(), m.end(), ev.measurement.begin());
  ev.custom.identity_proof = r.string();
  auto copy = [](ByteView b) { return Bytes(b.begin(), b.end()); };
  ev.custom.k_pub = copy(r.blob());
  ev.custom.nonce = copy(r.blob());
  ev.signature = copy(r.blob());
  if (!r.done()) throw Error(Errc::kDecode, "trailing bytes after evidence");
  return ev;
}

const Signer& simulated_hardware_root() {
  static const Signer root = Signer::from_label("confine simulated hardware root v1");
  return root;
}

std::string miner_build_manifest(std::string_view algorithm) {
  return "confine-secure-miner/1;algorithm=" + std::string(algorithm) +
         ";dependency=0.9;and=0.65;loop2=0.9;relative_to_best=0.05";
}

AttestationEvidence build_evidence(const Measurement& measurement, std::string identity_proof,
                                   ByteView k_pub, ByteView nonce, const Signer& root) {
  AttestationEvidence ev;
  ev.measurement = measurement;
  ev.custom.identity_proof = std::move(identity_proof);
  ev.custom.k_pub.assign(k_pub.begin(), k_pub.end());
  ev.custom.nonce.assign(nonce.begin(), nonce.end());
  ev.signature = root.sign(ev.signed_payload());
  return ev;
}

std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::kMeasurementMismatch: return "MeasurementMismatch";
    case RejectReason::kSignatureInvalid: return "SignatureInvalid";
    case RejectReason::kMalformedKey: return "MalformedKey";
    case RejectReason::kNonceMismatch: return "NonceMismatch";
    case RejectReason::kOrgNotAuthorized: return "OrgNotAuthorized";
  }
  return "?";
}

TrustDecision verify_evidence(const AttestationEvidence& ev, const Measurement& reference,
                              const std::set<std::string>& allowed_orgs, ByteView expected_nonce,
                              ByteView root_public_key) {
  if (ev.measurement != reference) return Rejected{RejectReason::kMeasurementMismatch};
  if (!verify_signature(root_public_key, ev.signed_payload(), ev.signature))
    return Rejected{RejectReason::kSignatureInvalid};
  if (ev.custom.k_pub.size() != kBoxPublicKeyBytes) return Rejected{RejectReason::kMalformedKey};
  if (!std::equal(ev.custom.nonce.begin(), ev.custom.nonce.end(), expected_nonce.begin(),
                  expected_nonce.end()))
    return Rejected{RejectReason::kNonceMismatch};
  if (!allowed_orgs.contains(ev.custom.identity_proof)) return Rejected{RejectReason::kOrgNotAuthorized};
  return Trusted{ev.custom.k_pub};
}

}  // namespace confine::enclave
