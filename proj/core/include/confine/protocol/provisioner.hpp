#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "confine/enclave/attestation.hpp"
#include "confine/enclave/crypto.hpp"
#include "confine/protocol/messages.hpp"
#include "confine/segmenter.hpp"

namespace confine::protocol {

struct ProvisionerConfig {
  OrgId id;
  LogPartition partition;
  /// Miners this provisioner talks to; requests from anyone else are
  /// dropped without an answer.
  std::set<OrgId> allowed_miners;
  /// Identity proofs accepted inside attestation evidence.
  std::set<std::string> allowed_orgs;
  /// Expected measurement of the miner build.
  enclave::Measurement reference{};
  /// Hardware root public key; the simulated root if empty.
  Bytes root_public_key;
  OversizePolicy oversize_policy = OversizePolicy::kIsolate;
};

enum class ProvisionerStatus { kIdle, kAwaitingEvidence, kStreamed, kRejected };

std::string_view to_string(ProvisionerStatus s) noexcept;

/// Provisioner state machine. Like the miner, handlers return the messages
/// to send and must not run concurrently.
class Provisioner {
 public:
  /// `signer` is the provisioner's identity key used for sender proofs.
  Provisioner(ProvisionerConfig cfg, enclave::Signer signer);

  std::vector<Message> on_message(const Message& msg);

  const OrgId& id() const noexcept { return cfg_.id; }
  const Bytes& public_key() const noexcept { return signer_.public_key(); }
  ProvisionerStatus status() const noexcept { return status_; }
  std::optional<enclave::RejectReason> rejection() const noexcept { return rejection_; }
  /// Plan of the last streamed session.
  const std::optional<SegmentPlan>& plan() const noexcept { return plan_; }
  std::size_t cases_res_sent() const noexcept { return cases_res_sent_; }
  /// Short digests of every k_sym used so far, one per sealed segment.
  const std::vector<std::string>& k_sym_fingerprints() const noexcept { return fingerprints_; }

 private:
  ProvisionerConfig cfg_;
  enclave::Signer signer_;
  ProvisionerStatus status_ = ProvisionerStatus::kIdle;
  std::optional<enclave::RejectReason> rejection_;
  std::optional<CasesReq> pending_;
  Bytes nonce_;
  std::optional<SegmentPlan> plan_;
  std::size_t cases_res_sent_ = 0;
  std::vector<std::string> fingerprints_;
};

}  // namespace confine::protocol
