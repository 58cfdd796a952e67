#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "confine/enclave/accountant.hpp"
#include "confine/enclave/crypto.hpp"
#include "confine/protocol/log_processor.hpp"
#include "confine/protocol/messages.hpp"

namespace confine::protocol {

enum class Phase { kInitialization, kAttestation, kTransmission, kComputation };

std::string_view to_string(Phase p) noexcept;

struct MinerConfig {
  OrgId id = "miner";
  std::string session_id = "s1";
  /// Credential token placed in requests and in the attestation evidence.
  std::string identity_proof = "miner";
  std::vector<OrgId> provisioners;
  /// Ed25519 key each provisioner signs its segments with.
  std::map<OrgId, Bytes> provisioner_keys;
  std::uint64_t seg_size = 100'000;
  /// true: yield each case as soon as it is complete; false: yield one
  /// merged log at the end.
  bool do_yield_cases = true;
  enclave::Measurement measurement{};
  /// Hardware root that signs the evidence; the simulated root if null.
  const enclave::Signer* root = nullptr;
  std::optional<std::uint64_t> capacity;
};

/// Secure Miner state machine. Each handler consumes one delivered message
/// and returns the messages to send; handlers must not run concurrently.
class SecureMiner {
 public:
  /// Throws kNoProvisioners for an empty provisioner list.
  SecureMiner(MinerConfig cfg, LogProcessor& sink);

  /// One CasesRefReq per provisioner.
  std::vector<Message> start();

  /// Throws kUnknownProvisioner, kDuplicateResponse, kUnexpectedIid,
  /// kPhaseViolation and the envelope errors. After a throw the session is
  /// aborted and every further call throws kSessionEnded.
  std::vector<Message> on_message(const Message& msg);

  /// Every requested case has been handed to the sink.
  bool done() const noexcept;
  /// Throws kTruncatedStream if the session stopped before done().
  void finish() const;

  bool audit(std::string* why = nullptr) const;

  Phase phase() const noexcept { return phase_; }
  bool aborted() const noexcept { return aborted_; }
  const enclave::EnclaveAccountant& accountant() const noexcept { return acct_; }
  const std::map<CaseId, std::set<OrgId>>& cid_map() const noexcept { return cid_map_; }
  const std::map<OrgId, std::set<CaseId>>& pmap() const noexcept { return pmap_; }
  std::size_t yields() const noexcept { return yields_; }
  const Bytes& k_pub() const noexcept { return keys_.k_pub(); }

 private:
  std::vector<Message> on_cases_ref_res(const OrgId& from, const CasesRefRes& m);
  std::vector<Message> on_evidence_req(const OrgId& from, const EvidenceReq& m);
  std::vector<Message> on_cases_res(const OrgId& from, const CasesRes& m);
  void yield_all();
  /// Re-accounts the enclave bytes of cid_map and pmap.
  void refresh_bookkeeping();
  void account_mining(const std::function<void()>& work);
  Message make(const OrgId& to, Body body) const;

  friend struct SecureMinerProbe;

  MinerConfig cfg_;
  LogProcessor& sink_;
  enclave::SessionKeys keys_;
  enclave::EnclaveAccountant acct_;

  std::map<CaseId, std::set<OrgId>> cid_map_;
  std::map<OrgId, std::set<CaseId>> pmap_;
  std::map<CaseId, Case> cstor_;
  std::map<CaseId, std::uint64_t> cstor_bytes_;
  std::set<CaseId> complete_;
  std::set<OrgId> responded_;
  std::set<OrgId> attested_;
  std::map<OrgId, std::uint32_t> expected_segments_;
  std::map<OrgId, std::set<std::uint32_t>> received_segments_;
  std::uint64_t mining_bytes_ = 0;
  std::uint64_t bookkeeping_bytes_ = 0;

  Phase phase_ = Phase::kInitialization;
  bool fanned_out_ = false;
  bool final_yielded_ = false;
  bool aborted_ = false;
  std::size_t yields_ = 0;
};

}  // namespace confine::protocol
