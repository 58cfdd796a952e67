#include "confine/protocol/provisioner.hpp"

#include "confine/enclave/envelope.hpp"
#include "confine/error.hpp"
#include "confine/log_codec.hpp"

namespace confine::protocol {

std::string_view to_string(ProvisionerStatus s) noexcept {
  switch (s) {
    case ProvisionerStatus::kIdle: return "idle";
    case ProvisionerStatus::kAwaitingEvidence: return "awaiting-evidence";
    case ProvisionerStatus::kStreamed: return "streamed";
    case ProvisionerStatus::kRejected: return "rejected";
  }
  return "?";
}

Provisioner::Provisioner(ProvisionerConfig cfg, enclave::Signer signer)
    : cfg_(std::move(cfg)), signer_(std::move(signer)) {
  if (cfg_.root_public_key.empty()) cfg_.root_public_key = enclave::simulated_hardware_root().public_key();
}

std::vector<Message> Provisioner::on_message(const Message& msg) {
  if (!cfg_.allowed_miners.contains(msg.sender)) return {};
  auto reply = [&](Body body) { return Message{cfg_.id, msg.sender, msg.session_id, std::move(body)}; };

  if (std::holds_alternative<CasesRefReq>(msg.body)) {
    return {reply(CasesRefRes{iid_set(cfg_.partition)})};
  }
  if (const auto* req = std::get_if<CasesReq>(&msg.body)) {
    pending_ = *req;
    nonce_ = enclave::random_bytes(16);
    status_ = ProvisionerStatus::kAwaitingEvidence;
    return {reply(EvidenceReq{nonce_})};
  }
  if (const auto* res = std::get_if<EvidenceRes>(&msg.body)) {
    if (status_ != ProvisionerStatus::kAwaitingEvidence || !pending_)
      throw Error(Errc::kPhaseViolation, "unsolicited evidence from " + msg.sender);
    const auto decision =
        enclave::verify_evidence(res->evidence, cfg_.reference, cfg_.allowed_orgs, nonce_, cfg_.root_public_key);
    if (const auto* no = std::get_if<enclave::Rejected>(&decision)) {
      status_ = ProvisionerStatus::kRejected;
      rejection_ = no->reason;
      pending_.reset();
      return {};
    }
    const auto& k_pub = std::get<enclave::Trusted>(decision).k_pub;
    plan_ = segment_event_log(cfg_.partition, pending_->iids,
                              static_cast<std::int64_t>(pending_->seg_size), cfg_.oversize_policy);
    pending_.reset();
    status_ = ProvisionerStatus::kStreamed;

    std::vector<Message> out;
    const auto count = static_cast<std::uint32_t>(plan_->segments.size());
    for (std::uint32_t i = 0; i < count; ++i) {
      const Bytes k_sym = enclave::generate_k_sym();
      const auto fp = enclave::digest(std::string_view(reinterpret_cast<const char*>(k_sym.data()), k_sym.size()));
      fingerprints_.push_back(to_hex(ByteView(fp.data(), 8)));
      const auto env = enclave::seal_segment(wire::encode_log(plan_->segments[i]), k_sym, k_pub, signer_);
      out.push_back(reply(CasesRes{i, count, enclave::encode_envelope(env)}));
    }
    cases_res_sent_ += out.size();
    return out;
  }
  throw Error(Errc::kPhaseViolation, "a provisioner does not handle " + std::string(kind_name(msg.body)));
}

}  // namespace confine::protocol
