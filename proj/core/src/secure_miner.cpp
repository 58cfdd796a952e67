#include "confine/protocol/secure_miner.hpp"

#include <algorithm>

#include "confine/enclave/envelope.hpp"
#include "confine/error.hpp"
#include "confine/log_codec.hpp"

namespace confine::protocol {
namespace {

std::uint64_t event_bytes(const EventLog& log) {
  return wire::size_of(log) - wire::kEnvelopeBytes;
}

std::int64_t signed_bytes(std::uint64_t n) { return static_cast<std::int64_t>(n); }

// Same per-node estimate as the mining state footprint.
constexpr std::uint64_t kNodeBytes = 48;

}  // namespace

std::string_view to_string(Phase p) noexcept {
  switch (p) {
    case Phase::kInitialization: return "initialization";
    case Phase::kAttestation: return "attestation";
    case Phase::kTransmission: return "transmission";
    case Phase::kComputation: return "computation";
  }
  return "?";
}

SecureMiner::SecureMiner(MinerConfig cfg, LogProcessor& sink)
    : cfg_(std::move(cfg)), sink_(sink), keys_(enclave::SessionKeys::generate()), acct_(cfg_.capacity) {
  if (cfg_.provisioners.empty()) throw Error(Errc::kNoProvisioners, "the miner needs at least one provisioner");
  std::set<OrgId> seen;
  for (const auto& p : cfg_.provisioners) {
    if (!seen.insert(p).second) throw Error(Errc::kInvalidConfig, "provisioner " + p + " listed twice");
  }
}

Message SecureMiner::make(const OrgId& to, Body body) const {
  return Message{cfg_.id, to, cfg_.session_id, std::move(body)};
}

std::vector<Message> SecureMiner::start() {
  std::vector<Message> out;
  for (const auto& p : cfg_.provisioners) out.push_back(make(p, CasesRefReq{cfg_.identity_proof}));
  return out;
}

std::vector<Message> SecureMiner::on_message(const Message& msg) {
  if (aborted_) throw Error(Errc::kSessionEnded, "session " + cfg_.session_id + " was aborted");
  try {
    if (msg.session_id != cfg_.session_id)
      throw Error(Errc::kPhaseViolation, "message for session " + msg.session_id);
    if (!std::count(cfg_.provisioners.begin(), cfg_.provisioners.end(), msg.sender))
      throw Error(Errc::kUnknownProvisioner, msg.sender + " is not a configured provisioner");
    if (const auto* m = std::get_if<CasesRefRes>(&msg.body)) return on_cases_ref_res(msg.sender, *m);
    if (const auto* m = std::get_if<EvidenceReq>(&msg.body)) return on_evidence_req(msg.sender, *m);
    if (const auto* m = std::get_if<CasesRes>(&msg.body)) return on_cases_res(msg.sender, *m);
    throw Error(Errc::kPhaseViolation,
                "the miner does not handle " + std::string(kind_name(msg.body)));
  } catch (...) {
    aborted_ = true;
    throw;
  }
}

std::vector<Message> SecureMiner::on_cases_ref_res(const OrgId& from, const CasesRefRes& m) {
  if (fanned_out_ || !responded_.insert(from).second)
    throw Error(Errc::kDuplicateResponse, "second CasesRefRes from " + from);
  auto& mine = pmap_[from];
  for (const auto& iid : m.iids) {
    cid_map_[iid].insert(from);
    mine.insert(iid);
  }
  refresh_bookkeeping();
  if (responded_.size() < cfg_.provisioners.size()) return {};

  fanned_out_ = true;
  phase_ = Phase::kAttestation;
  std::vector<Message> out;
  for (const auto& p : cfg_.provisioners) out.push_back(make(p, CasesReq{cfg_.seg_size, pmap_[p]}));
  if (cid_map_.empty()) {
    phase_ = Phase::kComputation;
    if (!cfg_.do_yield_cases) yield_all();
  }
  return out;
}

std::vector<Message> SecureMiner::on_evidence_req(const OrgId& from, const EvidenceReq& m) {
  if (!fanned_out_) throw Error(Errc::kPhaseViolation, "EvidenceReq from " + from + " before CasesReq");
  const auto& root = cfg_.root ? *cfg_.root : enclave::simulated_hardware_root();
  attested_.insert(from);
  return {make(from, EvidenceRes{enclave::build_evidence(cfg_.measurement, cfg_.identity_proof,
                                                         keys_.k_pub(), m.nonce, root)})};
}

void SecureMiner::account_mining(const std::function<void()>& work) {
  work();
  const auto now = sink_.state_bytes();
  acct_.account(signed_bytes(now) - signed_bytes(mining_bytes_));
  mining_bytes_ = now;
}

std::vector<Message> SecureMiner::on_cases_res(const OrgId& from, const CasesRes& m) {
  if (!attested_.contains(from))
    throw Error(Errc::kPhaseViolation, "CasesRes from " + from + " before its attestation");
  if (m.segment_count == 0 || m.segment_index >= m.segment_count)
    throw Error(Errc::kDecode, "bad segment numbering from " + from);
  auto key = cfg_.provisioner_keys.find(from);
  if (key == cfg_.provisioner_keys.end())
    throw Error(Errc::kSenderMismatch, "no verification key for " + from);

  const Bytes plaintext = enclave::open_segment(enclave::decode_envelope(m.envelope), keys_, key->second);
  acct_.account(signed_bytes(plaintext.size()));
  const Segment segment = wire::decode_log(plaintext);
  auto cases = split_by_case(segment);

  auto& pending = pmap_[from];
  for (const auto& [iid, c] : cases) {
    if (!pending.contains(iid))
      throw Error(Errc::kUnexpectedIid, from + " sent case " + iid + " it did not announce or already sent");
  }
  if (phase_ == Phase::kAttestation) phase_ = Phase::kTransmission;
  expected_segments_[from] = m.segment_count;
  received_segments_[from].insert(m.segment_index);

  for (auto& [iid, c] : cases) {
    pending.erase(iid);
    auto& holders = cid_map_.at(iid);
    holders.erase(from);
    const auto added = event_bytes(c);
    acct_.account(signed_bytes(added));
    cstor_bytes_[iid] += added;
    auto [slot, fresh] = cstor_.try_emplace(iid, std::move(c));
    if (!fresh) slot->second = merge(slot->second, c);
    if (!holders.empty()) continue;

    cid_map_.erase(iid);
    complete_.insert(iid);
    if (cfg_.do_yield_cases) {
      if (cid_map_.empty()) phase_ = Phase::kComputation;
      account_mining([&] { sink_.process_case(slot->second); });
      ++yields_;
      acct_.account(-signed_bytes(cstor_bytes_[iid]));
      cstor_bytes_.erase(iid);
      cstor_.erase(slot);
    }
  }
  if (!cfg_.do_yield_cases && cid_map_.empty()) {
    phase_ = Phase::kComputation;
    yield_all();
  }
  refresh_bookkeeping();
  acct_.account(-signed_bytes(plaintext.size()));
  return {};
}

void SecureMiner::refresh_bookkeeping() {
  std::uint64_t n = 0;
  for (const auto& [iid, holders] : cid_map_) {
    n += kNodeBytes + iid.size();
    for (const auto& p : holders) n += kNodeBytes + p.size();
  }
  for (const auto& [p, iids] : pmap_) {
    if (iids.empty()) continue;  // drained entries are released
    n += kNodeBytes + p.size();
    for (const auto& iid : iids) n += kNodeBytes + iid.size();
  }
  acct_.account(signed_bytes(n) - signed_bytes(bookkeeping_bytes_));
  bookkeeping_bytes_ = n;
}

void SecureMiner::yield_all() {
  std::vector<EventLog> parts;
  parts.reserve(cstor_.size());
  for (auto& [iid, c] : cstor_) parts.push_back(std::move(c));
  const EventLog log = merge_all(parts);
  parts.clear();
  const auto log_bytes = wire::size_of(log);
  acct_.account(signed_bytes(log_bytes));
  account_mining([&] { sink_.process_log(log); });
  ++yields_;
  final_yielded_ = true;
  acct_.account(-signed_bytes(log_bytes));
  std::uint64_t held = 0;
  for (const auto& [iid, n] : cstor_bytes_) held += n;
  acct_.account(-signed_bytes(held));
  cstor_.clear();
  cstor_bytes_.clear();
}

bool SecureMiner::done() const noexcept {
  if (!fanned_out_ || !cid_map_.empty() || aborted_) return false;
  return cfg_.do_yield_cases || final_yielded_;
}

void SecureMiner::finish() const {
  if (done()) return;
  std::string detail;
  for (const auto& [p, iids] : pmap_) {
    if (iids.empty()) continue;
    const auto exp = expected_segments_.find(p);
    const auto got = received_segments_.find(p);
    detail += " " + p + ": " + std::to_string(iids.size()) + " cases pending";
    if (exp != expected_segments_.end())
      detail += ", " + std::to_string(got == received_segments_.end() ? 0 : got->second.size()) + "/" +
                std::to_string(exp->second) + " segments";
    detail += ";";
  }
  throw Error(Errc::kTruncatedStream, "session " + cfg_.session_id + " ended early:" + detail);
}

bool SecureMiner::audit(std::string* why) const {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  for (const auto& [iid, holders] : cid_map_) {
    if (holders.empty()) return fail("cid_map[" + iid + "] is empty but still present");
    for (const auto& p : holders) {
      auto it = pmap_.find(p);
      if (it == pmap_.end() || !it->second.contains(iid))
        return fail(p + " in cid_map[" + iid + "] but " + iid + " not in pmap[" + p + "]");
    }
  }
  for (const auto& [p, iids] : pmap_) {
    for (const auto& iid : iids) {
      auto it = cid_map_.find(iid);
      if (it == cid_map_.end() || !it->second.contains(p))
        return fail(iid + " in pmap[" + p + "] but " + p + " not in cid_map[" + iid + "]");
    }
  }
  for (const auto& [iid, c] : cstor_) {
    for (const auto& e : c) {
      if (e.iid != iid) return fail("cstor[" + iid + "] holds an event of case " + e.iid);
    }
  }
  return true;
}

}  // namespace confine::protocol
