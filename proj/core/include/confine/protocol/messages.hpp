#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "confine/bytes.hpp"
#include "confine/enclave/attestation.hpp"
#include "confine/model.hpp"

namespace confine::protocol {

inline constexpr std::uint16_t kMessageVersion = 1;

/// Miner -> provisioner: asks for the case references the provisioner holds.
struct CasesRefReq {
  std::string identity_proof;
  friend bool operator==(const CasesRefReq&, const CasesRefReq&) = default;
};

/// Provisioner -> miner.
struct CasesRefRes {
  std::set<CaseId> iids;
  friend bool operator==(const CasesRefRes&, const CasesRefRes&) = default;
};

/// Miner -> provisioner: the iids to ship and the segment budget.
struct CasesReq {
  std::uint64_t seg_size = 0;
  std::set<CaseId> iids;
  friend bool operator==(const CasesReq&, const CasesReq&) = default;
};

/// Provisioner -> miner: attestation challenge.
struct EvidenceReq {
  Bytes nonce;
  friend bool operator==(const EvidenceReq&, const EvidenceReq&) = default;
};

/// Miner -> provisioner.
struct EvidenceRes {
  enclave::AttestationEvidence evidence;
  friend bool operator==(const EvidenceRes&, const EvidenceRes&) = default;
};

/// Provisioner -> miner: one sealed segment. segment_count lets the miner
/// notice a truncated stream.
struct CasesRes {
  std::uint32_t segment_index = 0;
  std::uint32_t segment_count = 0;
  Bytes envelope;
  friend bool operator==(const CasesRes&, const CasesRes&) = default;
};

using Body = std::variant<CasesRefReq, CasesRefRes, CasesReq, EvidenceReq, EvidenceRes, CasesRes>;

struct Message {
  OrgId sender;
  OrgId receiver;
  std::string session_id;
  Body body;

  friend bool operator==(const Message&, const Message&) = default;
};

std::string_view kind_name(const Body& body) noexcept;

// Frame: u16 version | u8 kind | blob json_header | blob binary_payload.
// Control fields travel in the JSON header; the binary payload carries the
// envelope of a CasesRes and is empty otherwise.
Bytes encode_message(const Message& msg);
/// Throws kDecode on malformed input or an unknown version or kind.
Message decode_message(ByteView bytes);

}  // namespace confine::protocol
