#include "confine/protocol/messages.hpp"

#include "confine/error.hpp"
#include "json.hpp"

namespace confine::protocol {
namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json iid_array(const std::set<CaseId>& iids) { return json(iids); }

std::set<CaseId> iid_set_of(const json& j) {
  std::set<CaseId> out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

}  // namespace

std::string_view kind_name(const Body& body) noexcept {
  static constexpr std::string_view kNames[] = {"CasesRefReq", "CasesRefRes", "CasesReq",
                                                "EvidenceReq", "EvidenceRes", "CasesRes"};
  return kNames[body.index()];
}

Bytes encode_message(const Message& msg) {
  json h;
  h["sender"] = msg.sender;
  h["receiver"] = msg.receiver;
  h["session"] = msg.session_id;
  Bytes payload;
  std::visit(overloaded{
                 [&](const CasesRefReq& m) { h["identity_proof"] = m.identity_proof; },
                 [&](const CasesRefRes& m) { h["iids"] = iid_array(m.iids); },
                 [&](const CasesReq& m) {
                   h["seg_size"] = m.seg_size;
                   h["iids"] = iid_array(m.iids);
                 },
                 [&](const EvidenceReq& m) { h["nonce"] = to_hex(m.nonce); },
                 [&](const EvidenceRes& m) { h["evidence"] = to_hex(enclave::encode_evidence(m.evidence)); },
                 [&](const CasesRes& m) {
                   h["segment_index"] = m.segment_index;
                   h["segment_count"] = m.segment_count;
                   payload = m.envelope;
                 },
             },
             msg.body);
  Bytes out;
  ByteWriter w(out);
  w.u16(kMessageVersion);
  w.u8(static_cast<std::uint8_t>(msg.body.index()));
  w.blob(h.dump());
  w.blob(payload);
  return out;
}

Message decode_message(ByteView bytes) {
  ByteReader r(bytes);
  if (const auto v = r.u16(); v != kMessageVersion)
    throw Error(Errc::kDecode, "unsupported message version " + std::to_string(v));
  const auto kind = r.u8();
  const auto header = r.string();
  const auto payload = r.blob();
  if (!r.done()) throw Error(Errc::kDecode, "trailing bytes after message");

  Message msg;
  try {
    const auto h = json::parse(header);
    msg.sender = h.at("sender").get<std::string>();
    msg.receiver = h.at("receiver").get<std::string>();
    msg.session_id = h.at("session").get<std::string>();
    switch (kind) {
      case 0:
        msg.body = CasesRefReq{h.at("identity_proof").get<std::string>()};
        break;
      case 1:
        msg.body = CasesRefRes{iid_set_of(h.at("iids"))};
        break;
      case 2:
        msg.body = CasesReq{h.at("seg_size").get<std::uint64_t>(), iid_set_of(h.at("iids"))};
        break;
      case 3:
        msg.body = EvidenceReq{from_hex(h.at("nonce").get<std::string>())};
        break;
      case 4:
        msg.body = EvidenceRes{enclave::decode_evidence(from_hex(h.at("evidence").get<std::string>()))};
        break;
      case 5:
        msg.body = CasesRes{h.at("segment_index").get<std::uint32_t>(),
                            h.at("segment_count").get<std::uint32_t>(),
                            Bytes(payload.begin(), payload.end())};
        break;
      default:
        throw Error(Errc::kDecode, "unknown message kind " + std::to_string(kind));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kDecode, std::string("message header: ") + e.what());
  }
  return msg;
}

}  // namespace confine::protocol
