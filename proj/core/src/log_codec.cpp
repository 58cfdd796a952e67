#include "confine/log_codec.hpp"

#include <algorithm>
#include <array>

namespace confine {

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::kDecode, "odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(Errc::kDecode, "invalid hex digit");
  };
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
    out.push_back(static_cast<std::uint8_t>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  return out;
}

namespace wire {
namespace {
constexpr std::array<std::uint8_t, 4> kMagic{'C', 'F', 'S', 'G'};
}

std::uint64_t event_size(const Event& e) noexcept {
  std::uint64_t n = 4 + e.event_id.size() + 4 + e.iid.size() + 4 + e.activity.size() + 8 + 4 +
                    e.provisioner_id.size() + 4;
  for (const auto& [k, v] : e.extras) n += 4 + k.size() + 4 + v.size();
  return n;
}

std::uint64_t size_of(const EventLog& log) noexcept {
  std::uint64_t n = kEnvelopeBytes;
  for (const auto& e : log) n += event_size(e);
  return n;
}

Bytes encode_log(const EventLog& log) {
  Bytes out;
  out.reserve(size_of(log));
  ByteWriter w(out);
  w.raw(ByteView(kMagic));
  w.u16(kLogCodecVersion);
  w.u32(static_cast<std::uint32_t>(log.size()));
  for (const auto& e : log) {
    w.blob(e.event_id);
    w.blob(e.iid);
    w.blob(e.activity);
    w.i64(e.timestamp);
    w.blob(e.provisioner_id);
    w.u32(static_cast<std::uint32_t>(e.extras.size()));
    for (const auto& [k, v] : e.extras) {
      w.blob(k);
      w.blob(v);
    }
  }
  return out;
}

EventLog decode_log(ByteView bytes) {
  ByteReader r(bytes);
  auto magic = r.raw(kMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin()))
    throw Error(Errc::kDecode, "bad segment magic");
  if (const auto version = r.u16(); version != kLogCodecVersion)
    throw Error(Errc::kDecode, "unsupported segment version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  std::vector<Event> events;
  // Each event needs at least 32 bytes; cap the reservation accordingly.
  events.reserve(std::min<std::size_t>(count, r.remaining() / 32));
  for (std::uint32_t i = 0; i < count; ++i) {
    Event e;
    e.event_id = r.string();
    e.iid = r.string();
    e.activity = r.string();
    e.timestamp = r.i64();
    e.provisioner_id = r.string();
    const std::uint32_t n_extras = r.u32();
    for (std::uint32_t j = 0; j < n_extras; ++j) {
      auto key = r.string();
      e.extras.emplace(std::move(key), r.string());
    }
    events.push_back(std::move(e));
  }
  if (!r.done()) throw Error(Errc::kDecode, "trailing bytes after segment");
  return EventLog::from_sorted(std::move(events));
}

}  // namespace wire
}  // namespace confine
