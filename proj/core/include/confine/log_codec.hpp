#pragma once

#include <cstdint>

#include "confine/bytes.hpp"
#include "confine/model.hpp"

namespace confine::wire {

// Canonical binary encoding of an EventLog (segments travel in this form).
//
//   "CFSG" | u16 version | u32 event_count | event*
//   event := blob event_id | blob iid | blob activity | i64 timestamp
//            | blob provisioner_id | u32 n_extras | (blob key | blob value)*
//
// All integers are big-endian; blob is a u32 length followed by the bytes.
// Extras are written in key order, so the encoding is a pure function of the
// log.

inline constexpr std::uint16_t kLogCodecVersion = 1;

/// Size of an encoded log with no events.
inline constexpr std::uint64_t kEnvelopeBytes = 4 + 2 + 4;

/// Encoded size of one event.
std::uint64_t event_size(const Event& e) noexcept;

/// Byte length of encode_log(log), computed without encoding. Additive:
/// size_of(A merged B) == size_of(A) + size_of(B) - kEnvelopeBytes.
std::uint64_t size_of(const EventLog& log) noexcept;

Bytes encode_log(const EventLog& log);

/// Throws kDecode on malformed bytes and the EventLog errors on bad content.
EventLog decode_log(ByteView bytes);

}  // namespace confine::wire
