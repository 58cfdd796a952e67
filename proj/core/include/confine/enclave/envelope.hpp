#pragma once

#include <cstdint>

#include "confine/bytes.hpp"
#include "confine/enclave/crypto.hpp"

namespace confine::enclave {

inline constexpr std::uint16_t kEnvelopeVersion = 1;

/// Sealed segment as it travels from a provisioner to the miner.
///
/// Wire layout (big-endian): u16 version | blob wrapped_key | blob
/// sender_proof | blob ciphertext, where blob = u32 length + bytes and the
/// ciphertext is a 24-byte nonce followed by the AEAD output.
struct Envelope {
  Bytes wrapped_key;
  /// Provisioner signature over wrapped_key || ciphertext.
  Bytes sender_proof;
  Bytes ciphertext;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

Bytes encode_envelope(const Envelope& env);
/// Throws kDecode on a malformed or wrongly versioned envelope.
Envelope decode_envelope(ByteView bytes);

Envelope seal_segment(ByteView plaintext, ByteView k_sym, ByteView k_pub, const Signer& provisioner);

/// Unwraps k_sym (kKeyUnwrapFailure), decrypts (kAuthFailure), then checks
/// the sender proof against the expected provisioner key (kSenderMismatch).
Bytes open_segment(const Envelope& env, const SessionKeys& keys, ByteView expected_provisioner);

}  // namespace confine::enclave
