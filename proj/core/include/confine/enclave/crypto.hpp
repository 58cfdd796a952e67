#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "confine/bytes.hpp"

namespace confine::enclave {

inline constexpr std::size_t kMeasurementBytes = 32;
inline constexpr std::size_t kSeedBytes = 32;
inline constexpr std::size_t kSymKeyBytes = 32;
inline constexpr std::size_t kBoxPublicKeyBytes = 32;
inline constexpr std::size_t kSignPublicKeyBytes = 32;

using Measurement = std::array<std::uint8_t, kMeasurementBytes>;

/// Initializes the crypto backend once; safe to call from any thread.
void crypto_init();

Bytes random_bytes(std::size_t n);

/// 32-byte digest of an arbitrary string.
std::array<std::uint8_t, 32> digest(std::string_view data);

/// Code identity of a miner build: digest of its canonical manifest.
Measurement measure(std::string_view build_manifest);

/// Ed25519 identity. Used for the simulated hardware root and for
/// provisioner sender proofs.
class Signer {
 public:
  static Signer generate();
  static Signer from_seed(ByteView seed);
  /// Deterministic key for a named party: seed = digest(label).
  static Signer from_label(std::string_view label);

  Signer(const Signer&) = delete;
  Signer& operator=(const Signer&) = delete;
  Signer(Signer&&) noexcept;
  Signer& operator=(Signer&&) noexcept;
  ~Signer();

  const Bytes& public_key() const noexcept { return public_key_; }
  Bytes sign(ByteView message) const;

 private:
  Signer() = default;
  Bytes public_key_;
  Bytes secret_key_;
};

bool verify_signature(ByteView public_key, ByteView message, ByteView signature);

/// Fresh symmetric segment key.
Bytes generate_k_sym();

/// Seals k_sym to the enclave's public key; only the matching private key
/// recovers it.
Bytes wrap_key(ByteView k_sym, ByteView k_pub);

/// Per-session asymmetric pair of the enclave. The private half never leaves
/// this object: there is no accessor and no serialization, and it is wiped on
/// destruction.
class SessionKeys {
 public:
  static SessionKeys generate();

  SessionKeys(const SessionKeys&) = delete;
  SessionKeys& operator=(const SessionKeys&) = delete;
  SessionKeys(SessionKeys&&) noexcept;
  SessionKeys& operator=(SessionKeys&&) noexcept;
  ~SessionKeys();

  const Bytes& k_pub() const noexcept { return k_pub_; }
  /// Throws kKeyUnwrapFailure if `wrapped` was not sealed to k_pub.
  Bytes unwrap(ByteView wrapped) const;

 private:
  SessionKeys() = default;
  Bytes k_pub_;
  Bytes k_priv_;

  friend struct SessionKeysProbe;
};

/// XChaCha20-Poly1305 with a random 24-byte nonce prepended.
Bytes aead_encrypt(ByteView plaintext, ByteView key);
/// Throws kAuthFailure on any tampering.
Bytes aead_decrypt(ByteView sealed, ByteView key);

}  // namespace confine::enclave
