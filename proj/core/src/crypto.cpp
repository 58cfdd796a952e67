#include "confine/enclave/crypto.hpp"

#include <sodium.h>

#include <mutex>

#include "confine/error.hpp"

namespace confine::enclave {
namespace {

void wipe(Bytes& b) noexcept {
  if (!b.empty()) sodium_memzero(b.data(), b.size());
  b.clear();
}

}  // namespace

void crypto_init() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error(Errc::kInvalidConfig, "libsodium failed to initialize");
  });
}

Bytes random_bytes(std::size_t n) {
  crypto_init();
  Bytes out(n);
  randombytes_buf(out.data(), out.size());
  return out;
}

std::array<std::uint8_t, 32> digest(std::string_view data) {
  crypto_init();
  std::array<std::uint8_t, 32> out{};
  crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(data.data()),
                     data.size(), nullptr, 0);
  return out;
}

Measurement measure(std::string_view build_manifest) { return digest(build_manifest); }

Signer Signer::generate() { return from_seed(random_bytes(kSeedBytes)); }

Signer Signer::from_seed(ByteView seed) {
  crypto_init();
  if (seed.size() != crypto_sign_SEEDBYTES) throw Error(Errc::kInvalidConfig, "seed must be 32 bytes");
  Signer s;
  s.public_key_.resize(crypto_sign_PUBLICKEYBYTES);
  s.secret_key_.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_seed_keypair(s.public_key_.data(), s.secret_key_.data(), seed.data());
  return s;
}

Signer Signer::from_label(std::string_view label) {
  const auto seed = digest(label);
  return from_seed(seed);
}

Signer::Signer(Signer&& o) noexcept
    : public_key_(std::move(o.public_key_)), secret_key_(std::move(o.secret_key_)) {}

Signer& Signer::operator=(Signer&& o) noexcept {
  if (this != &o) {
    wipe(secret_key_);
    public_key_ = std::move(o.public_key_);
    secret_key_ = std::move(o.secret_key_);
  }
  return *this;
}

Signer::~Signer() { wipe(secret_key_); }

Bytes Signer::sign(ByteView message) const {
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key_.data());
  return sig;
}

bool verify_signature(ByteView public_key, ByteView message, ByteView signature) {
  crypto_init();
  if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES)
    return false;
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

Bytes generate_k_sym() {
  crypto_init();
  Bytes k(crypto_aead_xchacha20poly1305_ietf_KEYBYTES);
  crypto_aead_xchacha20poly1305_ietf_keygen(k.data());
  return k;
}

Bytes wrap_key(ByteView k_sym, ByteView k_pub) {
  crypto_init();
  if (k_pub.size() != crypto_box_PUBLICKEYBYTES)
    throw Error(Errc::kInvalidConfig, "k_pub must be 32 bytes");
  Bytes out(k_sym.size() + crypto_box_SEALBYTES);
  crypto_box_seal(out.data(), k_sym.data(), k_sym.size(), k_pub.data());
  return out;
}

SessionKeys SessionKeys::generate() {
  crypto_init();
  SessionKeys k;
  k.k_pub_.resize(crypto_box_PUBLICKEYBYTES);
  k.k_priv_.resize(crypto_box_SECRETKEYBYTES);
  crypto_box_keypair(k.k_pub_.data(), k.k_priv_.data());
  return k;
}

SessionKeys::SessionKeys(SessionKeys&& o) noexcept
    : k_pub_(std::move(o.k_pub_)), k_priv_(std::move(o.k_priv_)) {}

SessionKeys& SessionKeys::operator=(SessionKeys&& o) noexcept {
  if (this != &o) {
    wipe(k_priv_);
    k_pub_ = std::move(o.k_pub_);
    k_priv_ = std::move(o.k_priv_);
  }
  return *this;
}

SessionKeys::~SessionKeys() { wipe(k_priv_); }

Bytes SessionKeys::unwrap(ByteView wrapped) const {
  if (wrapped.size() < crypto_box_SEALBYTES || k_priv_.empty())
    throw Error(Errc::kKeyUnwrapFailure, "wrapped key is malformed");
  Bytes out(wrapped.size() - crypto_box_SEALBYTES);
  if (crypto_box_seal_open(out.data(), wrapped.data(), wrapped.size(), k_pub_.data(),
                           k_priv_.data()) != 0)
    throw Error(Errc::kKeyUnwrapFailure, "wrapped key does not open with this session's key");
  return out;
}

Bytes aead_encrypt(ByteView plaintext, ByteView key) {
  crypto_init();
  if (key.size() != crypto_aead_xchacha20poly1305_ietf_KEYBYTES)
    throw Error(Errc::kInvalidConfig, "symmetric key must be 32 bytes");
  constexpr auto kNonce = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  Bytes out(kNonce + plaintext.size() + crypto_aead_xchacha20poly1305_ietf_ABYTES);
  randombytes_buf(out.data(), kNonce);
  unsigned long long len = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(out.data() + kNonce, &len, plaintext.data(),
                                             plaintext.size(), nullptr, 0, nullptr, out.data(),
                                             key.data());
  out.resize(kNonce + len);
  return out;
}

Bytes aead_decrypt(ByteView sealed, ByteView key) {
  crypto_init();
  constexpr auto kNonce = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
  constexpr auto kTag = crypto_aead_xchacha20poly1305_ietf_ABYTES;
  if (key.size() != crypto_aead_xchacha20poly1305_ietf_KEYBYTES || sealed.size() < kNonce + kTag)
    throw Error(Errc::kAuthFailure, "ciphertext is malformed");
  Bytes out(sealed.size() - kNonce - kTag);
  unsigned long long len = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(out.data(), &len, nullptr, sealed.data() + kNonce,
                                                 sealed.size() - kNonce, nullptr, 0, sealed.data(),
                                                 key.data()) != 0)
    throw Error(Errc::kAuthFailure, "ciphertext failed authentication");
  out.resize(len);
  return out;
}

}  // namespace confine::enclave
