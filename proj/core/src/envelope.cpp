#include "confine/enclave/envelope.hpp"

#include "confine/error.hpp"

namespace confine::enclave {
namespace {

Bytes proof_message(const Envelope& env) {
  Bytes msg;
  ByteWriter w(msg);
  w.blob(env.wrapped_key);
  w.blob(env.ciphertext);
  return msg;
}

}  // namespace

Bytes encode_envelope(const Envelope& env) {
  Bytes out;
  ByteWriter w(out);
  w.u16(kEnvelopeVersion);
  w.blob(env.wrapped_key);
  w.blob(env.sender_proof);
  w.blob(env.ciphertext);
  return out;
}

Envelope decode_envelope(ByteView bytes) {
  ByteReader r(bytes);
  if (const auto v = r.u16(); v != kEnvelopeVersion)
    throw Error(Errc::kDecode, "unsupported envelope version " + std::to_string(v));
  Envelope env;
  auto copy = [](ByteView b) { return Bytes(b.begin(), b.end()); };
  env.wrapped_key = copy(r.blob());
  env.sender_proof = copy(r.blob());
  env.ciphertext = copy(r.blob());
  if (!r.done()) throw Error(Errc::kDecode, "trailing bytes after envelope");
  return env;
}

Envelope seal_segment(ByteView plaintext, ByteView k_sym, ByteView k_pub, const Signer& provisioner) {
  Envelope env;
  env.wrapped_key = wrap_key(k_sym, k_pub);
  env.ciphertext = aead_encrypt(plaintext, k_sym);
  env.sender_proof = provisioner.sign(proof_message(env));
  return env;
}

Bytes open_segment(const Envelope& env, const SessionKeys& keys, ByteView expected_provisioner) {
  const Bytes k_sym = keys.unwrap(env.wrapped_key);
  Bytes plaintext = aead_decrypt(env.ciphertext, k_sym);
  if (!verify_signature(expected_provisioner, proof_message(env), env.sender_proof))
    throw Error(Errc::kSenderMismatch, "sender proof does not match the expected provisioner");
  return plaintext;
}

}  // namespace confine::enclave
