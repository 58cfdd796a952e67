#include <gtest/gtest.h>

#include "confine/enclave/accountant.hpp"
#include "confine/enclave/attestation.hpp"
#include "confine/enclave/crypto.hpp"
#include "confine/enclave/envelope.hpp"
#include "confine/error.hpp"
#include "support/probes.hpp"

namespace confine::enclave {

namespace {

template <typename F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no confine::Error thrown";
  return Errc::kInvalidConfig;
}

const Bytes kPayload = [] {
  Bytes b;
  for (int i = 0; i < 300; ++i) b.push_back(static_cast<std::uint8_t>(i * 7));
  return b;
}();

TEST(Crypto, SessionKeysAreFresh) {
  const auto a = SessionKeys::generate();
  const auto b = SessionKeys::generate();
  EXPECT_EQ(a.k_pub().size(), kBoxPublicKeyBytes);
  EXPECT_NE(a.k_pub(), b.k_pub());
  EXPECT_NE(SessionKeysProbe::k_priv(a), SessionKeysProbe::k_priv(b));
}

TEST(Crypto, WrapUnwrapRoundTrip) {
  const auto keys = SessionKeys::generate();
  const auto k_sym = generate_k_sym();
  EXPECT_EQ(k_sym.size(), kSymKeyBytes);
  EXPECT_EQ(keys.unwrap(wrap_key(k_sym, keys.k_pub())), k_sym);
}

TEST(Crypto, UnwrapWithOtherKeyFails) {
  const auto keys = SessionKeys::generate();
  const auto other = SessionKeys::generate();
  const auto wrapped = wrap_key(generate_k_sym(), keys.k_pub());
  EXPECT_EQ(code_of([&] { other.unwrap(wrapped); }), Errc::kKeyUnwrapFailure);
  EXPECT_EQ(code_of([&] { keys.unwrap(Bytes(5, 0)); }), Errc::kKeyUnwrapFailure);
}

TEST(Crypto, MovedFromKeysCannotUnwrap) {
  auto keys = SessionKeys::generate();
  const auto wrapped = wrap_key(generate_k_sym(), keys.k_pub());
  SessionKeys moved = std::move(keys);
  EXPECT_NO_THROW(moved.unwrap(wrapped));
  EXPECT_EQ(code_of([&] { keys.unwrap(wrapped); }), Errc::kKeyUnwrapFailure);  // NOLINT(bugprone-use-after-move)
}

TEST(Crypto, AeadRoundTripAndTamper) {
  const auto key = generate_k_sym();
  auto sealed = aead_encrypt(kPayload, key);
  EXPECT_EQ(aead_decrypt(sealed, key), kPayload);
  EXPECT_NE(aead_encrypt(kPayload, key), sealed);  // fresh nonce
  sealed[30] ^= 1;
  EXPECT_EQ(code_of([&] { aead_decrypt(sealed, key); }), Errc::kAuthFailure);
  EXPECT_EQ(code_of([&] { aead_decrypt(Bytes(10, 0), key); }), Errc::kAuthFailure);
}

TEST(Crypto, SignerDeterminismAndVerification) {
  const auto a = Signer::from_label("org-a");
  const auto a2 = Signer::from_label("org-a");
  const auto b = Signer::from_label("org-b");
  EXPECT_EQ(a.public_key(), a2.public_key());
  EXPECT_NE(a.public_key(), b.public_key());
  const auto sig = a.sign(kPayload);
  EXPECT_TRUE(verify_signature(a.public_key(), kPayload, sig));
  EXPECT_FALSE(verify_signature(b.public_key(), kPayload, sig));
  EXPECT_FALSE(verify_signature(a.public_key(), kPayload, Bytes(3, 0)));
  EXPECT_NE(Signer::generate().public_key(), Signer::generate().public_key());
}

TEST(Crypto, MeasurementDependsOnManifest) {
  EXPECT_EQ(measure(miner_build_manifest("heuristics")), measure(miner_build_manifest("heuristics")));
  EXPECT_NE(measure(miner_build_manifest("heuristics")), measure(miner_build_manifest("declare")));
}

// ---- envelope ---------------------------------------------------------------

struct EnvelopeFixture : ::testing::Test {
  SessionKeys keys = SessionKeys::generate();
  Signer prov = Signer::from_label("hospital");
  Bytes k_sym = generate_k_sym();
  Envelope env = seal_segment(kPayload, k_sym, keys.k_pub(), prov);
};

TEST_F(EnvelopeFixture, SealOpenRoundTrip) {
  EXPECT_EQ(open_segment(env, keys, prov.public_key()), kPayload);
  EXPECT_EQ(decode_envelope(encode_envelope(env)), env);
}

TEST_F(EnvelopeFixture, TamperedCiphertextFailsAuthentication) {
  env.ciphertext[40] ^= 0x80;
  EXPECT_EQ(code_of([&] { open_segment(env, keys, prov.public_key()); }), Errc::kAuthFailure);
}

TEST_F(EnvelopeFixture, WrongPrivateKeyFailsUnwrap) {
  const auto other = SessionKeys::generate();
  EXPECT_EQ(code_of([&] { open_segment(env, other, prov.public_key()); }), Errc::kKeyUnwrapFailure);
}

TEST_F(EnvelopeFixture, WrongSenderIsDetected) {
  const auto other = Signer::from_label("pharma");
  EXPECT_EQ(code_of([&] { open_segment(env, keys, other.public_key()); }), Errc::kSenderMismatch);
  // Re-signing with another key is caught the same way.
  env.sender_proof = other.sign(kPayload);
  EXPECT_EQ(code_of([&] { open_segment(env, keys, prov.public_key()); }), Errc::kSenderMismatch);
}

TEST_F(EnvelopeFixture, MalformedEnvelopesRejected) {
  auto bytes = encode_envelope(env);
  Bytes truncated(bytes.begin(), bytes.end() - 1);
  EXPECT_EQ(code_of([&] { decode_envelope(truncated); }), Errc::kDecode);
  bytes[1] = 9;
  EXPECT_EQ(code_of([&] { decode_envelope(bytes); }), Errc::kDecode);
}

// ---- attestation ------------------------------------------------------------

struct AttestationFixture : ::testing::Test {
  Measurement reference = measure(miner_build_manifest("heuristics"));
  SessionKeys keys = SessionKeys::generate();
  Bytes nonce = random_bytes(16);
  std::set<std::string> allowed{"miner-org"};
  AttestationEvidence ev = build_evidence(reference, "miner-org", keys.k_pub(), nonce);

  TrustDecision verify(const AttestationEvidence& e) const { return verify_evidence(e, reference, allowed, nonce); }
  static std::optional<RejectReason> reason(const TrustDecision& d) {
    if (const auto* r = std::get_if<Rejected>(&d)) return r->reason;
    return std::nullopt;
  }
};

TEST_F(AttestationFixture, WellFormedEvidenceIsTrustedAndCarriesKpub) {
  const auto d = verify(ev);
  ASSERT_TRUE(std::holds_alternative<Trusted>(d));
  EXPECT_EQ(std::get<Trusted>(d).k_pub, keys.k_pub());
  EXPECT_EQ(decode_evidence(encode_evidence(ev)), ev);
  EXPECT_TRUE(std::holds_alternative<Trusted>(verify(decode_evidence(encode_evidence(ev)))));
}

TEST_F(AttestationFixture, FlippedMeasurementByte) {
  ev.measurement[0] ^= 1;
  EXPECT_EQ(reason(verify(ev)), RejectReason::kMeasurementMismatch);
}

TEST_F(AttestationFixture, HonestlySignedWrongBuild) {
  const auto other = build_evidence(measure(miner_build_manifest("declare")), "miner-org", keys.k_pub(), nonce);
  EXPECT_EQ(reason(verify(other)), RejectReason::kMeasurementMismatch);
}

TEST_F(AttestationFixture, WrongRoot) {
  const auto rogue = Signer::from_label("rogue root");
  const auto forged = build_evidence(reference, "miner-org", keys.k_pub(), nonce, rogue);
  EXPECT_EQ(reason(verify(forged)), RejectReason::kSignatureInvalid);
}

TEST_F(AttestationFixture, SwappedKeyBreaksSignature) {
  ev.custom.k_pub = SessionKeys::generate().k_pub();
  EXPECT_EQ(reason(verify(ev)), RejectReason::kSignatureInvalid);
}

TEST_F(AttestationFixture, MalformedKey) {
  const auto bad = build_evidence(reference, "miner-org", Bytes(7, 1), nonce);
  EXPECT_EQ(reason(verify(bad)), RejectReason::kMalformedKey);
}

TEST_F(AttestationFixture, StaleNonce) {
  const auto replayed = build_evidence(reference, "miner-org", keys.k_pub(), random_bytes(16));
  EXPECT_EQ(reason(verify(replayed)), RejectReason::kNonceMismatch);
}

TEST_F(AttestationFixture, UnknownOrganization) {
  const auto stranger = build_evidence(reference, "stranger", keys.k_pub(), nonce);
  EXPECT_EQ(reason(verify(stranger)), RejectReason::kOrgNotAuthorized);
}

TEST_F(AttestationFixture, MeasurementIsCheckedFirst) {
  const auto rogue = Signer::from_label("rogue root");
  auto both = build_evidence(reference, "stranger", keys.k_pub(), nonce, rogue);
  both.measurement[5] ^= 1;
  EXPECT_EQ(reason(verify(both)), RejectReason::kMeasurementMismatch);
}

TEST_F(AttestationFixture, DecodeRejectsGarbage) {
  auto bytes = encode_evidence(ev);
  bytes.resize(bytes.size() - 2);
  EXPECT_EQ(code_of([&] { decode_evidence(bytes); }), Errc::kDecode);
}

// ---- accountant -------------------------------------------------------------

TEST(Accountant, TracksCurrentAndPeak) {
  EnclaveAccountant a;
  a.account(100);
  a.account(-100);
  EXPECT_EQ(a.current(), 0u);
  EXPECT_EQ(a.peak(), 100u);
  a.account(40);
  EXPECT_EQ(a.peak(), 100u);
}

TEST(Accountant, CapacityExceededLeavesStateUnchanged) {
  EnclaveAccountant a(50);
  EXPECT_EQ(code_of([&] { a.account(60); }), Errc::kCapacityExceeded);
  EXPECT_EQ(a.current(), 0u);
  EXPECT_EQ(a.peak(), 0u);
  a.account(50);
  EXPECT_EQ(a.current(), 50u);
}

TEST(Accountant, UnderflowIsABug) {
  EnclaveAccountant a;
  a.account(10);
  EXPECT_EQ(code_of([&] { a.account(-11); }), Errc::kUnderflowBug);
  EXPECT_EQ(a.current(), 10u);
}

}  // namespace
}  // namespace confine::enclave
