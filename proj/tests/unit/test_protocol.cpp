#include <gtest/gtest.h>

#include <algorithm>
#include <memory>

#include "confine/enclave/attestation.hpp"
#include "confine/enclave/envelope.hpp"
#include "confine/error.hpp"
#include "confine/log_codec.hpp"
#include "confine/protocol/log_processor.hpp"
#include "confine/protocol/messages.hpp"
#include "confine/protocol/provisioner.hpp"
#include "confine/protocol/secure_miner.hpp"
#include "confine/transport/sim_network.hpp"
#include "support/fixtures.hpp"
#include "support/probes.hpp"

namespace confine::protocol {

struct SecureMinerProbe {
  static const enclave::SessionKeys& keys(const SecureMiner& m) { return m.keys_; }
};

namespace {

using confine::testing::motivating_partitions;
using confine::testing::RandomLogGen;
using confine::testing::sorted_union;

const enclave::Measurement& reference() {
  static const auto m = enclave::measure(enclave::miner_build_manifest("heuristics"));
  return m;
}

/// Miner plus provisioners wired over a simulated network.
struct Harness {
  std::map<OrgId, LogPartition> parts;
  std::vector<std::unique_ptr<Provisioner>> provs;
  std::unique_ptr<SecureMiner> miner;
  transport::SimNetwork net;
  std::string audit_failure;

  Harness(std::map<OrgId, LogPartition> partitions, LogProcessor& sink, std::uint64_t seed = 1,
          std::uint64_t seg_size = 100'000, bool yield_cases = true,
          std::optional<enclave::Measurement> measurement = std::nullopt)
      : parts(std::move(partitions)), net(seed) {
    MinerConfig mc;
    mc.seg_size = seg_size;
    mc.do_yield_cases = yield_cases;
    mc.measurement = measurement.value_or(reference());
    for (const auto& [org, p] : parts) {
      ProvisionerConfig pc;
      pc.id = org;
      pc.partition = p;
      pc.allowed_miners = {"miner"};
      pc.allowed_orgs = {"miner"};
      pc.reference = reference();
      provs.push_back(std::make_unique<Provisioner>(std::move(pc), enclave::Signer::from_label("prov " + org)));
      mc.provisioners.push_back(org);
      mc.provisioner_keys[org] = provs.back()->public_key();
    }
    miner = std::make_unique<SecureMiner>(mc, sink);
    net.add_party("miner", [this](const Message& m) {
      auto out = miner->on_message(m);
      if (std::string why; !miner->audit(&why) && audit_failure.empty()) audit_failure = why;
      return out;
    });
    for (auto& p : provs) {
      net.add_party(p->id(), [q = p.get()](const Message& m) { return q->on_message(m); });
    }
  }

  void run() {
    net.send_all(miner->start());
    net.run();
  }

  Provisioner& prov(const OrgId& id) {
    for (auto& p : provs) {
      if (p->id() == id) return *p;
    }
    throw std::runtime_error("no provisioner " + id);
  }
};

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

// ---- messages ---------------------------------------------------------------

TEST(Messages, EveryKindRoundTrips) {
  const auto keys = enclave::SessionKeys::generate();
  const auto ev = enclave::build_evidence(reference(), "miner", keys.k_pub(), Bytes(16, 3));
  const std::vector<Body> bodies{CasesRefReq{"token"},
                                 CasesRefRes{{"312", "711"}},
                                 CasesReq{1000, {"312"}},
                                 EvidenceReq{Bytes(16, 9)},
                                 EvidenceRes{ev},
                                 CasesRes{1, 3, Bytes{1, 2, 3, 250}}};
  for (const auto& b : bodies) {
    const Message m{"miner", "hospital", "s1", b};
    EXPECT_EQ(decode_message(encode_message(m)), m) << kind_name(b);
  }
}

TEST(Messages, CasesResCarriesEnvelopeAsBinaryPayload) {
  const Bytes env(5000, 0x5a);
  const auto bytes = encode_message({"h", "miner", "s", CasesRes{0, 1, env}});
  EXPECT_LT(bytes.size(), env.size() + 200);
}

TEST(Messages, DecodeRejectsMalformedFrames) {
  auto bytes = encode_message({"miner", "h", "s1", CasesRefReq{"x"}});
  for (auto mutate : std::vector<std::function<void(Bytes&)>>{
           [](Bytes& b) { b.resize(b.size() - 1); }, [](Bytes& b) { b[1] = 42; }, [](Bytes& b) { b[2] = 99; },
           [](Bytes& b) { b[8] = '!'; }}) {
    auto copy = bytes;
    mutate(copy);
    EXPECT_EQ(code_of([&] { decode_message(copy); }), Errc::kDecode);
  }
}

// ---- miner state machine ----------------------------------------------------

MinerConfig miner_cfg(std::vector<OrgId> provs) {
  MinerConfig c;
  c.provisioners = std::move(provs);
  return c;
}

TEST(Miner, StartSendsOneRequestPerProvisioner) {
  CollectingProcessor sink;
  for (std::size_t n : {1u, 3u, 7u}) {
    std::vector<OrgId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
    SecureMiner m(miner_cfg(ids), sink);
    const auto out = m.start();
    ASSERT_EQ(out.size(), n);
    std::set<OrgId> receivers;
    for (const auto& msg : out) {
      EXPECT_TRUE(std::holds_alternative<CasesRefReq>(msg.body));
      receivers.insert(msg.receiver);
    }
    EXPECT_EQ(receivers.size(), n);
  }
  EXPECT_EQ(code_of([&] { SecureMiner m(miner_cfg({}), sink); }), Errc::kNoProvisioners);
}

TEST(Miner, BuildsCaseIndexFromMotivatingReferences) {
  CollectingProcessor sink;
  SecureMiner m(miner_cfg({"clinic", "hospital", "pharma"}), sink);
  m.start();
  EXPECT_TRUE(m.on_message({"hospital", "miner", "s1", CasesRefRes{{"312", "711"}}}).empty());
  EXPECT_TRUE(m.on_message({"pharma", "miner", "s1", CasesRefRes{{"312", "711"}}}).empty());
  const auto out = m.on_message({"clinic", "miner", "s1", CasesRefRes{{"312"}}});
  EXPECT_EQ(m.cid_map().at("312"), (std::set<OrgId>{"clinic", "hospital", "pharma"}));
  EXPECT_EQ(m.cid_map().at("711"), (std::set<OrgId>{"hospital", "pharma"}));
  ASSERT_EQ(out.size(), 3u);
  for (const auto& msg : out) {
    const auto& req = std::get<CasesReq>(msg.body);
    EXPECT_EQ(req.iids, m.pmap().at(msg.receiver));
  }
  EXPECT_EQ(m.phase(), Phase::kAttestation);
  EXPECT_TRUE(m.audit());
}

TEST(Miner, FanOutOnlyAfterLastResponseInAnyOrder) {
  std::vector<OrgId> ids{"a", "b", "c", "d"};
  std::sort(ids.begin(), ids.end());
  do {
    CollectingProcessor sink;
    SecureMiner m(miner_cfg({"a", "b", "c", "d"}), sink);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto out = m.on_message({ids[i], "miner", "s1", CasesRefRes{{"x" + ids[i]}}});
      EXPECT_EQ(out.size(), i + 1 == ids.size() ? 4u : 0u);
    }
  } while (std::next_permutation(ids.begin(), ids.end()));
}

TEST(Miner, EmptySingleProvisionerFansOutImmediately) {
  CollectingProcessor sink;
  SecureMiner m(miner_cfg({"solo"}), sink);
  const auto out = m.on_message({"solo", "miner", "s1", CasesRefRes{}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(std::get<CasesReq>(out[0].body).iids.empty());
  EXPECT_TRUE(m.done());
}

TEST(Miner, RejectsProtocolViolationsAndAborts) {
  CollectingProcessor sink;
  SecureMiner m(miner_cfg({"a", "b"}), sink);
  EXPECT_EQ(code_of([&] { m.on_message({"z", "miner", "s1", CasesRefRes{}}); }), Errc::kUnknownProvisioner);
  EXPECT_TRUE(m.aborted());
  EXPECT_EQ(code_of([&] { m.on_message({"a", "miner", "s1", CasesRefRes{}}); }), Errc::kSessionEnded);

  SecureMiner dup(miner_cfg({"a", "b"}), sink);
  dup.on_message({"a", "miner", "s1", CasesRefRes{}});
  EXPECT_EQ(code_of([&] { dup.on_message({"a", "miner", "s1", CasesRefRes{}}); }), Errc::kDuplicateResponse);

  SecureMiner early(miner_cfg({"a"}), sink);
  EXPECT_EQ(code_of([&] { early.on_message({"a", "miner", "s1", EvidenceReq{Bytes(16)}}); }),
            Errc::kPhaseViolation);

  SecureMiner unattested(miner_cfg({"a"}), sink);
  unattested.on_message({"a", "miner", "s1", CasesRefRes{{"1"}}});
  EXPECT_EQ(code_of([&] { unattested.on_message({"a", "miner", "s1", CasesRes{0, 1, {}}}); }),
            Errc::kPhaseViolation);

  SecureMiner wrong_session(miner_cfg({"a"}), sink);
  EXPECT_EQ(code_of([&] { wrong_session.on_message({"a", "miner", "other", CasesRefRes{}}); }),
            Errc::kPhaseViolation);
}

TEST(Miner, FinishReportsTruncatedStream) {
  CollectingProcessor sink;
  SecureMiner m(miner_cfg({"a"}), sink);
  m.on_message({"a", "miner", "s1", CasesRefRes{{"1", "2"}}});
  try {
    m.finish();
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTruncatedStream);
    EXPECT_NE(std::string(e.what()).find("2 cases pending"), std::string::npos);
  }
}

// ---- provisioner state machine ----------------------------------------------

ProvisionerConfig pharma_cfg() {
  ProvisionerConfig pc;
  pc.id = "pharma";
  pc.partition = motivating_partitions().at("pharma");
  pc.allowed_miners = {"miner"};
  pc.allowed_orgs = {"miner"};
  pc.reference = reference();
  return pc;
}

std::vector<Message> attest(Provisioner& p, std::uint64_t seg_size, const enclave::Measurement& m,
                            const enclave::SessionKeys& keys, std::set<CaseId> iids = {"312", "711"}) {
  auto out = p.on_message({"miner", "pharma", "s1", CasesReq{seg_size, std::move(iids)}});
  const auto& nonce = std::get<EvidenceReq>(out.at(0).body).nonce;
  EXPECT_EQ(p.status(), ProvisionerStatus::kAwaitingEvidence);
  return p.on_message({"miner", "pharma", "s1", EvidenceRes{enclave::build_evidence(m, "miner", keys.k_pub(), nonce)}});
}

TEST(Provisioner, AnswersReferencesAndIgnoresStrangers) {
  Provisioner p(pharma_cfg(), enclave::Signer::from_label("pharma"));
  const auto out = p.on_message({"miner", "pharma", "s1", CasesRefReq{"miner"}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(std::get<CasesRefRes>(out[0].body).iids, (std::set<CaseId>{"312", "711"}));
  EXPECT_TRUE(p.on_message({"eve", "pharma", "s1", CasesRefReq{"eve"}}).empty());
}

TEST(Provisioner, TrustedMinerWithLargeBudgetGetsOneSegment) {
  Provisioner p(pharma_cfg(), enclave::Signer::from_label("pharma"));
  const auto keys = enclave::SessionKeys::generate();
  const auto out = attest(p, 1'000'000, reference(), keys);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(p.status(), ProvisionerStatus::kStreamed);
  const auto env = enclave::decode_envelope(std::get<CasesRes>(out[0].body).envelope);
  EXPECT_EQ(wire::decode_log(enclave::open_segment(env, keys, p.public_key())), pharma_cfg().partition);
}

TEST(Provisioner, StreamsThePlanInOrder) {
  Provisioner p(pharma_cfg(), enclave::Signer::from_label("pharma"));
  const auto keys = enclave::SessionKeys::generate();
  const auto out = attest(p, 150, reference(), keys);
  ASSERT_TRUE(p.plan());
  ASSERT_EQ(out.size(), p.plan()->segments.size());
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& res = std::get<CasesRes>(out[i].body);
    EXPECT_EQ(res.segment_index, i);
    EXPECT_EQ(res.segment_count, out.size());
    const auto plain = enclave::open_segment(enclave::decode_envelope(res.envelope), keys, p.public_key());
    EXPECT_EQ(wire::decode_log(plain), p.plan()->segments[i]);
  }
  EXPECT_EQ(p.k_sym_fingerprints().size(), 2u);
  EXPECT_NE(p.k_sym_fingerprints()[0], p.k_sym_fingerprints()[1]);
}

TEST(Provisioner, MeasurementMismatchSendsNothing) {
  Provisioner p(pharma_cfg(), enclave::Signer::from_label("pharma"));
  const auto keys = enclave::SessionKeys::generate();
  const auto out = attest(p, 1'000'000, enclave::measure("tampered build"), keys);
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(p.status(), ProvisionerStatus::kRejected);
  EXPECT_EQ(p.rejection(), enclave::RejectReason::kMeasurementMismatch);
  EXPECT_EQ(p.cases_res_sent(), 0u);
}

TEST(Provisioner, UnsolicitedEvidenceIsAViolation) {
  Provisioner p(pharma_cfg(), enclave::Signer::from_label("pharma"));
  const auto keys = enclave::SessionKeys::generate();
  const auto ev = enclave::build_evidence(reference(), "miner", keys.k_pub(), Bytes(16));
  EXPECT_EQ(code_of([&] { p.on_message({"miner", "pharma", "s1", EvidenceRes{ev}}); }), Errc::kPhaseViolation);
}

// ---- full sessions ----------------------------------------------------------

TEST(Session, MotivatingCase312YieldsAfterAllThreeDeliver) {
  CollectingProcessor sink;
  Harness h(motivating_partitions(), sink, 3);
  h.run();
  EXPECT_TRUE(h.audit_failure.empty()) << h.audit_failure;
  ASSERT_TRUE(h.miner->done());
  EXPECT_TRUE(h.miner->cid_map().empty());
  ASSERT_EQ(sink.cases().size(), 2u);
  const auto& c312 = sink.cases()[0].size() == 18 ? sink.cases()[0] : sink.cases()[1];
  EXPECT_EQ(c312.size(), 18u);
  EXPECT_EQ(c312[0].iid, "312");
  EXPECT_EQ(h.miner->phase(), Phase::kComputation);
  EXPECT_EQ(h.miner->accountant().current(), 0u);
}

TEST(Session, PhasesAdvanceInOrder) {
  CollectingProcessor sink;
  Harness h(motivating_partitions(), sink, 5);
  std::vector<Phase> seen{h.miner->phase()};
  h.net.send_all(h.miner->start());
  h.net.run([&](const transport::Delivery&) {
    if (h.miner->phase() != seen.back()) seen.push_back(h.miner->phase());
  });
  EXPECT_EQ(seen, (std::vector<Phase>{Phase::kInitialization, Phase::kAttestation, Phase::kTransmission,
                                      Phase::kComputation}));
}

TEST(Session, NonIncrementalYieldsOnce) {
  CollectingProcessor sink;
  Harness h(motivating_partitions(), sink, 1, 100'000, false);
  h.run();
  ASSERT_TRUE(h.miner->done());
  EXPECT_EQ(h.miner->yields(), 1u);
  ASSERT_EQ(sink.logs().size(), 1u);
  std::vector<EventLog> parts;
  for (const auto& [o, p] : h.parts) parts.push_back(p);
  EXPECT_EQ(sink.logs()[0].events(), sorted_union(parts));
}

TEST(Session, InjectedDuplicateSegmentAborts) {
  CollectingProcessor sink;
  Harness h(motivating_partitions(), sink, 2);
  h.net.duplicate_next("CasesRes");
  h.net.send_all(h.miner->start());
  EXPECT_EQ(code_of([&] { h.net.run(); }), Errc::kUnexpectedIid);
  EXPECT_TRUE(h.miner->aborted());
}

TEST(Session, WrongMeasurementStallsWithoutData) {
  CollectingProcessor sink;
  Harness h(motivating_partitions(), sink, 1, 100'000, true, enclave::measure("other build"));
  h.run();
  EXPECT_FALSE(h.miner->done());
  for (auto& p : h.provs) {
    EXPECT_EQ(p->status(), ProvisionerStatus::kRejected);
    EXPECT_EQ(p->cases_res_sent(), 0u);
  }
  EXPECT_TRUE(sink.cases().empty());
  EXPECT_EQ(code_of([&] { h.miner->finish(); }), Errc::kTruncatedStream);
}

TEST(Session, CapacityLimitAbortsTheSession) {
  CollectingProcessor sink;
  MinerConfig mc;
  auto parts = motivating_partitions();
  Harness h(parts, sink);
  // Rebuild the miner with a tiny capacity.
  MinerConfig small;
  small.capacity = 64;
  small.measurement = reference();
  for (auto& p : h.provs) {
    small.provisioners.push_back(p->id());
    small.provisioner_keys[p->id()] = p->public_key();
  }
  h.miner = std::make_unique<SecureMiner>(small, sink);
  h.net.send_all(h.miner->start());
  EXPECT_EQ(code_of([&] { h.net.run(); }), Errc::kCapacityExceeded);
}

bool contains(const Bytes& hay, const Bytes& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

TEST(Session, PrivateKeyNeverAppearsOnTheWire) {
  CollectingProcessor sink;
  Harness h(motivating_partitions(), sink, 4, 200);
  std::vector<Bytes> frames;
  h.net.set_tap([&](const Bytes& b) { frames.push_back(b); });
  h.run();
  ASSERT_TRUE(h.miner->done());
  const Bytes k_priv = enclave::SessionKeysProbe::k_priv(SecureMinerProbe::keys(*h.miner));
  ASSERT_EQ(k_priv.size(), 32u);
  const auto hex = to_hex(k_priv);
  const Bytes hex_bytes(hex.begin(), hex.end());
  ASSERT_GT(frames.size(), 10u);
  bool saw_k_pub = false;
  for (const auto& f : frames) {
    EXPECT_FALSE(contains(f, k_priv));
    EXPECT_FALSE(contains(f, hex_bytes));
    const auto pub_hex = to_hex(h.miner->k_pub());
    saw_k_pub |= contains(f, Bytes(pub_hex.begin(), pub_hex.end()));
  }
  EXPECT_TRUE(saw_k_pub);  // the search itself works
}

TEST(Session, RandomPartitionsYieldTheSortedUnion) {
  RandomLogGen gen(77);
  for (int round = 0; round < 25; ++round) {
    std::map<OrgId, LogPartition> parts;
    const auto n = gen.uniform(1, 4);
    for (std::size_t i = 0; i < n; ++i) {
      const auto org = "org" + std::to_string(i);
      parts[org] = gen.log(org, gen.uniform(0, 40), 10, 50);
    }
    for (const bool yield_cases : {true, false}) {
      CollectingProcessor sink;
      Harness h(parts, sink, round, gen.uniform(40, 3000), yield_cases);
      h.run();
      ASSERT_TRUE(h.miner->done()) << "round " << round;
      EXPECT_TRUE(h.audit_failure.empty()) << h.audit_failure;
      std::vector<EventLog> all;
      for (const auto& [o, p] : parts) all.push_back(p);
      EXPECT_EQ(sink.collected().events(), sorted_union(all)) << "round " << round;
      EXPECT_EQ(h.miner->accountant().current(), 0u);
    }
  }
}

}  // namespace
}  // namespace confine::protocol
