#include <gtest/gtest.h>

#include <thread>

#include "confine/error.hpp"
#include "confine/transport/link.hpp"
#include "confine/transport/sim_network.hpp"
#include "confine/transport/tcp.hpp"

namespace confine::transport {
namespace {

using namespace std::chrono_literals;
using protocol::CasesRefReq;
using protocol::CasesRefRes;
using protocol::Message;

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

TEST(Link, DeliversIdenticalBytes) {
  Link l;
  l.send({"a", Bytes{1, 2, 3}});
  const auto f = l.deliver();
  EXPECT_EQ(f.sender, "a");
  EXPECT_EQ(f.payload, (Bytes{1, 2, 3}));
}

TEST(Link, FifoAcrossThousandSends) {
  Link l;
  std::thread producer([&] {
    for (int i = 0; i < 1000; ++i) l.send({"a", Bytes{static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i >> 8)}});
  });
  for (int i = 0; i < 1000; ++i) {
    const auto f = l.deliver();
    EXPECT_EQ(f.payload[0] | (f.payload[1] << 8), i);
  }
  producer.join();
  EXPECT_EQ(l.size(), 0u);
}

TEST(Link, CloseDrainsThenEnds) {
  Link l;
  l.send({"a", Bytes{9}});
  l.close();
  EXPECT_TRUE(l.closed());
  EXPECT_EQ(code_of([&] { l.send({"a", Bytes{}}); }), Errc::kLinkClosed);
  EXPECT_EQ(l.deliver().payload, Bytes{9});
  EXPECT_EQ(code_of([&] { l.deliver(); }), Errc::kSessionEnded);
}

TEST(Link, TimedDeliveryGivesUp) {
  Link l;
  EXPECT_FALSE(l.deliver_for(20ms).has_value());
  EXPECT_FALSE(l.try_deliver().has_value());
}

// ---- simulated network ------------------------------------------------------

/// Two chatty parties: each incoming CasesRefReq triggers `fanout` replies to
/// the other side until the budget runs out.
struct PingPong {
  SimNetwork net;
  int budget;
  std::multiset<std::string> sent, delivered;

  PingPong(std::uint64_t seed, int budget_) : net(seed), budget(budget_) {
    for (const auto* id : {"x", "y", "z"}) {
      net.add_party(id, [this, self = std::string(id)](const Message& m) {
        delivered.insert(m.sender + ">" + m.receiver + ":" + std::get<CasesRefReq>(m.body).identity_proof);
        std::vector<Message> out;
        for (const auto* peer : {"x", "y", "z"}) {
          if (budget <= 0 || peer == self) continue;
          out.push_back(make(self, peer));
        }
        return out;
      });
    }
  }

  Message make(const std::string& from, const std::string& to) {
    --budget;
    Message m{from, to, "s", CasesRefReq{std::to_string(budget)}};
    sent.insert(from + ">" + to + ":" + std::to_string(budget));
    return m;
  }
};

TEST(SimNetwork, ExactlyOnceDelivery) {
  PingPong pp(4, 200);
  pp.net.send(pp.make("x", "y"));
  pp.net.send(pp.make("y", "z"));
  const auto n = pp.net.run();
  EXPECT_EQ(n, pp.sent.size());
  EXPECT_EQ(pp.delivered, pp.sent);
}

TEST(SimNetwork, SameSeedSameOrder) {
  auto transcript = [](std::uint64_t seed) {
    PingPong pp(seed, 150);
    pp.net.send_all({pp.make("x", "y"), pp.make("y", "z"), pp.make("z", "x")});
    pp.net.run();
    return pp.net.transcript();
  };
  EXPECT_EQ(transcript(8), transcript(8));
  EXPECT_NE(transcript(8), transcript(9));
}

TEST(SimNetwork, ForcedOrderReproducesATranscript) {
  PingPong first(21, 60);
  first.net.send_all({first.make("x", "y"), first.make("y", "z")});
  first.net.run();
  std::vector<std::pair<OrgId, OrgId>> order;
  for (const auto& d : first.net.transcript()) order.emplace_back(d.from, d.to);

  PingPong again(99, 60);
  again.net.force_order(order);
  again.net.send_all({again.make("x", "y"), again.make("y", "z")});
  again.net.run();
  EXPECT_EQ(again.net.transcript(), first.net.transcript());
}

TEST(SimNetwork, ForcedOrderRejectsEmptyLink) {
  PingPong pp(1, 0);
  pp.net.force_order({{"z", "x"}});
  pp.net.send(pp.make("x", "y"));
  EXPECT_EQ(code_of([&] { pp.net.run(); }), Errc::kInvalidConfig);
}

TEST(SimNetwork, DuplicationFaultSurfaces) {
  PingPong pp(2, 1);
  pp.net.duplicate_next("CasesRefReq");
  pp.net.send(pp.make("x", "y"));
  pp.net.run();
  EXPECT_EQ(pp.delivered.size(), pp.sent.size() + 1);
}

TEST(SimNetwork, UnknownReceiverAndClose) {
  SimNetwork net(1);
  net.add_party("a", [](const Message&) { return std::vector<Message>{}; });
  EXPECT_EQ(code_of([&] { net.send({"a", "nobody", "s", CasesRefReq{}}); }), Errc::kLinkClosed);
  net.close();
  EXPECT_EQ(code_of([&] { net.send({"a", "a", "s", CasesRefReq{}}); }), Errc::kLinkClosed);
}

TEST(SimNetwork, TapSeesEveryFrame) {
  PingPong pp(3, 10);
  std::size_t frames = 0;
  pp.net.set_tap([&](const Bytes&) { ++frames; });
  pp.net.send(pp.make("x", "y"));
  pp.net.run();
  EXPECT_EQ(frames, pp.sent.size());
}

// ---- TCP --------------------------------------------------------------------

const std::map<OrgId, std::string> kTokens{{"miner", "tm"}, {"hospital", "th"}};

TEST(Tcp, MessagesFlowBothWays) {
  TcpEndpoint miner("miner", kTokens);
  TcpEndpoint hospital("hospital", kTokens);
  miner.add_peer("hospital", "127.0.0.1", hospital.port());
  hospital.add_peer("miner", "127.0.0.1", miner.port());

  const Message req{"miner", "hospital", "s1", CasesRefReq{"tm"}};
  miner.send(req);
  EXPECT_EQ(hospital.receive(), req);
  const Message res{"hospital", "miner", "s1", CasesRefRes{{"312", "711"}}};
  hospital.send(res);
  const auto got = miner.receive_for(5s);
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(*got, res);
  for (int i = 0; i < 50; ++i) miner.send({"miner", "hospital", "s1", CasesRefReq{std::to_string(i)}});
  for (int i = 0; i < 50; ++i)
    EXPECT_EQ(std::get<CasesRefReq>(hospital.receive().body).identity_proof, std::to_string(i));
  EXPECT_EQ(hospital.rejected_connections(), 0u);
}

TEST(Tcp, WrongTokenIsRejected) {
  TcpEndpoint hospital("hospital", kTokens);
  EXPECT_TRUE(TcpEndpoint::probe_handshake("127.0.0.1", hospital.port(), "miner", "tm"));
  EXPECT_FALSE(TcpEndpoint::probe_handshake("127.0.0.1", hospital.port(), "miner", "wrong"));
  EXPECT_FALSE(TcpEndpoint::probe_handshake("127.0.0.1", hospital.port(), "mallory", "tm"));
  EXPECT_EQ(hospital.rejected_connections(), 2u);
}

TEST(Tcp, SenderFieldMustMatchTheHandshake) {
  TcpEndpoint miner("miner", kTokens);
  TcpEndpoint hospital("hospital", kTokens);
  hospital.add_peer("miner", "127.0.0.1", miner.port());
  hospital.send({"pharma", "miner", "s1", CasesRefRes{{"1"}}});
  EXPECT_FALSE(miner.receive_for(300ms).has_value());
  EXPECT_EQ(miner.rejected_connections(), 1u);
}

TEST(Tcp, PeerWithWrongTokenCannotSend) {
  TcpEndpoint miner("miner", kTokens);
  auto bad_tokens = kTokens;
  bad_tokens["hospital"] = "forged";
  TcpEndpoint impostor("hospital", bad_tokens);
  impostor.add_peer("miner", "127.0.0.1", miner.port());
  EXPECT_EQ(code_of([&] { impostor.send({"hospital", "miner", "s1", CasesRefRes{}}); }), Errc::kHandshakeRejected);
}

TEST(Tcp, CloseEndsReceive) {
  TcpEndpoint miner("miner", kTokens);
  std::thread closer([&] {
    std::this_thread::sleep_for(50ms);
    miner.close();
  });
  EXPECT_EQ(code_of([&] { miner.receive(); }), Errc::kSessionEnded);
  closer.join();
  EXPECT_EQ(code_of([&] { miner.send({"miner", "hospital", "s", CasesRefReq{}}); }), Errc::kLinkClosed);
}

}  // namespace
}  // namespace confine::transport
