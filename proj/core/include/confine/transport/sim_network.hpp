#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "confine/protocol/messages.hpp"
#include "confine/transport/link.hpp"

namespace confine::transport {

/// One delivered message, as recorded in the transcript.
struct Delivery {
  std::size_t step = 0;
  OrgId from;
  OrgId to;
  std::string kind;
  std::size_t bytes = 0;

  friend bool operator==(const Delivery&, const Delivery&) = default;
};

using Handler = std::function<std::vector<protocol::Message>(const protocol::Message&)>;

/// In-process network of per-pair FIFO links. At every step a seeded
/// scheduler picks one nonempty link at random and delivers its head, so the
/// global interleaving varies with the seed while each link stays FIFO.
class SimNetwork {
 public:
  explicit SimNetwork(std::uint64_t seed) : rng_(seed) {}

  void add_party(const OrgId& id, Handler handler);

  /// Encodes and enqueues `msg` on the (sender, receiver) link. Throws
  /// kLinkClosed for an unknown receiver or after close().
  void send(const protocol::Message& msg);
  void send_all(const std::vector<protocol::Message>& msgs);

  /// Delivers until every link is empty and returns the number of
  /// deliveries. `observer` runs after each handler returns.
  std::size_t run(const std::function<void(const Delivery&)>& observer = {});

  /// Replaces the random scheduler by a fixed sequence of (from, to) links,
  /// e.g. taken from an earlier transcript. Throws kInvalidConfig if the
  /// sequence asks for an empty link.
  void force_order(std::vector<std::pair<OrgId, OrgId>> order);

  /// Test-only fault: the next message of this kind is enqueued twice,
  /// breaking the no-duplication guarantee.
  void duplicate_next(std::string kind) { duplicate_kind_ = std::move(kind); }

  /// Sees every encoded frame as it is enqueued.
  void set_tap(std::function<void(const Bytes&)> tap) { tap_ = std::move(tap); }

  void close();

  const std::vector<Delivery>& transcript() const noexcept { return transcript_; }

 private:
  std::mt19937_64 rng_;
  std::map<OrgId, Handler> parties_;
  std::map<std::pair<OrgId, OrgId>, Link> links_;
  std::vector<Delivery> transcript_;
  std::vector<std::pair<OrgId, OrgId>> forced_;
  std::size_t forced_pos_ = 0;
  bool use_forced_ = false;
  std::string duplicate_kind_;
  std::function<void(const Bytes&)> tap_;
  bool closed_ = false;
};

}  // namespace confine::transport
