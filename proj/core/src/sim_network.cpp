#include "confine/transport/sim_network.hpp"

#include "confine/error.hpp"

namespace confine::transport {

void SimNetwork::add_party(const OrgId& id, Handler handler) { parties_[id] = std::move(handler); }

void SimNetwork::send(const protocol::Message& msg) {
  if (closed_) throw Error(Errc::kLinkClosed, "network closed");
  if (!parties_.contains(msg.receiver)) throw Error(Errc::kLinkClosed, "no party named " + msg.receiver);
  auto& link = links_[{msg.sender, msg.receiver}];
  Bytes payload = protocol::encode_message(msg);
  const auto kind = protocol::kind_name(msg.body);
  if (tap_) tap_(payload);
  if (!duplicate_kind_.empty() && kind == duplicate_kind_) {
    duplicate_kind_.clear();
    link.send(Frame{msg.sender, payload});
  }
  link.send(Frame{msg.sender, std::move(payload)});
}

void SimNetwork::send_all(const std::vector<protocol::Message>& msgs) {
  for (const auto& m : msgs) send(m);
}

void SimNetwork::force_order(std::vector<std::pair<OrgId, OrgId>> order) {
  forced_ = std::move(order);
  forced_pos_ = 0;
  use_forced_ = true;
}

std::size_t SimNetwork::run(const std::function<void(const Delivery&)>& observer) {
  std::size_t delivered = 0;
  while (true) {
    std::vector<std::pair<OrgId, OrgId>> ready;
    for (const auto& [key, link] : links_) {
      if (link.size() > 0) ready.push_back(key);
    }
    if (ready.empty()) break;

    std::pair<OrgId, OrgId> key;
    if (use_forced_) {
      if (forced_pos_ >= forced_.size())
        throw Error(Errc::kInvalidConfig, "forced order exhausted with messages still queued");
      key = forced_[forced_pos_++];
      if (!links_.contains(key) || links_[key].size() == 0)
        throw Error(Errc::kInvalidConfig, "forced order names empty link " + key.first + "->" + key.second);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
      key = ready[pick(rng_)];
    }

    Frame frame = *links_[key].try_deliver();
    const auto msg = protocol::decode_message(frame.payload);
    Delivery d{transcript_.size(), key.first, key.second, std::string(protocol::kind_name(msg.body)),
               frame.payload.size()};
    transcript_.push_back(d);
    ++delivered;
    send_all(parties_.at(key.second)(msg));
    if (observer) observer(d);
  }
  return delivered;
}

void SimNetwork::close() {
  closed_ = true;
  for (auto& [key, link] : links_) link.close();
}

}  // namespace confine::transport
