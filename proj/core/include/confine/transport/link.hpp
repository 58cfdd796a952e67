#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

#include "confine/bytes.hpp"
#include "confine/model.hpp"

namespace confine::transport {

struct Frame {
  OrgId sender;
  Bytes payload;
};

/// FIFO queue of frames. One thread may send while another delivers.
class Link {
 public:
  /// Throws kLinkClosed once the link is closed.
  void send(Frame frame);
  /// Non-blocking; empty if nothing is queued.
  std::optional<Frame> try_deliver();
  /// Blocks until a frame arrives. Throws kSessionEnded once the link is
  /// closed and drained.
  Frame deliver();
  /// Like deliver() but gives up after `timeout`, returning nothing.
  std::optional<Frame> deliver_for(std::chrono::milliseconds timeout);
  void close();
  bool closed() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Frame> queue_;
  bool closed_ = false;
};

}  // namespace confine::transport
