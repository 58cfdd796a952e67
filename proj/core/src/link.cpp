#include "confine/transport/link.hpp"

#include "confine/error.hpp"

namespace confine::transport {

void Link::send(Frame frame) {
  {
    std::lock_guard lock(mu_);
    if (closed_) throw Error(Errc::kLinkClosed, "send on a closed link from " + frame.sender);
    queue_.push_back(std::move(frame));
  }
  cv_.notify_one();
}

std::optional<Frame> Link::try_deliver() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  Frame f = std::move(queue_.front());
  queue_.pop_front();
  return f;
}

Frame Link::deliver() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !queue_.empty() || closed_; });
  if (queue_.empty()) throw Error(Errc::kSessionEnded, "link closed");
  Frame f = std::move(queue_.front());
  queue_.pop_front();
  return f;
}

std::optional<Frame> Link::deliver_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || closed_; })) return std::nullopt;
  if (queue_.empty()) throw Error(Errc::kSessionEnded, "link closed");
  Frame f = std::move(queue_.front());
  queue_.pop_front();
  return f;
}

void Link::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Link::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::size_t Link::size() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

}  // namespace confine::transport
