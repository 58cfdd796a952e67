#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "confine/error.hpp"
#include "confine/transport/tcp.hpp"
#include "json.hpp"

namespace confine::transport {
namespace {

constexpr std::uint32_t kMaxFrame = 1u << 30;

[[noreturn]] void io_error(const std::string& what) {
  throw Error(Errc::kIo, what + ": " + std::strerror(errno));
}

bool write_all(int fd, const std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const auto k = ::send(fd, data, n, MSG_NOSIGNAL);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) return false;
    data += k;
    n -= static_cast<std::size_t>(k);
  }
  return true;
}

bool read_exact(int fd, std::uint8_t* data, std::size_t n) {
  while (n > 0) {
    const auto k = ::recv(fd, data, n, 0);
    if (k < 0 && errno == EINTR) continue;
    if (k <= 0) return false;
    data += k;
    n -= static_cast<std::size_t>(k);
  }
  return true;
}

bool write_frame(int fd, ByteView payload) {
  Bytes out;
  ByteWriter w(out);
  w.u32(static_cast<std::uint32_t>(payload.size() + 2));
  w.u16(kTcpFrameVersion);
  w.raw(payload);
  return write_all(fd, out.data(), out.size());
}

std::optional<Bytes> read_frame(int fd) {
  std::uint8_t head[4];
  if (!read_exact(fd, head, 4)) return std::nullopt;
  ByteReader hr(ByteView(head, 4));
  const auto len = hr.u32();
  if (len < 2 || len > kMaxFrame) return std::nullopt;
  Bytes body(len);
  if (!read_exact(fd, body.data(), body.size())) return std::nullopt;
  ByteReader br(body);
  if (br.u16() != kTcpFrameVersion) return std::nullopt;
  return Bytes(body.begin() + 2, body.end());
}

bool same_token(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  return diff == 0;
}

int dial(const std::string& host, std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) io_error("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw Error(Errc::kIo, "bad IPv4 address " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(fd);
    errno = err;
    io_error("connect to " + host + ":" + std::to_string(port));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

// Sends the hello and waits for the one-byte acknowledgement.
bool handshake(int fd, const OrgId& org, const std::string& token) {
  const auto hello = nlohmann::json{{"org_id", org}, {"token", token}}.dump();
  if (!write_frame(fd, as_bytes(hello))) return false;
  const auto ack = read_frame(fd);
  return ack && ack->size() == 1 && (*ack)[0] == 1;
}

}  // namespace

TcpEndpoint::TcpEndpoint(OrgId self, std::map<OrgId, std::string> tokens, std::uint16_t port)
    : self_(std::move(self)), tokens_(std::move(tokens)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) io_error("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
    const int err = errno;
    ::close(listen_fd_);
    errno = err;
    io_error("listen on port " + std::to_string(port));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpEndpoint::~TcpEndpoint() { close(); }

void TcpEndpoint::accept_loop() {
  while (!closing_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    std::lock_guard lock(mu_);
    if (closing_) {
      ::close(fd);
      return;
    }
    incoming_.push_back(fd);
    threads_.emplace_back([this, fd] { reader_loop(fd); });
  }
}

void TcpEndpoint::reader_loop(int fd) {
  const auto hello = read_frame(fd);
  OrgId peer;
  bool ok = false;
  if (hello) {
    try {
      const auto j = nlohmann::json::parse(hello->begin(), hello->end());
      peer = j.at("org_id").get<std::string>();
      const auto token = j.at("token").get<std::string>();
      auto it = tokens_.find(peer);
      ok = it != tokens_.end() && same_token(it->second, token);
    } catch (const nlohmann::json::exception&) {
      ok = false;
    }
  }
  if (!ok) {
    ++rejected_;
    ::shutdown(fd, SHUT_RDWR);
    return;
  }
  const std::uint8_t ack = 1;
  if (!write_frame(fd, ByteView(&ack, 1))) return;

  while (auto payload = read_frame(fd)) {
    try {
      const auto msg = protocol::decode_message(*payload);
      if (msg.sender != peer) {
        ++rejected_;
        ::shutdown(fd, SHUT_RDWR);
        return;
      }
      inbox_.send(Frame{peer, std::move(*payload)});
    } catch (const Error&) {
      ::shutdown(fd, SHUT_RDWR);
      return;
    }
  }
}

void TcpEndpoint::add_peer(const OrgId& peer, std::string host, std::uint16_t port) {
  std::lock_guard lock(mu_);
  peers_[peer] = {std::move(host), port};
}

int TcpEndpoint::connect_to(const OrgId& peer) {
  if (auto it = outgoing_.find(peer); it != outgoing_.end()) return it->second;
  auto addr = peers_.find(peer);
  if (addr == peers_.end()) throw Error(Errc::kLinkClosed, "no address for " + peer);
  auto token = tokens_.find(self_);
  const int fd = dial(addr->second.first, addr->second.second);
  if (!handshake(fd, self_, token == tokens_.end() ? std::string() : token->second)) {
    ::close(fd);
    throw Error(Errc::kHandshakeRejected, peer + " refused the connection from " + self_);
  }
  outgoing_[peer] = fd;
  return fd;
}

void TcpEndpoint::send(const protocol::Message& msg) {
  std::lock_guard lock(mu_);
  if (closing_) throw Error(Errc::kLinkClosed, "endpoint " + self_ + " is closed");
  const int fd = connect_to(msg.receiver);
  if (!write_frame(fd, protocol::encode_message(msg))) io_error("send to " + msg.receiver);
}

protocol::Message TcpEndpoint::receive() { return protocol::decode_message(inbox_.deliver().payload); }

std::optional<protocol::Message> TcpEndpoint::receive_for(std::chrono::milliseconds timeout) {
  auto f = inbox_.deliver_for(timeout);
  if (!f) return std::nullopt;
  return protocol::decode_message(f->payload);
}

void TcpEndpoint::close() {
  if (closing_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mu_);
    for (int fd : incoming_) ::shutdown(fd, SHUT_RDWR);
    for (auto& [peer, fd] : outgoing_) ::shutdown(fd, SHUT_RDWR);
    threads.swap(threads_);
  }
  for (auto& t : threads) t.join();
  std::lock_guard lock(mu_);
  for (int fd : incoming_) ::close(fd);
  for (auto& [peer, fd] : outgoing_) ::close(fd);
  incoming_.clear();
  outgoing_.clear();
  inbox_.close();
}

bool TcpEndpoint::probe_handshake(const std::string& host, std::uint16_t port, const OrgId& claimed,
                                  const std::string& token) {
  const int fd = dial(host, port);
  const bool ok = handshake(fd, claimed, token);
  ::close(fd);
  return ok;
}

}  // namespace confine::transport
