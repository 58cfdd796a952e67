#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "confine/protocol/messages.hpp"
#include "confine/transport/link.hpp"

namespace confine::transport {

inline constexpr std::uint16_t kTcpFrameVersion = 1;

// Frame on the wire: u32 length | u16 version | payload, where length counts
// the version and payload bytes. A connection starts with a hello frame
// whose payload is {"org_id": ..., "token": ...}; the listener answers with
// a one-byte frame on success and closes the socket otherwise. After that,
// every frame carries one encoded protocol message.

/// One party's TCP presence: a listener that feeds an inbox, plus one
/// outgoing connection per peer, opened on first send.
class TcpEndpoint {
 public:
  /// `tokens` maps every org allowed to connect to the token it must show;
  /// it also supplies this endpoint's own token for outgoing hellos.
  /// Port 0 picks a free loopback port.
  TcpEndpoint(OrgId self, std::map<OrgId, std::string> tokens, std::uint16_t port = 0);
  ~TcpEndpoint();

  TcpEndpoint(const TcpEndpoint&) = delete;
  TcpEndpoint& operator=(const TcpEndpoint&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  const OrgId& id() const noexcept { return self_; }

  void add_peer(const OrgId& peer, std::string host, std::uint16_t port);

  /// Throws kHandshakeRejected if the peer refuses the hello, kIo on socket
  /// errors and kLinkClosed after close().
  void send(const protocol::Message& msg);

  /// Blocks for the next message. Throws kSessionEnded after close().
  protocol::Message receive();
  std::optional<protocol::Message> receive_for(std::chrono::milliseconds timeout);

  /// Connections dropped for a bad hello or a spoofed sender.
  std::size_t rejected_connections() const noexcept { return rejected_.load(); }

  void close();

  /// Opens a connection, presents the given identity and reports whether the
  /// listener accepted it.
  static bool probe_handshake(const std::string& host, std::uint16_t port, const OrgId& claimed,
                              const std::string& token);

 private:
  void accept_loop();
  void reader_loop(int fd);
  int connect_to(const OrgId& peer);

  OrgId self_;
  std::map<OrgId, std::string> tokens_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  Link inbox_;
  std::atomic<bool> closing_{false};
  std::atomic<std::size_t> rejected_{0};

  std::mutex mu_;
  std::map<OrgId, std::pair<std::string, std::uint16_t>> peers_;
  std::map<OrgId, int> outgoing_;
  std::vector<int> incoming_;
  std::vector<std::thread> threads_;
  std::thread acceptor_;
};

}  // namespace confine::transport
