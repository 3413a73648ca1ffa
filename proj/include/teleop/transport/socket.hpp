#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "teleop/transport/envelope.hpp"

namespace teleop::transport {

/// "host:port". Host may be a dotted IPv4 address or a resolvable name; an
/// empty host means any interface when listening and loopback when connecting.
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  static Endpoint parse(const std::string& text);
  std::string to_string() const;
};

/// Owning TCP stream socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd);
  ~Socket();
  Socket(Socket&& o) noexcept;
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

  void send_all(std::span<const std::uint8_t> bytes);
  /// Waits up to `timeout` for data. Returns 0 bytes on timeout; throws
  /// NetworkError when the peer closed or the socket failed.
  std::size_t recv_some(std::span<std::uint8_t> buf, std::chrono::milliseconds timeout);
  /// Wakes a blocked reader on another thread.
  void shutdown();
  void close();

 private:
  int fd_ = -1;
};

class Listener {
 public:
  explicit Listener(const Endpoint& ep, int backlog = 8);
  std::optional<Socket> accept(std::chrono::milliseconds timeout);
  std::uint16_t port() const { return port_; }
  void close() { sock_.close(); }

 private:
  Socket sock_;
  std::uint16_t port_ = 0;
};

/// Throws NetworkError if the connection cannot be established.
Socket connect_tcp(const Endpoint& ep, std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

struct ReceivedEnvelope {
  Message message;
  std::vector<std::uint8_t> raw;  // exact bytes as received, for relaying unmodified
};

/// Envelope stream over a socket. send() may be called from several threads;
/// receive() from one.
class EnvelopeConnection {
 public:
  explicit EnvelopeConnection(Socket s) : sock_(std::move(s)) {}

  void send(std::span<const std::uint8_t> envelope);
  void send(const Message& m) { send(encode_envelope(m)); }
  /// nullopt on timeout. Throws NetworkError on disconnect, ProtocolError on a
  /// corrupt stream.
  std::optional<ReceivedEnvelope> receive(std::chrono::milliseconds timeout);
  void shutdown() { sock_.shutdown(); }

 private:
  Socket sock_;
  std::mutex send_mu_;
  EnvelopeReader reader_;
};

}  // namespace teleop::transport
