#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "teleop/transport/socket.hpp"

namespace teleop::service {

class ConsoleHub;

/// HTTP + WebSocket front door for browser consoles.
///   GET /ws      upgrades to a WebSocket; each binary message is one envelope,
///                in both directions.
///   GET /<path>  serves files from `static_dir` (index.html for "/"), or 404
///                when no directory was given.
class ConsoleGateway {
 public:
  ConsoleGateway(ConsoleHub& hub, const transport::Endpoint& listen, std::string static_dir);
  ~ConsoleGateway();
  ConsoleGateway(const ConsoleGateway&) = delete;
  ConsoleGateway& operator=(const ConsoleGateway&) = delete;

  void start();
  void stop();
  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Content type for a file name, by extension.
std::string mime_type(const std::string& path);

/// Maps a request target to a file under `root`; empty when the target is
/// malformed or tries to escape the root.
std::string resolve_static_path(const std::string& root, const std::string& target);

}  // namespace teleop::service
