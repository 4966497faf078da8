#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "aamcm/env_config.hpp"
#include "aamcm/scenario.hpp"
#include "aamcm/world.hpp"

namespace aamcm::protocol {

inline constexpr std::string_view kProtocolVersion = "aamcm/1";

/// One client conversation: JSON request line in, JSON response line out.
/// Errors come back as {"ok":false,"error":{"code","message"}} and leave
/// the session usable.
class Session {
 public:
  explicit Session(EnvConfig env = {});

  std::string handle_line(std::string_view line);
  bool closed() const noexcept { return closed_; }

 private:
  struct Impl;
  friend struct Impl;

  EnvConfig env_;
  std::optional<World> world_;
  std::shared_ptr<const network::CorridorNetwork> cached_net_;
  std::shared_ptr<const hazards::PopulationGrid> cached_pop_;
  std::filesystem::path cached_net_path_;
  std::filesystem::path cached_pop_path_;
  bool have_cache_ = false;
  bool closed_ = false;
};

/// Serves one session over a pair of streams until close or EOF.
void serve_stream(std::istream& in, std::ostream& out, const EnvConfig& env = {});

/// Line-protocol TCP server, one session per connection.
class TcpServer {
 public:
  /// Binds immediately; port 0 picks a free port.
  explicit TcpServer(std::uint16_t port, const std::string& host = "127.0.0.1", EnvConfig env = {});
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Accept loop; returns after stop().
  void run();
  void stop();

 private:
  void serve_connection(int fd);

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  EnvConfig env_;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::vector<int> client_fds_;
  std::vector<std::thread> workers_;
};

}  // namespace aamcm::protocol
