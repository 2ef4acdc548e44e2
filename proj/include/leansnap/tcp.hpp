#pragma once

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include "leansnap/sim_server.hpp"
#include "leansnap/transport.hpp"

namespace leansnap::tcp {

// Blocking byte stream over a connected socket. Owns the descriptor.
class TcpStream final : public transport::ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream() override;

  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;

  void write(std::string_view bytes) override;
  std::size_t read_some(char* buf, std::size_t max) override;

  static TcpStream connect(const std::string& host, int port);

 private:
  int fd_ = -1;
};

// Serves the snapshot protocol over TCP. Each accepted connection gets its
// own simulated session (fresh timeline) preloaded with the given profiles;
// connections are handled one at a time in arrival order.
class TcpServer {
 public:
  TcpServer(int port, sim::SimOptions options,
            std::vector<TheoremProfile> profiles);
  ~TcpServer();

  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  int port() const { return port_; }

  // Accept loop; returns once stop() closes the listening socket.
  void serve_forever();

  // Runs serve_forever on a background thread.
  void start();
  void stop();

 private:
  void serve_connection_(int fd);

  int listen_fd_ = -1;
  int port_ = 0;
  sim::SimOptions options_;
  std::vector<TheoremProfile> profiles_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
};

}  // namespace leansnap::tcp
