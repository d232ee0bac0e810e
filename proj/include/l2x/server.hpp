#ifndef L2X_SERVER_HPP
#define L2X_SERVER_HPP

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace l2x {

/// TCP transport for the line protocol: one thread and one Session per
/// connection. Port 0 picks a free port.
class Server {
 public:
  explicit Server(std::string host = "127.0.0.1", std::uint16_t port = 0);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. Throws BindError.
  void start();
  std::uint16_t port() const { return port_; }
  /// Closes the listener and every connection, then joins the threads.
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  void accept_loop();
  void serve_connection(int fd);

  std::string host_;
  std::uint16_t port_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::vector<std::thread> workers_;
  std::vector<int> clients_;
};

/// Splits "host:port"; throws ArgumentError.
std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& address);

}  // namespace l2x

#endif  // L2X_SERVER_HPP
