#ifndef L2X_PROTOCOL_HPP
#define L2X_PROTOCOL_HPP

#include "l2x/observation.hpp"
#include "l2x/rules.hpp"
#include "l2x/simcore.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace l2x {

inline constexpr std::string_view kProtocolVersion = "l2x/1";
/// Longer frames are answered with `frame-too-large` and discarded.
inline constexpr std::size_t kMaxFrameBytes = std::size_t(1) << 20;

/// Sent by the server as the first line of every connection.
std::string hello_line();

std::string error_line(const Json& id, std::string_view code, std::string_view message);

/// One connection's worth of protocol state. Frames are newline-free JSON
/// objects {"id", "channel", "payload"}; every non-blank frame gets exactly
/// one response line carrying the same id (null when none could be read).
class Session {
 public:
  /// Response line without the trailing newline; nullopt for blank frames.
  std::optional<std::string> handle_line(std::string_view line);
  /// Response for a frame the transport discarded for exceeding the limit.
  std::string oversized_frame();

  const std::optional<SimState>& episode() const { return episode_; }
  std::uint64_t messages_handled() const { return messages_; }

 private:
  Json dispatch(const std::string& channel, const Json& payload);
  Json handle_reset(const Json& payload);
  Json handle_step(const Json& payload);
  Json handle_query_state() const;
  Json handle_debug(const Json& payload) const;

  std::optional<SimState> episode_;
  SensorConfig sensor_;
  std::optional<std::uint64_t> last_id_;
  std::uint64_t messages_ = 0;
  std::uint64_t total_steps_ = 0;
  Json last_error_;  // null until something fails
};

/// Runs a session over standard-stream style transports until end of input.
void serve_stream(std::istream& in, std::ostream& out);

}  // namespace l2x

#endif  // L2X_PROTOCOL_HPP
