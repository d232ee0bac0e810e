#ifndef L2X_ERRORS_HPP
#define L2X_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace l2x {

// Every error raised by the library derives from Error and carries a stable
// machine-readable code (used verbatim on the wire and by the CLI).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define L2X_DEFINE_ERROR(Name, Code)                                      \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(Code, message) {}  \
  }

// worldspec
L2X_DEFINE_ERROR(SyntaxError, "syntax-error");
L2X_DEFINE_ERROR(SchemaError, "schema-error");
L2X_DEFINE_ERROR(ValidationError, "validation-error");
L2X_DEFINE_ERROR(UnknownPath, "unknown-path");
L2X_DEFINE_ERROR(UnknownColor, "unknown-color");

// simcore / sensors
L2X_DEFINE_ERROR(EpisodeFinished, "episode-finished");
L2X_DEFINE_ERROR(DuplicateId, "duplicate-id");
L2X_DEFINE_ERROR(ConfigError, "config-error");

// tasks / similarity
L2X_DEFINE_ERROR(ArgumentError, "argument-error");
L2X_DEFINE_ERROR(RangeError, "range-error");
L2X_DEFINE_ERROR(BoundsMismatch, "bounds-mismatch");

// curriculum
L2X_DEFINE_ERROR(TaskLoadError, "task-load-error");
L2X_DEFINE_ERROR(DanglingReference, "dangling-reference");
L2X_DEFINE_ERROR(AgentFault, "agent-fault");

// metrics
L2X_DEFINE_ERROR(NoData, "no-data");
L2X_DEFINE_ERROR(InsufficientData, "insufficient-data");
L2X_DEFINE_ERROR(EmptyOverlap, "empty-overlap");
L2X_DEFINE_ERROR(DivisionDegenerate, "division-degenerate");
L2X_DEFINE_ERROR(LogFormatError, "log-format-error");

// agents
L2X_DEFINE_ERROR(TaskMismatch, "task-mismatch");

// protocol
L2X_DEFINE_ERROR(NoEpisode, "no-episode");
L2X_DEFINE_ERROR(UnknownChannel, "unknown-channel");
L2X_DEFINE_ERROR(VersionMismatch, "version-mismatch");
L2X_DEFINE_ERROR(BindError, "bind-error");

#undef L2X_DEFINE_ERROR

}  // namespace l2x

#endif  // L2X_ERRORS_HPP
