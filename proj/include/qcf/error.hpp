#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcf {

/// Failure categories surfaced by the library. The string form is stable and
/// is what reports, the CLI and the python bindings show.
enum class ErrorKind {
  shape_error,
  unsupported_operation,
  incompatible_rhs,
  eigen_failure,
  unnormalized_state,
  vacuum_error,
  log_domain_error,
  unsupported_model,
  requires_pure_state,
  degenerate_loop,
  blow_up,
  config_error,
  parse_error,
  precondition,
  io_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace qcf
