#include "qcf/error.hpp"

namespace qcf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::shape_error: return "shape-error";
    case ErrorKind::unsupported_operation: return "unsupported-operation";
    case ErrorKind::incompatible_rhs: return "incompatible-rhs";
    case ErrorKind::eigen_failure: return "eigen-failure";
    case ErrorKind::unnormalized_state: return "unnormalized-state";
    case ErrorKind::vacuum_error: return "vacuum-error";
    case ErrorKind::log_domain_error: return "log-domain-error";
    case ErrorKind::unsupported_model: return "unsupported-model";
    case ErrorKind::requires_pure_state: return "requires-pure-state";
    case ErrorKind::degenerate_loop: return "degenerate-loop";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::config_error: return "config-error";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace qcf
