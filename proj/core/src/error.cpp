#include "rhpe/error.hpp"

namespace rhpe {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::invalid_set: return "invalid-set";
    case Errc::not_monotone: return "not-monotone";
    case Errc::degenerate_regularization: return "degenerate-regularization";
    case Errc::invalid_config: return "invalid-config";
    case Errc::unsupported_problem: return "unsupported-problem";
    case Errc::certificate_violation: return "certificate-violation";
    case Errc::broken_convexity: return "broken-convexity";
    case Errc::numeric_failure: return "numeric-failure";
    case Errc::invalid_comparison: return "invalid-comparison";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace rhpe
