#pragma once

#include <stdexcept>
#include <string>

namespace rhpe {

enum class Errc {
  invalid_input,
  invalid_set,
  not_monotone,
  degenerate_regularization,
  invalid_config,
  unsupported_problem,
  certificate_violation,
  broken_convexity,
  numeric_failure,
  invalid_comparison,
  io_error,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the bench tool in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rhpe
