#pragma once

#include <stdexcept>
#include <string>

namespace freewalk {

// Failure classes surfaced by the library. Validation errors mean the input
// was rejected; numerical errors mean a computation could not meet its
// contract.
enum class errc {
  not_symmetric,
  weights_not_probability,
  negative_weight,
  not_admissible,
  bad_config,
  infinite_theta,
  domain_error,
  quadrature_not_converged,
  budget_exceeded,
  reversion_failure,
  no_convergence,
  root_bracket_failure,
  no_sign_change,
  fit_unstable,
  window_too_short,
  degenerate_design_matrix,
  upstream_accuracy,
};

const char* errc_name(errc c) noexcept;

// True for input-rejection codes (CLI exit 1), false for numerical failures
// (CLI exit 2).
bool is_validation_error(errc c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace freewalk
