#include "freewalk/errors.hpp"

namespace freewalk {

const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::not_symmetric: return "NotSymmetric";
    case errc::weights_not_probability: return "WeightsNotProbability";
    case errc::negative_weight: return "NegativeWeight";
    case errc::not_admissible: return "NotAdmissible";
    case errc::bad_config: return "BadConfig";
    case errc::infinite_theta: return "InfiniteTheta";
    case errc::domain_error: return "DomainError";
    case errc::quadrature_not_converged: return "QuadratureNotConverged";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::reversion_failure: return "ReversionFailure";
    case errc::no_convergence: return "NoConvergence";
    case errc::root_bracket_failure: return "RootBracketFailure";
    case errc::no_sign_change: return "NoSignChange";
    case errc::fit_unstable: return "FitUnstable";
    case errc::window_too_short: return "WindowTooShort";
    case errc::degenerate_design_matrix: return "DegenerateDesignMatrix";
    case errc::upstream_accuracy: return "UpstreamAccuracy";
  }
  return "UnknownError";
}

bool is_validation_error(errc c) noexcept {
  switch (c) {
    case errc::not_symmetric:
    case errc::weights_not_probability:
    case errc::negative_weight:
    case errc::not_admissible:
    case errc::bad_config:
    case errc::domain_error:
      return true;
    default:
      return false;
  }
}

}  // namespace freewalk
