#pragma once

#include <cmath>
#include <stdexcept>

namespace rsvd {

/// Asymptotic regime of the reduced-matrix ensemble.
///
/// gamma = m/n is the aspect ratio of the data matrix, beta = d/m the
/// undersampling ratio of the sketch. The regime gamma*beta >= 1 performs no
/// effective reduction (the sketched range spans all of R^n), so beta = 1 is
/// accepted for any gamma and gamma*beta = 1 is accepted for beta < 1; both
/// route every prediction through the classical full-SVD formulas. Parameters
/// with beta < 1 and gamma*beta > 1 are rejected.
struct ModelParams {
  double gamma;
  double beta;

  ModelParams(double gamma_, double beta_) : gamma(gamma_), beta(beta_) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
      throw std::invalid_argument("ModelParams: gamma must be in (0, inf)");
    if (!(beta > 0.0) || !(beta <= 1.0))
      throw std::invalid_argument("ModelParams: beta must be in (0, 1]");
    if (beta < 1.0 && gamma * beta > 1.0)
      throw std::invalid_argument(
          "ModelParams: gamma*beta must be <= 1 when beta < 1");
  }

  /// True when no effective dimension reduction happens and all predictions
  /// dispatch to the classical (full SVD) formulas.
  bool classical() const { return beta == 1.0 || gamma * beta == 1.0; }
};

}  // namespace rsvd
