#pragma once

#include <optional>
#include <vector>

#include "rsvd/common.hpp"
#include "rsvd/model.hpp"
#include "rsvd/rsvd.hpp"
#include "rsvd/spiked.hpp"

namespace rsvd::shrink {

/// How the denoiser picks the retained rank and the noise scale.
struct DenoiseConfig {
  enum class Mode { delta_threshold, rank_bound };

  Mode mode = Mode::delta_threshold;
  double delta = 0.1;  ///< threshold margin (delta_threshold mode)
  int k = 1;           ///< rank upper bound (rank_bound mode)
  std::optional<double> rho;  ///< known noise scale; estimated when absent

  static DenoiseConfig with_delta(double delta, std::optional<double> rho = {});
  static DenoiseConfig with_rank_bound(int k, std::optional<double> rho = {});
};

struct DenoiseResult {
  int rank_used = 0;
  Vector weights;       ///< shrunk weights, zero exactly below the bulk edge
  double rho_hat = 0.0; ///< noise scale used (estimated or given)
  Matrix u;             ///< n x rank_used
  Matrix v;             ///< m x rank_used
};

/// Optimal shrinkage weight for an observed singular value y of the reduced
/// matrix: 0 at or below the bulk edge, otherwise sigma * U(sigma) * V(sigma)
/// with sigma the inverted spike location. Computed through the
/// theorem-backed overlap path; continuous at the edge.
double optimal_weight(const ModelParams& p, double y);

/// Conjectured closed form sqrt((y^2 - lambda^+)(y^2 - lambda^-)) / y (exact
/// at beta = 1, where it is a theorem).
double conjectured_weight(const ModelParams& p, double y);

/// max |optimal_weight - conjectured_weight| over a grid above the edge.
double conjecture_gap(const ModelParams& p, const std::vector<double>& grid);

/// Noise-scale estimate: sqrt(median of squared singular values divided by
/// the MP median of the limiting bulk). Needs at least 2 values.
double estimate_noise(const Vector& sing_vals, const ModelParams& p);

/// Number of singular values with sigma_i / rho strictly above
/// sqrt(lambda^+) + delta (singular-value scale; ties excluded).
int estimate_rank(const Vector& sing_vals, double delta, double rho,
                  const ModelParams& p);

/// Full practitioner pipeline: estimate (or take) rho, pick the rank, apply
/// w_i = rho * Upsilon(sigma_i / rho), return the factored estimate.
/// A degenerate noise estimate (rho < 1e-12 * sigma_max) switches to a
/// noiseless passthrough: singular values are kept unshrunk.
DenoiseResult denoise(const RsvdResult& res, const ModelParams& p,
                      const DenoiseConfig& cfg);

/// Clairvoyant least-squares weights min_w ||X - sum w_i u_hat_i v_hat_i^T||_F
/// given the true factors (simulation oracle): w_i = sum_j sigma_j
/// <u_j, u_hat_i> <v_j, v_hat_i>.
Vector oracle_weights(const spiked::SpikedInstance& inst, const RsvdResult& res, int k);

}  // namespace rsvd::shrink
