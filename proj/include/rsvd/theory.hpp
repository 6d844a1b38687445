#pragma once

#include <array>
#include <utility>

#include "rsvd/common.hpp"
#include "rsvd/model.hpp"

namespace rsvd::theory {

/// The nine auxiliary functions kappa^{(1)}..kappa^{(9)} evaluated at a point
/// y strictly above the upper bulk edge (singular-value scale). kappa(i) is
/// 1-based to match the customary numbering; kappa(2) = (1-beta*gamma)/y and
/// kappa(7) = (1-beta)/y hold exactly.
struct KappaTable {
  std::array<double, 9> values;

  double operator()(int i) const { return values.at(static_cast<std::size_t>(i - 1)); }
};

KappaTable kappa_table(const ModelParams& p, double y);

/// The symmetric 6x6 matrix K(y) built from the kappa functions. Off-pattern
/// entries are exactly zero; entries (2,6) and (6,2) equal -(1-gamma*beta).
Matrix6 k_matrix(const ModelParams& p, double y);

/// The constant symmetric matrix H = [[0, I3-], [I3-, 0]] with
/// I3- = diag(1, -1, 1). Satisfies H^2 = I.
Matrix6 h_matrix();

/// The symmetric 6x6 matrix T(y) whose entries tau^{(i)} are closed-form
/// derivatives of kappa composites:
///   tau_i = -y/2 * (kappa_i/y)'      for i = 1..3,
///   tau_i = -1/2 * kappa_i'          for i = 4..5,
///   tau_i = -1/(2y) * (y*kappa_i)'   for i = 6..9.
/// Same sparsity pattern as K except the (2,6) entry is zero.
Matrix6 tau_t_matrix(const ModelParams& p, double y);

/// The unique positive root s of det(K(y) - s*H) = 0, computed in closed form
/// from the positive root of the associated quadratic. Strictly decreasing in
/// y with theta(inf) = 0; requires y strictly above the bulk edge and
/// gamma*beta < 1.
double theta(const ModelParams& p, double y);

/// Explicit functional inverse of theta, defined for s in (0, 1/sigma*).
double theta_inv(const ModelParams& p, double s);

/// Spike detection threshold sigma*. Equals exactly 1 on the classical route
/// (beta = 1 or gamma*beta = 1).
double detection_threshold(const ModelParams& p);

/// Leading-order expansion of the detection threshold for small beta:
/// (1 + 1/gamma)^{1/8} * beta^{-1/8}. Formula-only; no accuracy claim away
/// from the beta -> 0 limit.
double small_beta_threshold(const ModelParams& p);

/// Limiting location (singular-value scale) of the outlier created by a spike
/// of intensity sigma: theta^{-1}(1/sigma) for sigma above the threshold, the
/// bulk edge sqrt(lambda^+) otherwise. Bijective increasing on
/// (sigma*, inf) -> (sqrt(lambda^+), inf).
double spike_forward(const ModelParams& p, double sigma);

/// Inverse of the spike-forward map: the spike intensity whose outlier sits at
/// y > sqrt(lambda^+). Equals 1/theta(y) away from the classical route.
double spike_inverse(const ModelParams& p, double y);

/// Limiting overlaps (|<u, u_hat>|, |<v, v_hat>|) for a detectable spike
/// sigma > sigma*, via the kernel of K(Y(sigma)) - (1/sigma)*H: the
/// eigenvector of smallest absolute eigenvalue, normalized to unit T-weighted
/// norm; then U = |d_4|/sigma and V = |d_1|/sigma. Throws for sigma <= sigma*.
std::pair<double, double> overlaps(const ModelParams& p, double sigma);

/// Deterministic limits attached to one spike intensity.
struct SpikePrediction {
  double sigma = 0.0;
  bool detectable = false;
  double outlier_sq = 0.0;  ///< limiting sigma_1^2 of the reduced matrix
  double overlap_u = 0.0;   ///< limiting |<u, u_hat>|; 0 below threshold
  double overlap_v = 0.0;   ///< limiting |<v, v_hat>|; 0 below threshold
  /// True when the sub-threshold zeros rest on the conjectured (not proven)
  /// decorrelation of non-detectable spikes.
  bool conjectured = false;
};

/// Classical full-SVD baseline (no reduction): threshold 1, outlier at
/// Y_gamma(sigma)^2, overlaps U_gamma / V_gamma.
SpikePrediction classical_prediction(double gamma, double sigma);

/// Classical spike-forward map Y_gamma(sigma) on the singular-value scale for
/// sigma >= 1; returns the bulk edge below the threshold.
double classical_spike_forward(double gamma, double sigma);

/// Inverse of the classical spike-forward map for y above the bulk edge.
double classical_spike_inverse(double gamma, double y);

/// Full prediction for one spike, dispatching to the classical branch when
/// the parameters perform no reduction.
SpikePrediction predict(const ModelParams& p, double sigma);

/// Sketched-PCA baseline: detection threshold (beta*gamma)^{-1/4}, right
/// singular vector overlap from the projected spiked model, outlier location
/// above the threshold. The left overlap is not defined for sketched PCA and
/// is reported as NaN.
SpikePrediction sketched_pca_prediction(const ModelParams& p, double sigma);

/// Closed form of the SNR at which the sketched-PCA squared right overlap
/// reaches 1/2.
double sketched_pca_snr_half(const ModelParams& p);

enum class OverlapKind { product, u, v };

/// Smallest sigma > sigma* at which the selected overlap curve reaches
/// `target` in (0, 1). Bisection to 1e-8 in sigma; throws if the target is
/// not reached below sigma = 1e6.
double snr_for_overlap(const ModelParams& p, double target, OverlapKind which);

namespace detail {
/// Second line of the spike-forward display: Y_gamma(sigma) times the
/// correction factor. Used to cross-check the factorization against the
/// direct form.
double spike_forward_product_form(const ModelParams& p, double sigma);
/// Overlaps evaluated at a precomputed outlier location y = Y(sigma).
std::pair<double, double> overlaps_at(const ModelParams& p, double sigma, double y);
}  // namespace detail

}  // namespace rsvd::theory
