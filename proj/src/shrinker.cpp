#include "rsvd/shrinker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsvd/mp_law.hpp"
#include "rsvd/theory.hpp"

namespace rsvd::shrink {

DenoiseConfig DenoiseConfig::with_delta(double delta, std::optional<double> rho) {
  if (!(delta > 0.0)) throw std::invalid_argument("DenoiseConfig: delta must be > 0");
  if (rho && !(*rho > 0.0))
    throw std::invalid_argument("DenoiseConfig: rho must be > 0");
  DenoiseConfig cfg;
  cfg.mode = Mode::delta_threshold;
  cfg.delta = delta;
  cfg.rho = rho;
  return cfg;
}

DenoiseConfig DenoiseConfig::with_rank_bound(int k, std::optional<double> rho) {
  if (k < 1) throw std::invalid_argument("DenoiseConfig: k must be >= 1");
  if (rho && !(*rho > 0.0))
    throw std::invalid_argument("DenoiseConfig: rho must be > 0");
  DenoiseConfig cfg;
  cfg.mode = Mode::rank_bound;
  cfg.k = k;
  cfg.rho = rho;
  return cfg;
}

double optimal_weight(const ModelParams& p, double y) {
  if (!(y >= 0.0)) throw std::invalid_argument("shrink::optimal_weight: y must be >= 0");
  const double edge = std::sqrt(mp::bulk_edges(p).second);
  // relative guard: sqrt(lambda+) squared can exceed lambda+ by an ulp
  if (y <= edge * (1.0 + 4e-15)) return 0.0;
  if (p.classical()) {
    const double sigma = theory::classical_spike_inverse(p.gamma, y);
    const auto pred = theory::classical_prediction(p.gamma, sigma);
    return std::max(sigma * pred.overlap_u * pred.overlap_v, 0.0);
  }
  const double sigma = theory::spike_inverse(p, y);
  const auto [u, v] = theory::detail::overlaps_at(p, sigma, y);
  return std::max(sigma * u * v, 0.0);
}

double conjectured_weight(const ModelParams& p, double y) {
  if (!(y >= 0.0))
    throw std::invalid_argument("shrink::conjectured_weight: y must be >= 0");
  const auto [lo, hi] = mp::bulk_edges(p);
  const double y2 = y * y;
  if (y2 <= hi * (1.0 + 4e-15)) return 0.0;
  return std::sqrt((y2 - hi) * (y2 - lo)) / y;
}

double conjecture_gap(const ModelParams& p, const std::vector<double>& grid) {
  const double edge = std::sqrt(mp::bulk_edges(p).second);
  double gap = 0.0;
  for (const double y : grid) {
    if (!(y > edge))
      throw std::invalid_argument("shrink::conjecture_gap: grid must lie above the edge");
    gap = std::max(gap, std::abs(optimal_weight(p, y) - conjectured_weight(p, y)));
  }
  return gap;
}

double estimate_noise(const Vector& sing_vals, const ModelParams& p) {
  if (sing_vals.size() < 2)
    throw std::invalid_argument("shrink::estimate_noise: need at least 2 singular values");
  std::vector<double> sq(static_cast<std::size_t>(sing_vals.size()));
  for (Index i = 0; i < sing_vals.size(); ++i)
    sq[static_cast<std::size_t>(i)] = sing_vals(i) * sing_vals(i);
  std::sort(sq.begin(), sq.end());
  const std::size_t n = sq.size();
  const double med =
      (n % 2 == 1) ? sq[n / 2] : 0.5 * (sq[n / 2 - 1] + sq[n / 2]);
  return std::sqrt(med / mp::median(mp::bulk_params(p)));
}

int estimate_rank(const Vector& sing_vals, double delta, double rho,
                  const ModelParams& p) {
  if (!(delta > 0.0)) throw std::invalid_argument("shrink::estimate_rank: delta must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("shrink::estimate_rank: rho must be > 0");
  const double threshold = std::sqrt(mp::bulk_edges(p).second) + delta;
  int count = 0;
  for (Index i = 0; i < sing_vals.size(); ++i)
    if (sing_vals(i) / rho > threshold) ++count;
  return count;
}

DenoiseResult denoise(const RsvdResult& res, const ModelParams& p,
                      const DenoiseConfig& cfg) {
  const Index d = res.sing_vals.size();
  if (d == 0) throw std::invalid_argument("shrink::denoise: empty input");
  const double sigma_max = res.sing_vals(0);

  DenoiseResult out;
  out.rho_hat = cfg.rho ? *cfg.rho : estimate_noise(res.sing_vals, p);

  const bool degenerate = out.rho_hat < 1e-12 * sigma_max;
  Index rank = 0;
  if (cfg.mode == DenoiseConfig::Mode::rank_bound) {
    rank = std::min<Index>(cfg.k, d);
  } else if (degenerate) {
    for (Index i = 0; i < d; ++i)
      if (res.sing_vals(i) > 1e-12 * sigma_max) ++rank;
  } else {
    rank = estimate_rank(res.sing_vals, cfg.delta, out.rho_hat, p);
  }

  out.rank_used = static_cast<int>(rank);
  out.weights = Vector::Zero(rank);
  for (Index i = 0; i < rank; ++i) {
    out.weights(i) = degenerate
                         ? res.sing_vals(i)
                         : out.rho_hat * optimal_weight(p, res.sing_vals(i) / out.rho_hat);
  }
  out.u = res.u_hat.leftCols(rank);
  out.v = res.v_hat.leftCols(rank);
  return out;
}

Vector oracle_weights(const spiked::SpikedInstance& inst, const RsvdResult& res, int k) {
  if (k < 0 || k > res.sing_vals.size())
    throw std::invalid_argument("shrink::oracle_weights: k out of range");
  // <X, u_i v_i^T> for orthonormal dyads: the LS problem separates.
  const Matrix a = inst.u_factors.transpose() * res.u_hat.leftCols(k);  // r x k
  const Matrix b = inst.v_factors.transpose() * res.v_hat.leftCols(k);
  Vector w = Vector::Zero(k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < inst.spikes.size(); ++j)
      w(i) += inst.spikes(j) * a(j, i) * b(j, i);
  return w;
}

}  // namespace rsvd::shrink
