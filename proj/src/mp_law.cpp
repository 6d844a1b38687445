#include "rsvd/mp_law.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rsvd::mp {

MpParams::MpParams(double phi_, double eta2_) : phi(phi_), eta2(eta2_) {
  if (!(phi > 0.0) || !(phi <= 1.0))
    throw std::invalid_argument("MpParams: phi must be in (0, 1]");
  if (!(eta2 > 0.0)) throw std::invalid_argument("MpParams: eta2 must be > 0");
}

double MpParams::lambda_minus() const {
  const double t = 1.0 - std::sqrt(phi);
  return eta2 * t * t;
}

double MpParams::lambda_plus() const {
  const double t = 1.0 + std::sqrt(phi);
  return eta2 * t * t;
}

MpParams bulk_params(const ModelParams& p) {
  if (p.classical()) {
    return MpParams(std::min(p.gamma, 1.0 / p.gamma),
                    std::sqrt(std::max(p.gamma, 1.0 / p.gamma)));
  }
  const double gb = p.gamma * p.beta;
  return MpParams(gb / (1.0 + p.gamma - gb),
                  1.0 / std::sqrt(p.gamma) + (1.0 - p.beta) * std::sqrt(p.gamma));
}

std::pair<double, double> bulk_edges(const ModelParams& p) {
  const double base = 1.0 / std::sqrt(p.gamma) + std::sqrt(p.gamma);
  const double half = 2.0 * std::sqrt(p.beta * (1.0 + p.gamma - p.gamma * p.beta));
  return {base - half, base + half};
}

double delta(const ModelParams& p, double lambda) {
  const auto [lo, hi] = bulk_edges(p);
  double d = (hi - lambda) * (lambda - lo);
  if (d < 0.0 && d > -1e-12 && std::abs(lambda - hi) < 1e-9) d = 0.0;
  return d;
}

double density(const MpParams& mp, double lambda) {
  const double lo = mp.lambda_minus();
  const double hi = mp.lambda_plus();
  if (lambda <= lo || lambda >= hi) return 0.0;
  return std::sqrt((hi - lambda) * (lambda - lo)) /
         (2.0 * std::numbers::pi * mp.eta2 * mp.phi * lambda);
}

namespace {

// CDF integrand after the angular substitution lambda = c + r*sin(t), which
// turns the square-root edge factors into r*cos(t) and removes the phi = 1
// endpoint singularity at lambda = 0. The transformed integrand is smooth.
struct CdfIntegrand {
  double c, r, norm;  // norm = 2*pi*eta2*phi
  bool at_zero_edge;  // phi = 1: lambda(-pi/2) = 0 and the 1/x factor cancels
};

double cdf_cb(double t, void* params) {
  const auto& q = *static_cast<const CdfIntegrand*>(params);
  const double s = std::sin(t);
  if (q.at_zero_edge) {
    // c = r: r^2 cos^2(t) / (norm * r * (1 + sin t)) = r (1 - sin t) / norm
    return q.r * (1.0 - s) / q.norm;
  }
  const double x = q.c + q.r * s;
  const double rc = q.r * std::cos(t);
  return rc * rc / (q.norm * x);
}

void disable_gsl_abort() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

}  // namespace

double cdf(const MpParams& mp, double lambda) {
  const double lo = mp.lambda_minus();
  const double hi = mp.lambda_plus();
  if (lambda <= lo) return 0.0;
  if (lambda >= hi) return 1.0;

  disable_gsl_abort();
  constexpr std::size_t kLimit = 256;
  std::unique_ptr<gsl_integration_workspace,
                  decltype(&gsl_integration_workspace_free)>
      ws(gsl_integration_workspace_alloc(kLimit),
         &gsl_integration_workspace_free);
  if (!ws) throw std::runtime_error("mp::cdf: quadrature workspace allocation failed");

  CdfIntegrand q{0.5 * (lo + hi), 0.5 * (hi - lo),
                 2.0 * std::numbers::pi * mp.eta2 * mp.phi, lo < 1e-14 * hi};
  const double t_up =
      std::asin(std::clamp((lambda - q.c) / q.r, -1.0, 1.0));
  gsl_function f;
  f.function = &cdf_cb;
  f.params = &q;

  double result = 0.0, abserr = 0.0;
  const int status =
      gsl_integration_qag(&f, -std::numbers::pi / 2.0, t_up, 1e-13, 1e-13, kLimit,
                          GSL_INTEG_GAUSS61, ws.get(), &result, &abserr);
  if (status != GSL_SUCCESS && abserr > 1e-11)
    throw std::runtime_error("mp::cdf: quadrature did not converge");
  return std::clamp(result, 0.0, 1.0);
}

double median(const MpParams& mp) {
  double lo = mp.lambda_minus();
  double hi = mp.lambda_plus();
  // Bisection: the CDF is continuous and strictly increasing on the support.
  while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mp, mid) < 0.5)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rsvd::mp
