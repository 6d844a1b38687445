#include "rsvd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsvd/mp_law.hpp"

namespace rsvd::theory {

namespace {

struct EdgeQuantities {
  double rho;     // 1 + gamma - beta*gamma
  double sqrtg;   // gamma^{1/2}
  double edge;    // sqrt(lambda^+)
};

EdgeQuantities edge_quantities(const ModelParams& p) {
  return {1.0 + p.gamma - p.beta * p.gamma, std::sqrt(p.gamma),
          std::sqrt(mp::bulk_edges(p).second)};
}

void require_above_edge(const ModelParams& p, double y, const char* who) {
  if (p.classical())
    throw std::invalid_argument(std::string(who) + ": requires gamma*beta < 1");
  if (!(y > edge_quantities(p).edge))
    throw std::invalid_argument(std::string(who) +
                                ": y must lie strictly above the bulk edge");
}

// sqrt(-gamma * Delta(y^2)) = sqrt(delta(y^2)^2 - 4*beta*gamma*rho) with
// delta(z) = sqrt(gamma)*z - 1 - gamma. Radicands within 1e-12 of zero at the
// branch point are clamped.
double edge_sqrt(const ModelParams& p, double y) {
  const auto e = edge_quantities(p);
  const double z = y * y;
  const double dl = e.sqrtg * z - 1.0 - p.gamma;
  double rad = dl * dl - 4.0 * p.beta * p.gamma * e.rho;
  if (rad < 0.0 && rad > -1e-12 && std::abs(y - e.edge) < 1e-9) rad = 0.0;
  return std::sqrt(rad);
}

// Every kappa has the shape (a*y^2 + b + c*S(y)) / (den * y^p), which makes
// the tau derivatives mechanical.
struct KappaCoef {
  double a, b, c, den;
  int p;
};

std::array<KappaCoef, 9> kappa_coefs(const ModelParams& p) {
  const double g = p.gamma;
  const double be = p.beta;
  const double sg = std::sqrt(g);
  const double gb = g * be;
  const double w = 1.0 + g - 2.0 * gb;  // 1 + gamma - 2*beta*gamma
  const double rho = 1.0 + g - gb;
  return {{
      {sg, 1.0 - g, -1.0, 2.0, 1},
      {0.0, 1.0 - gb, 0.0, 1.0, 1},
      {sg * (1.0 + g), -w * w, -w, 2.0 * g * (1.0 - gb), 3},
      {sg, -w, -1.0, 2.0 * g, 2},
      {-(1.0 + be) * sg, (1.0 - be) * w, 1.0 - be, 2.0 * (1.0 - gb), 2},
      {sg, -(1.0 - g), -1.0, 2.0 * g, 1},
      {0.0, 1.0 - be, 0.0, 1.0, 1},
      {(1.0 - be) * sg, (1.0 - be) * (1.0 - g), -(1.0 - be), 2.0 * (1.0 - gb), 1},
      {g * (1.0 - be) * (1.0 - gb), sg * (1.0 - be) * (1.0 - gb) * w,
       -sg * (1.0 - be) * (1.0 - gb), 2.0 * rho, 1},
  }};
}

std::array<double, 9> tau_values(const ModelParams& p, double y) {
  const auto coefs = kappa_coefs(p);
  const double z = y * y;
  const double sg = std::sqrt(p.gamma);
  const double dl = sg * z - 1.0 - p.gamma;
  const double s = edge_sqrt(p, y);
  const double s_prime = 2.0 * sg * y * dl / s;
  std::array<double, 9> tau{};
  for (int i = 0; i < 9; ++i) {
    const auto& c = coefs[static_cast<std::size_t>(i)];
    const double numer = c.a * z + c.b + c.c * s;
    const double numer_prime = 2.0 * c.a * y + c.c * s_prime;
    // Composite exponent: kappa_i/y for i<=3, kappa_i for i in {4,5},
    // y*kappa_i for i>=6; all reduce to one formula.
    const int k = (i < 3) ? c.p + 1 : (i < 5 ? c.p : c.p - 1);
    tau[static_cast<std::size_t>(i)] =
        (k * numer - numer_prime * y) / (2.0 * c.den * std::pow(y, c.p + 1));
  }
  return tau;
}

double classical_upper_edge(double gamma) {
  return std::sqrt(gamma) + 1.0 / std::sqrt(gamma) + 2.0;
}

}  // namespace

KappaTable kappa_table(const ModelParams& p, double y) {
  require_above_edge(p, y, "theory::kappa_table");
  const auto coefs = kappa_coefs(p);
  const double s = edge_sqrt(p, y);
  const double z = y * y;
  KappaTable out{};
  for (int i = 0; i < 9; ++i) {
    const auto& c = coefs[static_cast<std::size_t>(i)];
    out.values[static_cast<std::size_t>(i)] =
        (c.a * z + c.b + c.c * s) / (c.den * std::pow(y, c.p));
  }
  return out;
}

Matrix6 k_matrix(const ModelParams& p, double y) {
  const KappaTable k = kappa_table(p, y);
  const double corner = -(1.0 - p.gamma * p.beta);
  Matrix6 m = Matrix6::Zero();
  m(0, 0) = k(1);
  m(0, 1) = m(1, 0) = k(2);
  m(1, 1) = k(2);
  m(1, 5) = m(5, 1) = corner;
  m(2, 2) = k(3);
  m(2, 3) = m(3, 2) = k(4);
  m(2, 4) = m(4, 2) = k(5);
  m(3, 3) = k(6);
  m(3, 4) = m(4, 3) = k(7);
  m(4, 4) = k(8);
  m(5, 5) = k(9);
  return m;
}

Matrix6 h_matrix() {
  Matrix6 h = Matrix6::Zero();
  const double sign[3] = {1.0, -1.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    h(i, 3 + i) = sign[i];
    h(3 + i, i) = sign[i];
  }
  return h;
}

Matrix6 tau_t_matrix(const ModelParams& p, double y) {
  require_above_edge(p, y, "theory::tau_t_matrix");
  const auto t = tau_values(p, y);
  Matrix6 m = Matrix6::Zero();
  m(0, 0) = t[0];
  m(0, 1) = m(1, 0) = t[1];
  m(1, 1) = t[1];
  m(2, 2) = t[2];
  m(2, 3) = m(3, 2) = t[3];
  m(2, 4) = m(4, 2) = t[4];
  m(3, 3) = t[5];
  m(3, 4) = m(4, 3) = t[6];
  m(4, 4) = t[7];
  m(5, 5) = t[8];
  return m;
}

double theta(const ModelParams& p, double y) {
  require_above_edge(p, y, "theory::theta");
  const auto e = edge_quantities(p);
  const double z = y * y;
  const double dl = e.sqrtg * z - 1.0 - p.gamma;
  const double big_d = dl - edge_sqrt(p, y);
  // Positive root of P(q; A) = 2*sqrt(g)*rho*q^2 + rho*(2*beta*gamma - A)*q
  // - sqrt(g)*A, evaluated at A = D(y^2). Stable quadratic form: c < 0.
  const double a = 2.0 * e.sqrtg * e.rho;
  const double b = e.rho * (2.0 * p.beta * p.gamma - big_d);
  const double c = -e.sqrtg * big_d;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  const double q = (b > 0.0) ? (-2.0 * c) / (b + disc) : (disc - b) / (2.0 * a);
  return std::sqrt(q);
}

double theta_inv(const ModelParams& p, double s) {
  if (p.classical() || p.gamma * p.beta >= 1.0)
    throw std::invalid_argument("theory::theta_inv: requires gamma*beta < 1");
  const double hi = 1.0 / detection_threshold(p);
  if (!(s > 0.0) || !(s < hi))
    throw std::invalid_argument(
        "theory::theta_inv: s must lie in (0, 1/sigma*)");
  const double g = p.gamma;
  const double be = p.beta;
  const double sg = std::sqrt(g);
  const double rho = 1.0 + g - be * g;
  const double s2 = s * s;
  const double s4 = s2 * s2;
  const double num1 = s2 + (1.0 + s4) * sg + s2 * g;
  const double num2 = be * g + s4 * rho + 2.0 * s2 * be * sg * rho;
  const double den = s2 * (s2 + be * sg) * sg * (sg + s2 * rho);
  return std::sqrt(num1 * num2 / den);
}

double detection_threshold(const ModelParams& p) {
  if (p.classical()) return 1.0;
  const double g = p.gamma;
  const double rho = 1.0 + g - p.beta * g;
  const double v = 0.5 * (std::sqrt(g) + 1.0 / std::sqrt(g) -
                          p.beta * std::sqrt(g) - std::sqrt(p.beta * rho));
  return std::sqrt(std::sqrt(v * v + std::sqrt(rho / g) / std::sqrt(p.beta)) - v);
}

double small_beta_threshold(const ModelParams& p) {
  return std::pow(1.0 + 1.0 / p.gamma, 0.125) * std::pow(p.beta, -0.125);
}

double classical_spike_forward(double gamma, double sigma) {
  if (sigma <= 1.0) return std::sqrt(classical_upper_edge(gamma));
  const double g4 = std::pow(gamma, 0.25);
  return std::sqrt((g4 * sigma + 1.0 / (g4 * sigma)) *
                   (sigma / g4 + g4 / sigma));
}

double classical_spike_inverse(double gamma, double y) {
  const double edge = std::sqrt(classical_upper_edge(gamma));
  if (!(y > edge))
    throw std::invalid_argument(
        "theory::classical_spike_inverse: y must lie above the bulk edge");
  // y^2 = sigma^2 + 1/sigma^2 + gamma^{1/2} + gamma^{-1/2}
  const double t = y * y - std::sqrt(gamma) - 1.0 / std::sqrt(gamma);
  return std::sqrt(0.5 * (t + std::sqrt(t * t - 4.0)));
}

double spike_forward(const ModelParams& p, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("theory::spike_forward: sigma must be > 0");
  if (p.classical()) return classical_spike_forward(p.gamma, sigma);
  if (sigma <= detection_threshold(p)) return edge_quantities(p).edge;
  const double g = p.gamma;
  const double be = p.beta;
  const double sg = std::sqrt(g);
  const double rho = 1.0 + g - be * g;
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  const double num =
      (sg + s2) * (1.0 + sg * s2) * (rho + 2.0 * be * sg * rho * s2 + be * g * s4);
  const double den = sg * s2 * (rho + sg * s2) * (1.0 + be * sg * s2);
  return std::sqrt(num / den);
}

double spike_inverse(const ModelParams& p, double y) {
  if (p.classical()) return classical_spike_inverse(p.gamma, y);
  return 1.0 / theta(p, y);
}

std::pair<double, double> overlaps(const ModelParams& p, double sigma) {
  if (p.classical())
    throw std::invalid_argument("theory::overlaps: requires gamma*beta < 1");
  if (!(sigma > detection_threshold(p)))
    throw std::invalid_argument(
        "theory::overlaps: sigma must exceed the detection threshold");
  return detail::overlaps_at(p, sigma, spike_forward(p, sigma));
}

SpikePrediction classical_prediction(double gamma, double sigma) {
  if (!(gamma > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("theory::classical_prediction: bad parameters");
  SpikePrediction out;
  out.sigma = sigma;
  out.detectable = sigma > 1.0;
  if (out.detectable) {
    const double y = classical_spike_forward(gamma, sigma);
    out.outlier_sq = y * y;
    const double s2 = sigma * sigma;
    const double s4 = s2 * s2;
    out.overlap_u = std::sqrt((s4 - 1.0) / (s4 + s2 / std::sqrt(gamma)));
    out.overlap_v = std::sqrt((s4 - 1.0) / (s4 + s2 * std::sqrt(gamma)));
  } else {
    out.outlier_sq = classical_upper_edge(gamma);
  }
  return out;
}

SpikePrediction predict(const ModelParams& p, double sigma) {
  if (p.classical()) return classical_prediction(p.gamma, sigma);
  SpikePrediction out;
  out.sigma = sigma;
  const double thr = detection_threshold(p);
  if (sigma > thr) {
    const double y = spike_forward(p, sigma);
    out.detectable = true;
    out.outlier_sq = y * y;
    std::tie(out.overlap_u, out.overlap_v) = detail::overlaps_at(p, sigma, y);
  } else {
    out.outlier_sq = mp::bulk_edges(p).second;
    out.conjectured = true;  // sub-threshold decorrelation is conjectural
  }
  return out;
}

SpikePrediction sketched_pca_prediction(const ModelParams& p, double sigma) {
  if (p.classical() || p.gamma * p.beta >= 1.0)
    throw std::invalid_argument(
        "theory::sketched_pca_prediction: requires gamma*beta < 1");
  if (!(sigma > 0.0))
    throw std::invalid_argument("theory::sketched_pca_prediction: sigma must be > 0");
  const double g = p.gamma;
  const double bg = p.beta * g;
  const double sg = std::sqrt(g);
  const double thr = std::pow(bg, -0.25);
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  const double edge_sq = sg * (1.0 + std::sqrt(p.beta)) * (1.0 + std::sqrt(p.beta));
  SpikePrediction out;
  out.sigma = sigma;
  out.detectable = sigma > thr;
  out.overlap_u = std::nan("");  // not defined for sketched PCA
  if (out.detectable) {
    out.overlap_v = std::sqrt((bg * s4 - 1.0) / (bg * s4 + sg * s2));
    out.outlier_sq = edge_sq + 1.0 / s2 + bg * s2 - 2.0 * std::sqrt(bg);
  } else {
    out.overlap_v = 0.0;
    out.outlier_sq = edge_sq;
  }
  return out;
}

double sketched_pca_snr_half(const ModelParams& p) {
  const double g = p.gamma;
  const double bg = p.beta * g;
  return std::sqrt((0.5 * std::sqrt(g) + std::sqrt(0.25 * g + 2.0 * bg)) / bg);
}

double snr_for_overlap(const ModelParams& p, double target, OverlapKind which) {
  if (p.classical() || p.gamma * p.beta >= 1.0)
    throw std::invalid_argument("theory::snr_for_overlap: requires gamma*beta < 1");
  if (!(target > 0.0) || !(target < 1.0))
    throw std::invalid_argument("theory::snr_for_overlap: target must be in (0, 1)");
  const double thr = detection_threshold(p);
  const auto curve = [&](double sigma) {
    const auto [u, v] = overlaps(p, sigma);
    switch (which) {
      case OverlapKind::product: return u * v;
      case OverlapKind::u: return u;
      case OverlapKind::v: return v;
    }
    return 0.0;
  };
  constexpr double kSigmaMax = 1e6;
  double lo = thr * (1.0 + 1e-12);
  double hi = std::max(2.0 * thr, thr + 1.0);
  while (curve(hi) < target) {
    hi *= 2.0;
    if (hi > kSigmaMax)
      throw std::runtime_error(
          "theory::snr_for_overlap: target not reached below sigma = 1e6");
  }
  while (hi - lo > 1e-8 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (curve(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

double spike_forward_product_form(const ModelParams& p, double sigma) {
  const double g = p.gamma;
  const double be = p.beta;
  const double sg = std::sqrt(g);
  const double rho = 1.0 + g - be * g;
  const double s2 = sigma * sigma;
  const double s4 = s2 * s2;
  const double correction = (rho + 2.0 * be * sg * rho * s2 + be * g * s4) /
                            ((rho + sg * s2) * (1.0 + be * sg * s2));
  const double g4 = std::pow(g, 0.25);
  const double classical = std::sqrt((g4 * sigma + 1.0 / (g4 * sigma)) *
                                     (sigma / g4 + g4 / sigma));
  return classical * std::sqrt(correction);
}

std::pair<double, double> overlaps_at(const ModelParams& p, double sigma, double y) {
  const Matrix6 m = k_matrix(p, y) - (1.0 / sigma) * h_matrix();
  Eigen::SelfAdjointEigenSolver<Matrix6> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("theory::overlaps: 6x6 eigendecomposition failed");
  int best = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&best);
  Eigen::Matrix<double, 6, 1> d = es.eigenvectors().col(best);
  const double norm_sq = d.dot(tau_t_matrix(p, y) * d);
  if (!(norm_sq > 0.0))
    throw std::runtime_error(
        "theory::overlaps: kernel vector has non-positive T-weighted norm");
  d /= std::sqrt(norm_sq);
  const double u = std::min(std::abs(d(3)) / sigma, 1.0);
  const double v = std::min(std::abs(d(0)) / sigma, 1.0);
  return {u, v};
}

}  // namespace detail

}  // namespace rsvd::theory
