#pragma once

#include <utility>

#include "rsvd/model.hpp"

namespace rsvd::mp {

/// Marchenko-Pastur parameters: shape phi in (0, 1], scale eta2 > 0.
/// Support is [eta2*(1-sqrt(phi))^2, eta2*(1+sqrt(phi))^2].
struct MpParams {
  double phi;
  double eta2;

  MpParams(double phi_, double eta2_);

  double lambda_minus() const;
  double lambda_plus() const;
};

/// Shape/scale of the limiting bulk of the squared singular values of the
/// reduced matrix: phi = gamma*beta/(1+gamma-gamma*beta),
/// eta2 = gamma^{-1/2} + (1-beta)*gamma^{1/2}. Parameters on the
/// no-reduction boundary (beta = 1 or gamma*beta = 1) use the classical
/// parameterization phi = min(gamma, 1/gamma), eta2 = max(gamma, 1/gamma)^{1/2},
/// which the general formula approaches continuously.
MpParams bulk_params(const ModelParams& p);

/// Bulk support edges lambda^{-+} = gamma^{-1/2}+gamma^{1/2} -+
/// 2*sqrt(beta*(1+gamma-gamma*beta)). Consistent with bulk_params via
/// lambda^{+-} = eta2*(1 +- sqrt(phi))^2.
std::pair<double, double> bulk_edges(const ModelParams& p);

/// Delta(lambda) = (lambda^+ - lambda)(lambda - lambda^-). Radicands within
/// 1e-12 of zero caused by roundoff at the branch point are clamped to zero
/// when lambda sits within 1e-9 of the upper edge.
double delta(const ModelParams& p, double lambda);

/// Density of the MP law: (2*pi*eta2*phi)^{-1} sqrt((l+ - x)(x - l-))/x on the
/// support, 0 outside. Integrates to 1 (no atom at 0 for phi <= 1).
double density(const MpParams& mp, double lambda);

/// CDF by adaptive quadrature of the density; absolute accuracy <= 1e-10.
double cdf(const MpParams& mp, double lambda);

/// Unique median of the MP law, solved by bisection of the CDF to 1e-10
/// relative tolerance. The bracket (lambda^-, lambda^+) is guaranteed.
double median(const MpParams& mp);

}  // namespace rsvd::mp
