#pragma once

#include "rsvd/common.hpp"

namespace rsvd::linalg {

struct QrRange {
  Matrix q;    ///< thin orthonormal factor
  Index rank;  ///< numerical rank from the R diagonal
};

/// Thin Q of a Householder QR of a (rows >= cols) matrix, plus the numerical
/// rank read off the diagonal of R. Consumes its argument.
QrRange qr_range(Matrix a);

/// Thin orthonormal factor only.
Matrix orthonormal_columns(Matrix a);

/// Thin Q with the sign convention diag(R) > 0; applied to an i.i.d. Gaussian
/// input this yields an exactly Haar-distributed orthonormal frame.
Matrix haar_orthonormal(Matrix a);

struct ThinSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

/// Thin SVD A = U diag(s) V^T via LAPACK's divide-and-conquer routine.
ThinSvd thin_svd(const Matrix& a);

/// Singular values only (no vectors computed).
Vector singular_values(const Matrix& a);

}  // namespace rsvd::linalg
