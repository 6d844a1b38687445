#pragma once

#include "rsvd/common.hpp"
#include "rsvd/sketch.hpp"

namespace rsvd {

/// Approximate partial SVD produced by the randomized pipeline:
/// u_hat (n x d) and v_hat (m x d) have orthonormal columns, sing_vals is
/// nonincreasing, and u_hat * diag(sing_vals) * v_hat^T reconstructs the
/// projected matrix Q Q^T Y.
struct RsvdResult {
  Matrix u_hat;
  Vector sing_vals;
  Matrix v_hat;
  int q_used = 0;
  Index range_rank = 0;  ///< numerical rank of the sketched matrix
};

/// Randomized range finder: orthonormal basis Q (n x d) for the range of
/// (Y Y^T)^q Y Omega^T. Householder orthogonalization; for q >= 1 the basis
/// is re-orthonormalized after every multiplication by Y or Y^T. Requires
/// d < n. If detected_rank is non-null it receives the numerical rank of the
/// final sketched matrix (below-d rank cannot occur a.s. when noise is
/// present; exactly low-rank inputs still yield a valid basis containing the
/// range).
Matrix range_finder(const Matrix& y, const sketch::SketchOperator& op, int q,
                    Index* detected_rank = nullptr);

/// The full pipeline: range finder, B = Q^T Y, SVD of the d x m matrix B
/// (never of Y directly), u_hat = Q * U_B.
RsvdResult randomized_svd(const Matrix& y, const sketch::SketchOperator& op, int q = 0);

/// Singular values of the reduced matrix only (no singular vectors formed).
Vector randomized_singular_values(const Matrix& y, const sketch::SketchOperator& op,
                                  int q = 0);

/// Exact k-truncated SVD of Y, in the same result shape; the no-reduction
/// baseline for experiments.
RsvdResult full_svd_reference(const Matrix& y, Index k);

}  // namespace rsvd
