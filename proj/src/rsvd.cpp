#include "rsvd/rsvd.hpp"

#include <stdexcept>

#include "rsvd/linalg.hpp"

namespace rsvd {

Matrix range_finder(const Matrix& y, const sketch::SketchOperator& op, int q,
                    Index* detected_rank) {
  if (op.d() >= y.rows())
    throw std::invalid_argument("range_finder: requires d < n");
  if (op.m() != y.cols())
    throw std::invalid_argument("range_finder: operator/matrix shape mismatch");
  if (q < 0) throw std::invalid_argument("range_finder: q must be >= 0");

  Matrix t = op.apply_right(y);  // n x d
  for (int iter = 0; iter < q; ++iter) {
    t = linalg::orthonormal_columns(std::move(t));
    Matrix w = linalg::orthonormal_columns(y.transpose() * t);  // m x d
    t.noalias() = y * w;
  }
  auto [qmat, rank] = linalg::qr_range(std::move(t));
  if (detected_rank) *detected_rank = rank;
  return std::move(qmat);
}

RsvdResult randomized_svd(const Matrix& y, const sketch::SketchOperator& op, int q) {
  Index rank = 0;
  const Matrix qmat = range_finder(y, op, q, &rank);
  const Matrix b = qmat.transpose() * y;  // d x m, the only SVD input
  auto svd = linalg::thin_svd(b);
  RsvdResult out;
  out.u_hat.noalias() = qmat * svd.u;
  out.sing_vals = std::move(svd.s);
  out.v_hat = std::move(svd.v);
  out.q_used = q;
  out.range_rank = rank;
  return out;
}

Vector randomized_singular_values(const Matrix& y, const sketch::SketchOperator& op,
                                  int q) {
  const Matrix qmat = range_finder(y, op, q);
  return linalg::singular_values(qmat.transpose() * y);
}

RsvdResult full_svd_reference(const Matrix& y, Index k) {
  if (k < 0 || k > std::min(y.rows(), y.cols()))
    throw std::invalid_argument("full_svd_reference: k out of range");
  auto svd = linalg::thin_svd(y);
  RsvdResult out;
  out.u_hat = svd.u.leftCols(k);
  out.sing_vals = svd.s.head(k);
  out.v_hat = svd.v.leftCols(k);
  out.q_used = 0;
  out.range_rank = k;
  return out;
}

}  // namespace rsvd
