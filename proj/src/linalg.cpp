#include "rsvd/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rsvd::linalg {

namespace {

void check_info(int info, const char* routine) {
  if (info != 0)
    throw std::runtime_error(std::string("linalg: ") + routine +
                             " failed with info = " + std::to_string(info));
}

}  // namespace

QrRange qr_range(Matrix a) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  if (rows < cols)
    throw std::invalid_argument("linalg::qr_range: need rows >= cols");
  std::vector<double> tau(static_cast<std::size_t>(cols));
  check_info(LAPACKE_dgeqrf(LAPACK_COL_MAJOR, rows, cols, a.data(), rows, tau.data()),
             "dgeqrf");
  double rmax = 0.0;
  for (lapack_int j = 0; j < cols; ++j) rmax = std::max(rmax, std::abs(a(j, j)));
  const double tol = rmax * static_cast<double>(std::max(rows, cols)) * 1e-14;
  Index rank = 0;
  for (lapack_int j = 0; j < cols; ++j)
    if (std::abs(a(j, j)) > tol) ++rank;
  check_info(LAPACKE_dorgqr(LAPACK_COL_MAJOR, rows, cols, cols, a.data(), rows,
                            tau.data()),
             "dorgqr");
  return {std::move(a), rank};
}

Matrix orthonormal_columns(Matrix a) { return qr_range(std::move(a)).q; }

Matrix haar_orthonormal(Matrix a) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  if (rows < cols)
    throw std::invalid_argument("linalg::haar_orthonormal: need rows >= cols");
  std::vector<double> tau(static_cast<std::size_t>(cols));
  check_info(LAPACKE_dgeqrf(LAPACK_COL_MAJOR, rows, cols, a.data(), rows, tau.data()),
             "dgeqrf");
  std::vector<double> sign(static_cast<std::size_t>(cols));
  for (lapack_int j = 0; j < cols; ++j)
    sign[static_cast<std::size_t>(j)] = a(j, j) < 0.0 ? -1.0 : 1.0;
  check_info(LAPACKE_dorgqr(LAPACK_COL_MAJOR, rows, cols, cols, a.data(), rows,
                            tau.data()),
             "dorgqr");
  for (lapack_int j = 0; j < cols; ++j)
    a.col(j) *= sign[static_cast<std::size_t>(j)];
  return a;
}

ThinSvd thin_svd(const Matrix& a) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(rows, cols);
  Matrix work = a;
  Matrix u(rows, k);
  Matrix vt(k, cols);
  Vector s(k);
  check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', rows, cols, work.data(), rows,
                            s.data(), u.data(), rows, vt.data(), k),
             "dgesdd");
  return {std::move(u), std::move(s), vt.transpose()};
}

Vector singular_values(const Matrix& a) {
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(rows, cols);
  Matrix work = a;
  Vector s(k);
  check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, work.data(), rows,
                            s.data(), nullptr, rows, nullptr, k),
             "dgesdd");
  return s;
}

}  // namespace rsvd::linalg
