#include "rsvd/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rsvd/linalg.hpp"
#include "rsvd/rng.hpp"

namespace rsvd::sketch {

namespace {

bool is_power_of_two(Index m) { return m > 0 && (m & (m - 1)) == 0; }

// In-place fast Walsh-Hadamard transform (unnormalized).
void fwht(double* data, Index m) {
  for (Index h = 1; h < m; h <<= 1) {
    for (Index i = 0; i < m; i += h << 1) {
      for (Index j = i; j < i + h; ++j) {
        const double x = data[j];
        const double y = data[j + h];
        data[j] = x + y;
        data[j + h] = x - y;
      }
    }
  }
}

// d distinct indices from [0, m), uniformly without replacement.
std::vector<Index> sample_without_replacement(Index d, Index m, Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < d; ++i) {
    const auto j = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(m - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(i + j)]);
  }
  pool.resize(static_cast<std::size_t>(d));
  return pool;
}

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed, std::uint64_t tag) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    Rng rng = Rng::stream(seed, tag, static_cast<std::uint64_t>(j));
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.next_gaussian();
  }
  return g;
}

}  // namespace

SketchKind kind_from_name(std::string_view name) {
  if (name == "gaussian") return SketchKind::gaussian_iid;
  if (name == "haar") return SketchKind::haar_projection;
  if (name == "srht") return SketchKind::srht;
  if (name == "coord") return SketchKind::coordinate_subsample;
  throw std::invalid_argument("sketch: unknown kind '" + std::string(name) + "'");
}

std::string_view kind_name(SketchKind kind) {
  switch (kind) {
    case SketchKind::gaussian_iid: return "gaussian";
    case SketchKind::haar_projection: return "haar";
    case SketchKind::srht: return "srht";
    case SketchKind::coordinate_subsample: return "coord";
  }
  return "?";
}

SketchOperator SketchOperator::make(SketchKind kind, Index d, Index m,
                                    std::uint64_t seed) {
  if (d < 1 || d >= m)
    throw std::invalid_argument("sketch: need 1 <= d < m");
  SketchOperator op;
  op.kind_ = kind;
  op.d_ = d;
  op.m_ = m;
  op.seed_ = seed;
  switch (kind) {
    case SketchKind::gaussian_iid:
      op.dense_ = gaussian_matrix(d, m, seed, stream_tag::sketch_column);
      break;
    case SketchKind::haar_projection: {
      // Orthonormal rows: QR of an m x d Gaussian with diag(R) > 0.
      Matrix g = gaussian_matrix(m, d, seed, stream_tag::sketch_column);
      op.dense_ = linalg::haar_orthonormal(std::move(g)).transpose();
      break;
    }
    case SketchKind::srht: {
      if (!is_power_of_two(m))
        throw std::invalid_argument("sketch: srht requires m to be a power of two");
      Rng rng = Rng::stream(seed, stream_tag::sketch_support, 0);
      op.signs_.resize(static_cast<std::size_t>(m));
      for (auto& s : op.signs_) s = rng.next_sign();
      op.rows_ = sample_without_replacement(d, m, rng);
      break;
    }
    case SketchKind::coordinate_subsample: {
      Rng rng = Rng::stream(seed, stream_tag::sketch_support, 0);
      op.rows_ = sample_without_replacement(d, m, rng);
      break;
    }
  }
  return op;
}

Matrix SketchOperator::apply_right(const Matrix& y) const {
  if (y.cols() != m_)
    throw std::invalid_argument("sketch::apply_right: input must have m columns");
  switch (kind_) {
    case SketchKind::gaussian_iid:
    case SketchKind::haar_projection:
      return y * dense_.transpose();
    case SketchKind::coordinate_subsample: {
      Matrix out(y.rows(), d_);
      for (Index j = 0; j < d_; ++j)
        out.col(j) = y.col(rows_[static_cast<std::size_t>(j)]);
      return out;
    }
    case SketchKind::srht: {
      Matrix out(y.rows(), d_);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m_));
      std::vector<double> buf(static_cast<std::size_t>(m_));
      for (Index i = 0; i < y.rows(); ++i) {
        for (Index j = 0; j < m_; ++j)
          buf[static_cast<std::size_t>(j)] = y(i, j) * signs_[static_cast<std::size_t>(j)];
        fwht(buf.data(), m_);
        for (Index j = 0; j < d_; ++j)
          out(i, j) = buf[static_cast<std::size_t>(rows_[static_cast<std::size_t>(j)])] * scale;
      }
      return out;
    }
  }
  throw std::logic_error("sketch::apply_right: unreachable");
}

Matrix SketchOperator::dense() const {
  switch (kind_) {
    case SketchKind::gaussian_iid:
    case SketchKind::haar_projection:
      return dense_;
    default:
      // Rows of the operator are apply_right(I_m)^T.
      return apply_right(Matrix::Identity(m_, m_)).transpose();
  }
}

Matrix SketchOperator::incoherence_stat(const Matrix& v) const {
  if (v.rows() != m_)
    throw std::invalid_argument("sketch::incoherence_stat: V must have m rows");
  const Index r = v.cols();
  const Matrix gram_v = v.transpose() * v;
  if ((gram_v - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("sketch::incoherence_stat: V must have orthonormal columns");

  // a = Omega * V (d x r), computed through the fast apply.
  const Matrix a = apply_right(v.transpose()).transpose();
  if (kind_ == SketchKind::gaussian_iid) {
    // Row-space projector needs the Gram inverse for non-orthonormal rows.
    const Matrix gram = dense_ * dense_.transpose();
    return a.transpose() * gram.llt().solve(a);
  }
  return a.transpose() * a;
}

}  // namespace rsvd::sketch
