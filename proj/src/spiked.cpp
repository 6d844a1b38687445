#include "rsvd/spiked.hpp"

#include <cmath>
#include <stdexcept>

#include "rsvd/linalg.hpp"
#include "rsvd/rng.hpp"

namespace rsvd::spiked {

namespace {

Matrix haar_frame(Index rows, Index r, std::uint64_t seed, std::uint64_t tag) {
  Matrix g(rows, r);
  for (Index j = 0; j < r; ++j) {
    Rng rng = Rng::stream(seed, tag, static_cast<std::uint64_t>(j));
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.next_gaussian();
  }
  return linalg::haar_orthonormal(std::move(g));
}

Matrix noise_matrix(Index n, Index m, NoiseKind kind, std::uint64_t seed) {
  Matrix z(n, m);
  const double scale =
      1.0 / std::pow(static_cast<double>(n) * static_cast<double>(m), 0.25);
  for (Index j = 0; j < m; ++j) {
    Rng rng = Rng::stream(seed, stream_tag::noise, static_cast<std::uint64_t>(j));
    switch (kind) {
      case NoiseKind::gaussian:
        for (Index i = 0; i < n; ++i) z(i, j) = scale * rng.next_gaussian();
        break;
      case NoiseKind::rademacher:
        for (Index i = 0; i < n; ++i) z(i, j) = scale * rng.next_sign();
        break;
      case NoiseKind::student_t5:
        for (Index i = 0; i < n; ++i) z(i, j) = scale * rng.next_student_t5_unit();
        break;
    }
  }
  return z;
}

void validate_spikes(const Vector& spikes, Index n, Index m) {
  if (spikes.size() > std::min(n, m))
    throw std::invalid_argument("spiked: rank exceeds min(n, m)");
  for (Index i = 0; i < spikes.size(); ++i) {
    if (!(spikes(i) > 0.0))
      throw std::invalid_argument("spiked: spike intensities must be positive");
    if (i > 0 && !(spikes(i) < spikes(i - 1)))
      throw std::invalid_argument("spiked: spikes must be strictly decreasing");
  }
}

}  // namespace

NoiseKind noise_from_name(std::string_view name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "rademacher") return NoiseKind::rademacher;
  if (name == "student5") return NoiseKind::student_t5;
  throw std::invalid_argument("spiked: unknown noise kind '" + std::string(name) + "'");
}

std::string_view noise_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::rademacher: return "rademacher";
    case NoiseKind::student_t5: return "student5";
  }
  return "?";
}

SpikedInstance sample_spiked(Index n, Index m, const Vector& spikes, NoiseKind kind,
                             std::uint64_t seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("spiked: dimensions must be >= 1");
  validate_spikes(spikes, n, m);
  const Index r = spikes.size();
  SpikedInstance inst;
  inst.n = n;
  inst.m = m;
  inst.spikes = spikes;
  inst.noise_kind = kind;
  inst.u_factors = r > 0 ? haar_frame(n, r, seed, stream_tag::signal_u) : Matrix(n, 0);
  inst.v_factors = r > 0 ? haar_frame(m, r, seed, stream_tag::signal_v) : Matrix(m, 0);
  inst.y = noise_matrix(n, m, kind, seed);
  if (r > 0)
    inst.y.noalias() +=
        inst.u_factors * spikes.asDiagonal() * inst.v_factors.transpose();
  return inst;
}

SpikedInstance assemble_spiked(Matrix u, Matrix v, Vector spikes, NoiseKind kind,
                               std::uint64_t seed) {
  const Index n = u.rows();
  const Index m = v.rows();
  if (u.cols() != spikes.size() || v.cols() != spikes.size())
    throw std::invalid_argument("spiked: factor/spike shape mismatch");
  validate_spikes(spikes, n, m);
  SpikedInstance inst;
  inst.n = n;
  inst.m = m;
  inst.spikes = std::move(spikes);
  inst.noise_kind = kind;
  inst.u_factors = std::move(u);
  inst.v_factors = std::move(v);
  inst.y = noise_matrix(n, m, kind, seed);
  inst.y.noalias() +=
      inst.u_factors * inst.spikes.asDiagonal() * inst.v_factors.transpose();
  return inst;
}

OverlapMatrix measure_overlaps(const SpikedInstance& inst, const RsvdResult& res,
                               Index r_track) {
  if (r_track > inst.spikes.size() || r_track > res.sing_vals.size())
    throw std::invalid_argument("spiked::measure_overlaps: r_track out of range");
  OverlapMatrix out;
  out.u = inst.u_factors.leftCols(r_track).transpose() * res.u_hat.leftCols(r_track);
  out.v = inst.v_factors.leftCols(r_track).transpose() * res.v_hat.leftCols(r_track);
  return out;
}

}  // namespace rsvd::spiked
