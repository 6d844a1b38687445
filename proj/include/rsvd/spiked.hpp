#pragma once

#include <cstdint>
#include <string_view>

#include "rsvd/common.hpp"
#include "rsvd/rsvd.hpp"

namespace rsvd::spiked {

enum class NoiseKind { gaussian, rademacher, student_t5 };

/// CLI vocabulary: "gaussian", "rademacher", "student5".
NoiseKind noise_from_name(std::string_view name);
std::string_view noise_name(NoiseKind kind);

/// A concrete finite-n draw of the spiked model Y = X + Z with
/// X = U diag(spikes) V^T. All noise kinds are scaled to entry variance
/// 1/sqrt(n*m); Student-t(5) is standardized to unit variance first.
struct SpikedInstance {
  Index n = 0;
  Index m = 0;
  Vector spikes;    // r, strictly decreasing positive
  Matrix u_factors; // n x r, orthonormal columns
  Matrix v_factors; // m x r, orthonormal columns
  Matrix y;         // n x m
  NoiseKind noise_kind = NoiseKind::gaussian;
};

/// Draw an instance with uniformly random (Haar) spike directions.
SpikedInstance sample_spiked(Index n, Index m, const Vector& spikes, NoiseKind kind,
                             std::uint64_t seed);

/// Injection hook for structured spike directions: u (n x r) and v (m x r)
/// must have orthonormal columns; only the noise is drawn.
SpikedInstance assemble_spiked(Matrix u, Matrix v, Vector spikes, NoiseKind kind,
                               std::uint64_t seed);

/// Raw signed inner products <u_i, u_hat_j> and <v_i, v_hat_j> for
/// i, j < r_track.
struct OverlapMatrix {
  Matrix u;  // r_track x r_track
  Matrix v;
};

OverlapMatrix measure_overlaps(const SpikedInstance& inst, const RsvdResult& res,
                               Index r_track);

}  // namespace rsvd::spiked
