#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rsvd/common.hpp"

namespace rsvd::sketch {

enum class SketchKind { gaussian_iid, haar_projection, srht, coordinate_subsample };

/// CLI vocabulary: "gaussian", "haar", "srht", "coord".
SketchKind kind_from_name(std::string_view name);
std::string_view kind_name(SketchKind kind);

/// A seeded d x m sketching operator. Immutable after construction; all apply
/// operations are read-only and safe to call concurrently.
///
/// Gaussian entries are unnormalized (variance 1): the reduced matrix depends
/// on the operator only through its row space, so scaling is immaterial.
/// haar_projection and srht have exactly orthonormal rows; coordinate rows
/// are distinct standard basis vectors. srht requires m to be a power of two
/// and applies the transform in O(m log m) per row without materializing the
/// operator. Construction is deterministic in (kind, d, m, seed), with entry
/// streams derived per column (see rsvd/rng.hpp).
class SketchOperator {
 public:
  static SketchOperator make(SketchKind kind, Index d, Index m, std::uint64_t seed);

  SketchKind kind() const { return kind_; }
  Index d() const { return d_; }
  Index m() const { return m_; }
  std::uint64_t seed() const { return seed_; }

  /// Y * Omega^T for an n x m input; returns n x d.
  Matrix apply_right(const Matrix& y) const;

  /// Dense d x m materialization (intended for small m: tests, diagnostics).
  Matrix dense() const;

  /// Gram matrix of the projections of V's orthonormal columns onto the row
  /// space of Omega: G_ij = <P v_i, P v_j> with P the row-space projector.
  /// Under the incoherence condition this approaches beta * I. V must have
  /// orthonormal columns (tolerance 1e-8).
  Matrix incoherence_stat(const Matrix& v) const;

 private:
  SketchOperator() = default;

  SketchKind kind_ = SketchKind::gaussian_iid;
  Index d_ = 0;
  Index m_ = 0;
  std::uint64_t seed_ = 0;
  Matrix dense_;                     // gaussian / haar rows
  std::vector<double> signs_;        // srht
  std::vector<Index> rows_;          // srht / coordinate sampled indices
};

}  // namespace rsvd::sketch
