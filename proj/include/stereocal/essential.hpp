#pragma once

#include <cstdint>

#include "stereocal/correspondences.hpp"
#include "stereocal/geometry.hpp"
#include "stereocal/montecarlo.hpp"

namespace stereocal {

/// Knobs of estimate_essential.  The explicit seed keeps concurrent
/// estimations reproducible.
struct EssentialEstimateOptions {
  std::uint64_t seed = 0;
  /// Random angle tuples tried when fewer than 8 pairs rule out the
  /// linear initialization.
  int coarse_samples = 50000;
  /// Schedule of the local refinement stage (seed is overridden).
  MonteCarloConfig refine{};
};

/// Estimates the essential matrix from pixel correspondences.
///
/// With N >= 8 pairs the start point is the algebraic least-squares
/// solution of q1^T E q2 = 0; with 5 <= N < 8 a coarse random search over
/// the five-angle pose parametrization stands in for it.  The start point
/// is projected onto the essential manifold (singular values averaged to
/// (s, s, 0)) and then refined by the same random-walk schedule used for
/// calibration, minimizing the sum of squared residuals.  The result is
/// built as [t]x R from the refined angles, so it satisfies the essential
/// invariants exactly, and is returned in canonical scale/sign
/// (||E||_F = sqrt(2), first nonzero entry positive).
///
/// Throws InsufficientCorrespondences for N < 5 and
/// DegenerateConfiguration when the constraint system is rank-deficient
/// (coplanar or collinear geometry, repeated points).
EssentialMatrix estimate_essential(const CorrespondenceSet2D& corr,
                                   const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                                   const EssentialEstimateOptions& options = {});

/// Selects among the four algebraic factorizations of E the pose for which
/// the majority of `corr` triangulates in front of both cameras, and scales
/// the translation to the measured baseline.  Throws AmbiguousCheirality
/// when no candidate reaches a 60% vote.
Extrinsics decompose_essential(const EssentialMatrix& e, double baseline,
                               const CorrespondenceSet2D& corr, const CameraIntrinsics& k1,
                               const CameraIntrinsics& k2);

}  // namespace stereocal
