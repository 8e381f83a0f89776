#pragma once

#include <span>
#include <vector>

#include "stereocal/correspondences.hpp"
#include "stereocal/geometry.hpp"
#include "stereocal/scene.hpp"

namespace stereocal {

/// Score samples with known correct/wrong labels, log10-transformed,
/// feeding the overlap estimator.
struct LabeledScores {
  std::vector<double> correct;
  std::vector<double> wrong;
};

/// Which matching score to compute for a correspondence.
enum class ScoreKind {
  residual,      ///< |q1^T E q2|
  reprojection,  ///< e1 + e2 after midpoint triangulation, pixels
};

/// Deliberately mismatched pairs built from the selected images:
///  - same image, opposite targets            (2 per image)
///  - different images, opposite targets      (2 per ordered image pair)
///  - different images, same target           (2 per ordered image pair)
/// For n images that is 2n + 4n(n-1) pairs -- 90 for the 5-image
/// validation split.  Disjoint by construction from the correct pairs.
/// Throws MissingTarget when an index does not name an image.
CorrespondenceSet2D build_wrong_set(const Dataset& dataset, std::span<const int> images);

/// Raw (not log) score per pair under the given calibration.  Degenerate
/// reprojections score kDegeneratePenalty instead of raising; the residual
/// variant is total on all inputs.
std::vector<double> score_correspondences(const CorrespondenceSet2D& corr,
                                          const EssentialMatrix& e, const Extrinsics& pose,
                                          const CameraIntrinsics& k1,
                                          const CameraIntrinsics& k2, ScoreKind kind);

/// log10 with scores of exactly 0 clamped to 1e-15 first.
double log10_clamped(double score);

/// Fraction of common probability mass of the two score distributions
/// ("false-correspondence probability").  Histogram estimator on the
/// shared support with Freedman-Diaconis bin width computed from the
/// pooled sample; the overlap is the sum over bins of the smaller
/// normalized frequency.  Exactly 0 for disjoint supports, exactly 1 for
/// identical samples.  Both lists must be non-empty.
double fcp(const LabeledScores& scores);

/// Relative bar-length reconstruction error per entry.
std::vector<double> percentage_errors(const CorrespondenceSet3D& corr, const Extrinsics& pose,
                                      const CameraIntrinsics& k1, const CameraIntrinsics& k2);

}  // namespace stereocal
