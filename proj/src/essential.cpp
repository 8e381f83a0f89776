#include "stereocal/essential.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SVD>

#include "stereocal/rng.hpp"
#include "stereocal/triangulation.hpp"

namespace stereocal {

namespace {

struct NormalizedPairs {
  std::vector<NormalizedPoint2> q1;
  std::vector<NormalizedPoint2> q2;
};

NormalizedPairs normalize_all(const CorrespondenceSet2D& corr, const CameraIntrinsics& k1,
                              const CameraIntrinsics& k2) {
  NormalizedPairs n;
  n.q1.reserve(corr.size());
  n.q2.reserve(corr.size());
  for (const PixelPair& pair : corr) {
    n.q1.push_back(normalize(k1, pair.q1));
    n.q2.push_back(normalize(k2, pair.q2));
  }
  return n;
}

double squared_residual_sum(const EssentialMatrix& e, const NormalizedPairs& n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n.q1.size(); ++i) {
    const double r = residual(e, n.q1[i], n.q2[i]);
    total += r * r;
  }
  return total;
}

/// Four pose candidates (x2 = R x1 + T convention, unit baseline)
/// corresponding to the algebraic factorizations E = [t]x R'.
std::array<Extrinsics, 4> pose_candidates(const EssentialMatrix& e) {
  Eigen::JacobiSVD<Matrix3d> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3d u = svd.matrixU();
  Matrix3d v = svd.matrixV();
  // Sign flips of the null-space columns leave E unchanged (they meet the
  // zero singular value) but make both determinants +1.
  if (u.determinant() < 0.0) u.col(2) *= -1.0;
  if (v.determinant() < 0.0) v.col(2) *= -1.0;

  Matrix3d w;
  w << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Matrix3d r1 = u * w * v.transpose();
  const Matrix3d r2 = u * w.transpose() * v.transpose();
  const Vector3d t = u.col(2);

  // A factorization (R', t') of E describes the secondary-to-primary
  // transform; the forward extrinsics are R = R'^T, T = -R'^T t'.
  std::array<Extrinsics, 4> out;
  int i = 0;
  for (const Matrix3d& r : {r1, r2}) {
    for (const double sign : {1.0, -1.0}) {
      out[i].R = r.transpose();
      out[i].T = -r.transpose() * (sign * t);
      ++i;
    }
  }
  return out;
}

double in_front_fraction(const Extrinsics& pose, const CorrespondenceSet2D& corr,
                         const CameraIntrinsics& k1, const CameraIntrinsics& k2) {
  int in_front = 0;
  for (const PixelPair& pair : corr) {
    try {
      if (reconstruct_pair(k1, k2, pose, pair.q1, pair.q2).in_front) ++in_front;
    } catch (const ParallelRays&) {
      // counts as not in front
    }
  }
  return static_cast<double>(in_front) / static_cast<double>(corr.size());
}

EssentialMatrix essential_from_angles(const ExtrinsicAngles& a) {
  return essential_from_extrinsics(pose_from_angles(a));
}

/// Algebraic least-squares start point: the null vector of the stacked
/// constraint rows q1^T E q2 = 0, E read off row-major.
EssentialMatrix linear_start(const NormalizedPairs& n, const Tolerances& tol) {
  const int count = static_cast<int>(n.q1.size());
  Eigen::MatrixXd a(count, 9);
  for (int i = 0; i < count; ++i) {
    const double x1 = n.q1[i].x, y1 = n.q1[i].y;
    const double x2 = n.q2[i].x, y2 = n.q2[i].y;
    a.row(i) << x1 * x2, x1 * y2, x1, y1 * x2, y1 * y2, y1, x2, y2, 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(0) <= 0.0 || s(7) <= tol.rank * s(0)) {
    throw DegenerateConfiguration(
        "correspondence geometry does not determine the essential matrix");
  }
  const Eigen::VectorXd e = svd.matrixV().col(8);
  EssentialMatrix out;
  out << e(0), e(1), e(2), e(3), e(4), e(5), e(6), e(7), e(8);
  return out;
}

/// Start point for 5..7 pairs: best of `samples` random five-angle tuples.
EssentialMatrix coarse_search_start(const NormalizedPairs& n, int samples,
                                    std::uint64_t seed, const Tolerances& tol) {
  // Degeneracy still shows up as rank collapse of the constraint rows.
  const int count = static_cast<int>(n.q1.size());
  Eigen::MatrixXd a(count, 9);
  for (int i = 0; i < count; ++i) {
    const double x1 = n.q1[i].x, y1 = n.q1[i].y;
    const double x2 = n.q2[i].x, y2 = n.q2[i].y;
    a.row(i) << x1 * x2, x1 * y2, x1, y1 * x2, y1 * y2, y1, x2, y2, 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(0) <= 0.0 || s(count - 1) <= tol.rank * s(0)) {
    throw DegenerateConfiguration(
        "correspondence geometry does not determine the essential matrix");
  }

  constexpr double pi = std::numbers::pi;
  Rng rng(seed);
  double best_cost = std::numeric_limits<double>::infinity();
  EssentialMatrix best = EssentialMatrix::Zero();
  for (int i = 0; i < samples; ++i) {
    ExtrinsicAngles angles;
    angles.alpha = rng.next_uniform(-pi, pi);
    angles.beta = rng.next_uniform(-pi / 2.0, pi / 2.0);
    angles.gamma = rng.next_uniform(-pi, pi);
    angles.delta = rng.next_uniform(-pi / 2.0, pi / 2.0);
    angles.epsilon = rng.next_uniform(-pi, pi);
    const EssentialMatrix e = essential_from_angles(angles);
    const double c = squared_residual_sum(e, n);
    if (c < best_cost) {
      best_cost = c;
      best = e;
    }
  }
  return best;
}

}  // namespace

EssentialMatrix estimate_essential(const CorrespondenceSet2D& corr,
                                   const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                                   const EssentialEstimateOptions& options) {
  if (corr.size() < 5) {
    throw InsufficientCorrespondences("essential estimation needs at least 5 pairs, got " +
                                      std::to_string(corr.size()));
  }
  const Tolerances& tol = default_tolerances();
  const NormalizedPairs n = normalize_all(corr, k1, k2);

  EssentialMatrix start =
      corr.size() >= 8 ? linear_start(n, tol)
                       : coarse_search_start(n, options.coarse_samples,
                                             derive_seed(options.seed, 1), tol);

  // Project onto the essential manifold: equalize the top two singular
  // values, zero the third.
  {
    Eigen::JacobiSVD<Matrix3d> svd(start, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector3d s = svd.singularValues();
    const double sigma = 0.5 * (s(0) + s(1));
    start = svd.matrixU() * Vector3d(sigma, sigma, 0.0).asDiagonal() *
            svd.matrixV().transpose();
  }

  // Walk the five-angle parametrization down the squared-residual sum.
  // All four factorizations reproduce +-E and therefore the same cost, so
  // the first candidate is as good a start as any.
  ExtrinsicAngles start_angles =
      angles_from_pose(pose_candidates(start)[0], GimbalPolicy::resolve);

  MonteCarloConfig mc = options.refine;
  mc.seed = derive_seed(options.seed, 2);
  const MinimizeResult refined = minimize(
      start_angles,
      [&n](const ExtrinsicAngles& a) { return squared_residual_sum(essential_from_angles(a), n); },
      mc);

  return canonicalize_essential(essential_from_angles(refined.angles));
}

Extrinsics decompose_essential(const EssentialMatrix& e, double baseline,
                               const CorrespondenceSet2D& corr, const CameraIntrinsics& k1,
                               const CameraIntrinsics& k2) {
  if (!(baseline > 0.0)) {
    throw ConfigError("baseline must be positive");
  }
  if (!is_essential(e)) {
    throw ConfigError("matrix does not satisfy the essential invariants");
  }
  if (corr.empty()) {
    throw InsufficientCorrespondences("cheirality vote needs at least one pair");
  }

  const std::array<Extrinsics, 4> candidates = pose_candidates(e);
  double best_fraction = -1.0;
  int best = 0;
  for (int i = 0; i < 4; ++i) {
    const double f = in_front_fraction(candidates[i], corr, k1, k2);
    if (f > best_fraction) {
      best_fraction = f;
      best = i;
    }
  }
  if (best_fraction < 0.6) {
    throw AmbiguousCheirality("no factorization places 60% of points in front of both "
                              "cameras; best fraction " +
                              std::to_string(best_fraction));
  }

  Extrinsics out = candidates[best];
  out.T *= baseline;  // candidates carry a unit baseline
  return out;
}

}  // namespace stereocal
