#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stereocal/correspondences.hpp"
#include "stereocal/geometry.hpp"

namespace stereocal {

/// Schedule of the adaptive random-walk minimizer.
struct MonteCarloConfig {
  double delta0 = 1e-3;                ///< initial step, radians
  double decay = 0.75;                 ///< multiplicative step decrease
  double acceptance_threshold = 0.2;   ///< ratio below which the step shrinks
  double delta_min = 1e-6;             ///< terminal step, radians
  int min_level_iterations = 50;       ///< warm-up before the ratio is consulted
  std::uint64_t seed = 0;              ///< stream seed for the proposal draws
};

/// Scalar objective over the five pose angles.  The baseline field is
/// passed through unchanged; implementations may rely on it but must not
/// treat it as a free parameter.
using CostFunction = std::function<double(const ExtrinsicAngles&)>;

/// One accepted downhill move.
struct AcceptedMove {
  std::uint64_t iteration = 0;  ///< 1-based global iteration index
  double delta = 0.0;           ///< step size in force when accepted
  ExtrinsicAngles angles;
  double cost = 0.0;
};

/// Complete, replayable record of a minimization.
struct MinimizeTrace {
  std::vector<AcceptedMove> accepted;  ///< strictly decreasing in cost
  std::vector<double> delta_levels;    ///< every step size visited
  std::uint64_t total_iterations = 0;
};

struct MinimizeResult {
  ExtrinsicAngles angles;
  double cost = 0.0;
  MinimizeTrace trace;
};

/// Adaptive random-walk descent over (alpha, beta, gamma, delta, epsilon).
///
/// Each iteration perturbs one uniformly chosen angle by +-delta (two
/// generator draws: index, sign) and accepts the move only on a strict cost
/// decrease.  Whenever the acceptance ratio since the last step change
/// drops below the threshold -- consulted only after the warm-up count --
/// the step is multiplied by `decay`, counters reset, and the walk ends
/// once the step falls below `delta_min`.  The baseline is never mutated.
/// Throws NonFiniteCost if the initial or any proposed cost is NaN/inf,
/// ConfigError on a nonsensical schedule.
MinimizeResult minimize(const ExtrinsicAngles& initial, const CostFunction& cost,
                        const MonteCarloConfig& config);

/// Penalty charged per correspondence whose reconstruction is degenerate
/// (parallel rays, behind a camera, reprojection at infinity).  Keeps the
/// objectives total so the walk can leave bad regions instead of throwing.
inline constexpr double kDegeneratePenalty = 1e6;

/// Sum over all pairs of both cameras' reprojection errors, pixels.
double cost_reprojection(const ExtrinsicAngles& angles, const CorrespondenceSet2D& corr,
                         const CameraIntrinsics& k1, const CameraIntrinsics& k2);

/// Sum over all entries of |D - D_rec|, meters.
double cost_reconstruction(const ExtrinsicAngles& angles, const CorrespondenceSet3D& corr,
                           const CameraIntrinsics& k1, const CameraIntrinsics& k2);

}  // namespace stereocal
