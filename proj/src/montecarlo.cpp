#include "stereocal/montecarlo.hpp"

#include <cmath>

#include "stereocal/rng.hpp"
#include "stereocal/triangulation.hpp"

namespace stereocal {

namespace {

double& angle_component(ExtrinsicAngles& a, int index) {
  switch (index) {
    case 0: return a.alpha;
    case 1: return a.beta;
    case 2: return a.gamma;
    case 3: return a.delta;
    default: return a.epsilon;
  }
}

void validate(const MonteCarloConfig& c) {
  if (!(c.delta0 > 0.0) || !(c.delta_min > 0.0) || c.delta_min > c.delta0) {
    throw ConfigError("require 0 < delta_min <= delta0");
  }
  if (!(c.decay > 0.0) || !(c.decay < 1.0)) {
    throw ConfigError("decay must lie in (0, 1)");
  }
  if (!(c.acceptance_threshold > 0.0) || !(c.acceptance_threshold < 1.0)) {
    throw ConfigError("acceptance threshold must lie in (0, 1)");
  }
  if (c.min_level_iterations < 1) {
    throw ConfigError("warm-up iteration count must be positive");
  }
}

}  // namespace

MinimizeResult minimize(const ExtrinsicAngles& initial, const CostFunction& cost,
                        const MonteCarloConfig& config) {
  validate(config);

  MinimizeResult out;
  out.angles = initial;
  out.cost = cost(initial);
  if (!std::isfinite(out.cost)) {
    throw NonFiniteCost("initial cost is not finite");
  }

  Rng rng(config.seed);
  double delta = config.delta0;
  out.trace.delta_levels.push_back(delta);

  std::uint64_t iteration = 0;
  std::uint64_t level_iterations = 0;
  std::uint64_t level_accepted = 0;

  for (;;) {
    // Two draws per iteration, in this fixed order.
    const int index = rng.next_index(5);
    const double sign = rng.next_sign();

    ExtrinsicAngles candidate = out.angles;
    angle_component(candidate, index) += sign * delta;
    const double candidate_cost = cost(candidate);
    if (!std::isfinite(candidate_cost)) {
      throw NonFiniteCost("cost is not finite at a proposed point");
    }

    ++iteration;
    ++level_iterations;
    if (candidate_cost < out.cost) {  // ties count as rejections
      out.angles = candidate;
      out.cost = candidate_cost;
      ++level_accepted;
      out.trace.accepted.push_back({iteration, delta, candidate, candidate_cost});
    }

    if (level_iterations >= static_cast<std::uint64_t>(config.min_level_iterations)) {
      const double ratio =
          static_cast<double>(level_accepted) / static_cast<double>(level_iterations);
      if (ratio < config.acceptance_threshold) {
        delta *= config.decay;
        level_iterations = 0;
        level_accepted = 0;
        if (delta < config.delta_min) break;
        out.trace.delta_levels.push_back(delta);
      }
    }
  }

  out.trace.total_iterations = iteration;
  return out;
}

double cost_reprojection(const ExtrinsicAngles& angles, const CorrespondenceSet2D& corr,
                         const CameraIntrinsics& k1, const CameraIntrinsics& k2) {
  const Extrinsics pose = pose_from_angles(angles);
  const ProjectionMatrix p1 = projection_matrix(k1);
  const ProjectionMatrix p2 = projection_matrix(k2, pose);

  double total = 0.0;
  for (const PixelPair& pair : corr) {
    try {
      const Reconstruction rec =
          reconstruct_pair(k1, k2, pose, pair.q1, pair.q2);
      if (!rec.in_front) {
        total += kDegeneratePenalty;
        continue;
      }
      const Pixel2 r1 = project(p1, rec.point);
      const Pixel2 r2 = project(p2, rec.point);
      total += std::hypot(r1.u - pair.q1.u, r1.v - pair.q1.v) +
               std::hypot(r2.u - pair.q2.u, r2.v - pair.q2.v);
    } catch (const ParallelRays&) {
      total += kDegeneratePenalty;
    } catch (const PointAtInfinity&) {
      total += kDegeneratePenalty;
    }
  }
  return total;
}

double cost_reconstruction(const ExtrinsicAngles& angles, const CorrespondenceSet3D& corr,
                           const CameraIntrinsics& k1, const CameraIntrinsics& k2) {
  const Extrinsics pose = pose_from_angles(angles);

  double total = 0.0;
  for (const TargetPairObservation& obs : corr) {
    try {
      const Reconstruction ra = reconstruct_pair(k1, k2, pose, obs.a.q1, obs.a.q2);
      const Reconstruction rb = reconstruct_pair(k1, k2, pose, obs.b.q1, obs.b.q2);
      if (!ra.in_front || !rb.in_front) {
        total += kDegeneratePenalty;
        continue;
      }
      total += std::abs(obs.distance - (ra.point - rb.point).norm());
    } catch (const ParallelRays&) {
      total += kDegeneratePenalty;
    }
  }
  return total;
}

}  // namespace stereocal
