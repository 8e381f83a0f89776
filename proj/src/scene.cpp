#include "stereocal/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "stereocal/rng.hpp"

namespace stereocal {

namespace {

bool inside(const Pixel2& q, const SensorBounds& s) {
  return q.u >= 0.0 && q.u <= s.width && q.v >= 0.0 && q.v <= s.height;
}

void validate(const SceneConfig& c) {
  if (c.n_images <= 0) throw ConfigError("n_images must be positive");
  if (!(c.target_distance > 0.0)) throw ConfigError("target distance must be positive");
  if (!(c.truth.baseline > 0.0)) throw ConfigError("baseline must be positive");
  if (c.noise_sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
  if (!(c.volume.half_extent.minCoeff() > 0.0)) {
    throw ConfigError("placement volume must have positive extent");
  }
  if (c.max_attempts_per_image < 1) throw ConfigError("attempt budget must be positive");
}

}  // namespace

SceneConfig SceneConfig::defaults() {
  SceneConfig c;
  c.k1 = {3500.0, 0.0, 1024.0, 544.0};
  c.k2 = c.k1;

  // Secondary camera 4 m to the side of the primary, yawed so both optical
  // axes meet at the working-volume center.
  const double yaw = std::atan2(4.0, 6.0);
  c.truth.alpha = yaw;
  c.truth.beta = 0.0;
  c.truth.gamma = 0.0;
  c.truth.delta = yaw;              // T = 4 (-cos yaw, 0, sin yaw)
  c.truth.epsilon = std::numbers::pi;
  c.truth.baseline = 4.0;
  return c;
}

Dataset generate(const SceneConfig& config) {
  validate(config);

  const Extrinsics pose = pose_from_angles(config.truth);
  const ProjectionMatrix p1 = projection_matrix(config.k1);
  const ProjectionMatrix p2 = projection_matrix(config.k2, pose);

  Dataset out;
  out.baseline = config.truth.baseline;
  out.target_distance = config.target_distance;
  out.k1 = config.k1;
  out.k2 = config.k2;
  out.truth_angles = config.truth;
  out.images.reserve(config.n_images);
  out.truth_targets.reserve(config.n_images);

  Rng rng(config.seed);
  const double half = 0.5 * config.target_distance;

  for (int image = 0; image < config.n_images; ++image) {
    bool placed = false;
    for (int attempt = 0; attempt < config.max_attempts_per_image && !placed; ++attempt) {
      Point3 mid;
      for (int axis = 0; axis < 3; ++axis) {
        mid(axis) = config.volume.center(axis) +
                    rng.next_uniform(-config.volume.half_extent(axis),
                                     config.volume.half_extent(axis));
      }
      // Uniform bar direction on the sphere.
      const double z = rng.next_uniform(-1.0, 1.0);
      const double phi = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Vector3d dir(r * std::cos(phi), r * std::sin(phi), z);

      const Point3 a = mid - half * dir;
      const Point3 b = mid + half * dir;
      if (projective_depth(p1, a) <= 0.0 || projective_depth(p2, a) <= 0.0 ||
          projective_depth(p1, b) <= 0.0 || projective_depth(p2, b) <= 0.0) {
        continue;
      }

      ImageRecord rec;
      rec.a.q1 = project(p1, a);
      rec.a.q2 = project(p2, a);
      rec.b.q1 = project(p1, b);
      rec.b.q2 = project(p2, b);
      for (Pixel2* q : {&rec.a.q1, &rec.a.q2, &rec.b.q1, &rec.b.q2}) {
        q->u += config.noise_sigma * rng.next_gaussian();
        q->v += config.noise_sigma * rng.next_gaussian();
      }
      if (!inside(rec.a.q1, config.sensor1) || !inside(rec.b.q1, config.sensor1) ||
          !inside(rec.a.q2, config.sensor2) || !inside(rec.b.q2, config.sensor2)) {
        continue;
      }

      out.images.push_back(rec);
      out.truth_targets.push_back({a, b});
      placed = true;
    }
    if (!placed) {
      throw PlacementExhausted("no acceptable placement for image " +
                               std::to_string(image) + " within " +
                               std::to_string(config.max_attempts_per_image) + " attempts");
    }
  }
  return out;
}

namespace {

const ImageRecord& image_at(const Dataset& dataset, int index) {
  if (index < 0 || index >= dataset.n_images()) {
    throw MissingTarget("image " + std::to_string(index) + " not present in dataset of " +
                        std::to_string(dataset.n_images()) + " images");
  }
  return dataset.images[static_cast<std::size_t>(index)];
}

}  // namespace

CorrespondenceSet2D correspondences_2d(const Dataset& dataset, std::span<const int> images) {
  CorrespondenceSet2D out;
  out.reserve(2 * images.size());
  for (const int index : images) {
    const ImageRecord& rec = image_at(dataset, index);
    out.push_back(rec.a);
    out.push_back(rec.b);
  }
  return out;
}

CorrespondenceSet3D correspondences_3d(const Dataset& dataset, std::span<const int> images) {
  CorrespondenceSet3D out;
  out.reserve(images.size());
  for (const int index : images) {
    const ImageRecord& rec = image_at(dataset, index);
    out.push_back({dataset.target_distance, rec.a, rec.b});
  }
  return out;
}

}  // namespace stereocal
