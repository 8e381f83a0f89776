#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stereocal/correspondences.hpp"
#include "stereocal/geometry.hpp"

namespace stereocal {

/// Rectangular sensor; pixels live in [0, width] x [0, height].
struct SensorBounds {
  double width = 2048.0;
  double height = 1088.0;
};

/// Axis-aligned placement volume for the target bar, world frame.
struct PlacementVolume {
  Point3 center{0.0, 0.0, 6.0};
  Point3 half_extent{1.0, 1.0, 1.0};
};

/// Everything needed to synthesize a dataset.
struct SceneConfig {
  ExtrinsicAngles truth;         ///< true pose, baseline included
  double target_distance = 0.9;  ///< bar length |A - B|, meters
  int n_images = 25;
  double noise_sigma = 0.0;      ///< isotropic pixel noise, std in pixels
  CameraIntrinsics k1;
  CameraIntrinsics k2;
  SensorBounds sensor1;
  SensorBounds sensor2;
  PlacementVolume volume;
  std::uint64_t seed = 0;
  int max_attempts_per_image = 10000;

  /// Rig in the spirit of the reference hardware: 3500 px focal length,
  /// 2048x1088 sensors, 4 m baseline, cameras converging on a 2x2x2 m
  /// working volume 6 m in front of the primary camera, 0.9 m bar.
  static SceneConfig defaults();
};

/// One image: both targets seen by both cameras.
struct ImageRecord {
  PixelPair a;  ///< target A: q1 primary, q2 secondary
  PixelPair b;  ///< target B
};

/// True 3D target positions of one image (kept when available).
struct ImageTruth {
  Point3 a = Point3::Zero();
  Point3 b = Point3::Zero();
};

/// A measured stereo acquisition: detections plus the two tape-measure
/// ground truths (baseline and bar length) and, for synthetic data, the
/// generating pose and target positions.
struct Dataset {
  double baseline = 0.0;
  double target_distance = 0.0;
  CameraIntrinsics k1;
  CameraIntrinsics k2;
  std::vector<ImageRecord> images;
  std::optional<ExtrinsicAngles> truth_angles;
  std::vector<ImageTruth> truth_targets;  ///< empty, or one entry per image

  int n_images() const { return static_cast<int>(images.size()); }
};

/// Draws `n_images` random bar placements, projects them exactly, adds
/// pixel noise, and keeps only placements whose four noisy detections are
/// in front of both cameras and inside both sensors.  Deterministic in
/// config.seed.  Throws PlacementExhausted when an image cannot be placed
/// within max_attempts_per_image, ConfigError for invalid parameters.
Dataset generate(const SceneConfig& config);

/// Correct correspondences (same image, same target) of the selected
/// images, target A then B per image.  Throws MissingTarget when an index
/// does not name an image of the dataset.
CorrespondenceSet2D correspondences_2d(const Dataset& dataset, std::span<const int> images);

/// Distance-supervision entries of the selected images.
CorrespondenceSet3D correspondences_3d(const Dataset& dataset, std::span<const int> images);

}  // namespace stereocal
