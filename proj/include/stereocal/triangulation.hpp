#pragma once

#include "stereocal/geometry.hpp"

namespace stereocal {

/// Optical ray in world coordinates, direction normalized to unit length
/// and pointing into the scene (positive z in its own camera frame).
struct Ray3 {
  Point3 origin = Point3::Zero();
  Vector3d direction = Vector3d::UnitZ();
};

/// Midpoint reconstruction of a two-ray intersection.
struct Reconstruction {
  Point3 point = Point3::Zero();  ///< midpoint of the common perpendicular
  double gap = 0.0;               ///< length of the common perpendicular, meters
  bool in_front = true;           ///< both closest-approach parameters positive
};

/// Back-projects a primary-camera pixel: origin at the world origin.
Ray3 ray_from_pixel(const CameraIntrinsics& k, const Pixel2& q);

/// Back-projects a secondary-camera pixel: origin at the camera center
/// -R^T T, direction rotated into the world frame.
Ray3 ray_from_pixel(const CameraIntrinsics& k, const Extrinsics& pose, const Pixel2& q);

/// Closest-approach midpoint of two rays.  `gap` is the distance between
/// the two closest points; a perfect intersection gives gap = 0.  Negative
/// ray parameters (intersection behind an origin) only clear the in_front
/// flag -- they are a legitimate outcome for wrong correspondences, not an
/// error.  Throws ParallelRays when the directions are parallel within
/// tol.parallel_rays.
Reconstruction triangulate(const Ray3& r1, const Ray3& r2,
                           const Tolerances& tol = default_tolerances());

/// Back-projects a correspondence through both cameras and triangulates.
Reconstruction reconstruct_pair(const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                                const Extrinsics& pose, const Pixel2& q1, const Pixel2& q2,
                                const Tolerances& tol = default_tolerances());

/// Pixel distance between each observation and the reprojection of the
/// triangulated point, one entry per camera.
struct ReprojectionErrors {
  double e1 = 0.0;
  double e2 = 0.0;
};

ReprojectionErrors reprojection_error(const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                                      const Extrinsics& pose, const Pixel2& q1,
                                      const Pixel2& q2,
                                      const Tolerances& tol = default_tolerances());

/// Absolute and relative error between a measured inter-target distance and
/// the distance of the two triangulated targets.
struct DistanceError {
  double error = 0.0;  ///< |D - D_rec|, meters
  double pct = 0.0;    ///< |D - D_rec| / D
};

DistanceError distance_error(const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                             const Extrinsics& pose, const Pixel2& a1, const Pixel2& a2,
                             const Pixel2& b1, const Pixel2& b2, double distance,
                             const Tolerances& tol = default_tolerances());

}  // namespace stereocal
