#include "stereocal/triangulation.hpp"

#include <cmath>

namespace stereocal {

Ray3 ray_from_pixel(const CameraIntrinsics& k, const Pixel2& q) {
  const NormalizedPoint2 n = normalize(k, q);
  return {Point3::Zero(), n.hom().normalized()};
}

Ray3 ray_from_pixel(const CameraIntrinsics& k, const Extrinsics& pose, const Pixel2& q) {
  const NormalizedPoint2 n = normalize(k, q);
  // x2 = R x1 + T, so the camera center is -R^T T and a camera-frame
  // direction d maps to R^T d in the world.
  return {Point3(-pose.R.transpose() * pose.T),
          Vector3d(pose.R.transpose() * n.hom().normalized())};
}

Reconstruction triangulate(const Ray3& r1, const Ray3& r2, const Tolerances& tol) {
  const Vector3d& d1 = r1.direction;
  const Vector3d& d2 = r2.direction;
  if (d1.cross(d2).norm() <= tol.parallel_rays) {
    throw ParallelRays("ray directions are parallel");
  }

  // Minimize |(o1 + s d1) - (o2 + t d2)|^2 for unit directions.
  const Vector3d w = r1.origin - r2.origin;
  const double b = d1.dot(d2);
  const double d = d1.dot(w);
  const double e = d2.dot(w);
  const double denom = 1.0 - b * b;  // = |d1 x d2|^2
  const double s = (b * e - d) / denom;
  const double t = (e - b * d) / denom;

  const Vector3d p1 = r1.origin + s * d1;
  const Vector3d p2 = r2.origin + t * d2;
  Reconstruction rec;
  rec.point = 0.5 * (p1 + p2);
  rec.gap = (p1 - p2).norm();
  rec.in_front = s > 0.0 && t > 0.0;
  return rec;
}

Reconstruction reconstruct_pair(const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                                const Extrinsics& pose, const Pixel2& q1, const Pixel2& q2,
                                const Tolerances& tol) {
  return triangulate(ray_from_pixel(k1, q1), ray_from_pixel(k2, pose, q2), tol);
}

ReprojectionErrors reprojection_error(const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                                      const Extrinsics& pose, const Pixel2& q1,
                                      const Pixel2& q2, const Tolerances& tol) {
  const Reconstruction rec = reconstruct_pair(k1, k2, pose, q1, q2, tol);
  const Pixel2 p1 = project(projection_matrix(k1), rec.point, tol);
  const Pixel2 p2 = project(projection_matrix(k2, pose), rec.point, tol);
  return {std::hypot(p1.u - q1.u, p1.v - q1.v), std::hypot(p2.u - q2.u, p2.v - q2.v)};
}

DistanceError distance_error(const CameraIntrinsics& k1, const CameraIntrinsics& k2,
                             const Extrinsics& pose, const Pixel2& a1, const Pixel2& a2,
                             const Pixel2& b1, const Pixel2& b2, double distance,
                             const Tolerances& tol) {
  if (distance <= 0.0) {
    throw ConfigError("inter-target distance must be positive");
  }
  const Reconstruction ra = reconstruct_pair(k1, k2, pose, a1, a2, tol);
  const Reconstruction rb = reconstruct_pair(k1, k2, pose, b1, b2, tol);
  const double rec = (ra.point - rb.point).norm();
  const double err = std::abs(distance - rec);
  return {err, err / distance};
}

}  // namespace stereocal
