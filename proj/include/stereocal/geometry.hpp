#pragma once

#include <Eigen/Dense>

#include "stereocal/errors.hpp"

namespace stereocal {

using Matrix3d = Eigen::Matrix3d;
using Vector3d = Eigen::Vector3d;
using Matrix34d = Eigen::Matrix<double, 3, 4>;

/// Point on the sensor, in pixels.
struct Pixel2 {
  double u = 0.0;
  double v = 0.0;
};

/// Pixel mapped through the inverse intrinsics; z = 1 plane coordinates.
struct NormalizedPoint2 {
  double x = 0.0;
  double y = 0.0;

  Vector3d hom() const { return {x, y, 1.0}; }
};

/// 3D point in the primary-camera (world) frame, meters.
using Point3 = Vector3d;

/// Pinhole intrinsics: focal length in pixels, skew, principal point.
struct CameraIntrinsics {
  double omega = 1.0;  ///< focal length, pixels (common to u and v)
  double s = 0.0;      ///< skew
  double u0 = 0.0;     ///< principal point u, pixels
  double v0 = 0.0;     ///< principal point v, pixels

  Matrix3d matrix() const {
    Matrix3d k;
    k << omega, s, u0, 0.0, omega, v0, 0.0, 0.0, 1.0;
    return k;
  }
};

/// Five-angle pose parametrization plus the measured baseline length.
///
/// (alpha, beta, gamma) generate the rotation as Ry(alpha)*Rx(beta)*Rz(gamma);
/// (delta, epsilon) are the elevation/azimuth of the unit translation, and
/// baseline is |T| in meters.  The baseline is a measured input, never an
/// optimization variable.
struct ExtrinsicAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double baseline = 1.0;
};

/// Rigid transform from the primary-camera (world) frame into the secondary
/// camera frame: x2 = R * x1 + T.  The secondary camera center in world
/// coordinates is -R^T * T.
struct Extrinsics {
  Matrix3d R = Matrix3d::Identity();
  Vector3d T = Vector3d::Zero();
};

using ProjectionMatrix = Matrix34d;
using EssentialMatrix = Matrix3d;

/// Numerical guards, overridable where a caller needs different margins.
struct Tolerances {
  double point_at_infinity = 1e-15;  ///< |w| below this is projectively infinite
  double gimbal = 1e-9;              ///< |cos(beta)| below this is pitch-singular
  double unit_norm = 1e-9;           ///< unit-vector deviation allowed
  double parallel_rays = 1e-12;      ///< |d1 x d2| below this is parallel
  double orthonormal = 1e-9;         ///< rotation-matrix deviation allowed
  double essential = 1e-9;           ///< essential-matrix invariant tolerance
  double rank = 1e-9;                ///< relative singular-value cutoff
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t;
  return t;
}

/// Antisymmetric cross-product matrix [t]x with [t]x * v = t x v.
Matrix3d cross_matrix(const Vector3d& t);

/// Projection matrix K [I | 0] of the primary camera.
ProjectionMatrix projection_matrix(const CameraIntrinsics& k);

/// Projection matrix K [R | T] of the secondary camera.
ProjectionMatrix projection_matrix(const CameraIntrinsics& k, const Extrinsics& pose);

/// Projects a world point to pixels.  Throws PointAtInfinity when the
/// homogeneous output has a vanishing third component.  The caller is
/// responsible for point-behind-camera handling; see Reconstruction.
Pixel2 project(const ProjectionMatrix& p, const Point3& q,
               const Tolerances& tol = default_tolerances());

/// Depth of a world point in the camera described by `p` (third homogeneous
/// output component); positive in front of the camera.
double projective_depth(const ProjectionMatrix& p, const Point3& q);

/// Applies the inverse intrinsics to a pixel: K^-1 (u, v, 1).
NormalizedPoint2 normalize(const CameraIntrinsics& k, const Pixel2& q);

/// Ry(alpha) * Rx(beta) * Rz(gamma), right-handed canonical rotations.
Matrix3d rotation_from_angles(double alpha, double beta, double gamma);

/// baseline * (cos d cos e, cos d sin e, sin d).
Vector3d translation_from_angles(double delta, double epsilon, double baseline);

/// Combines the two maps above into a full pose.
Extrinsics pose_from_angles(const ExtrinsicAngles& a);

/// How angles_from_pose treats the pitch singularity |cos beta| ~ 0.
enum class GimbalPolicy {
  raise,    ///< throw GimbalLock (the strict default)
  resolve,  ///< pick gamma = 0 and fold the leftover rotation into alpha
};

/// Inverse of pose_from_angles.  beta and delta land in [-pi/2, pi/2],
/// the free angles in (-pi, pi].  Throws GimbalLock at the pitch
/// singularity unless policy == resolve.
ExtrinsicAngles angles_from_pose(const Extrinsics& pose,
                                 GimbalPolicy policy = GimbalPolicy::raise,
                                 const Tolerances& tol = default_tolerances());

/// E = [t]x R for a unit t.  Throws ConfigError when |t| is not 1 within
/// tol.unit_norm.  The two nonzero singular values of the result equal 1,
/// so ||E||_F = sqrt(2) by construction.
EssentialMatrix essential_from_pose(const Matrix3d& r, const Vector3d& t,
                                    const Tolerances& tol = default_tolerances());

/// Essential matrix consistent with `residual` below for correspondences
/// observed under x2 = R x1 + T: the factorization uses the inverse
/// transform, E = [-R^T t]x R^T with t = T/|T|.
EssentialMatrix essential_from_extrinsics(const Extrinsics& pose,
                                          const Tolerances& tol = default_tolerances());

/// Epipolar residual q1^T E q2 on homogeneous normalized points, with the
/// primary-camera point on the left.  This argument order is fixed
/// throughout the library.
double residual(const EssentialMatrix& e, const NormalizedPoint2& q1,
                const NormalizedPoint2& q2);

/// True when r is orthonormal with determinant +1 within tol.orthonormal.
bool is_rotation(const Matrix3d& r, const Tolerances& tol = default_tolerances());

/// Checks rank 2, two equal nonzero singular values, and vanishing
/// determinant, all relative to the matrix scale.
bool is_essential(const EssentialMatrix& e, const Tolerances& tol = default_tolerances());

/// Scale-and-sign canonical representative: ||E||_F = sqrt(2) and the first
/// nonzero entry in row-major order positive.
EssentialMatrix canonicalize_essential(const EssentialMatrix& e);

}  // namespace stereocal
