#include "stereocal/geometry.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace stereocal {

Matrix3d cross_matrix(const Vector3d& t) {
  Matrix3d m;
  m << 0.0, -t.z(), t.y(),  //
      t.z(), 0.0, -t.x(),   //
      -t.y(), t.x(), 0.0;
  return m;
}

ProjectionMatrix projection_matrix(const CameraIntrinsics& k) {
  ProjectionMatrix p;
  p.leftCols<3>() = k.matrix();
  p.col(3).setZero();
  return p;
}

ProjectionMatrix projection_matrix(const CameraIntrinsics& k, const Extrinsics& pose) {
  ProjectionMatrix p;
  p.leftCols<3>() = k.matrix() * pose.R;
  p.col(3) = k.matrix() * pose.T;
  return p;
}

Pixel2 project(const ProjectionMatrix& p, const Point3& q, const Tolerances& tol) {
  const Vector3d h = p.leftCols<3>() * q + p.col(3);
  if (std::abs(h.z()) <= tol.point_at_infinity) {
    throw PointAtInfinity("projection of point on the principal plane");
  }
  return {h.x() / h.z(), h.y() / h.z()};
}

double projective_depth(const ProjectionMatrix& p, const Point3& q) {
  return p.row(2).head<3>().dot(q) + p(2, 3);
}

NormalizedPoint2 normalize(const CameraIntrinsics& k, const Pixel2& q) {
  // Closed-form inverse of the upper-triangular K.
  const double y = (q.v - k.v0) / k.omega;
  const double x = (q.u - k.u0 - k.s * y) / k.omega;
  return {x, y};
}

Matrix3d rotation_from_angles(double alpha, double beta, double gamma) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  Matrix3d ry, rx, rz;
  ry << ca, 0.0, sa, 0.0, 1.0, 0.0, -sa, 0.0, ca;
  rx << 1.0, 0.0, 0.0, 0.0, cb, -sb, 0.0, sb, cb;
  rz << cg, -sg, 0.0, sg, cg, 0.0, 0.0, 0.0, 1.0;
  return ry * rx * rz;
}

Vector3d translation_from_angles(double delta, double epsilon, double baseline) {
  const double cd = std::cos(delta), sd = std::sin(delta);
  return baseline * Vector3d(cd * std::cos(epsilon), cd * std::sin(epsilon), sd);
}

Extrinsics pose_from_angles(const ExtrinsicAngles& a) {
  return {rotation_from_angles(a.alpha, a.beta, a.gamma),
          translation_from_angles(a.delta, a.epsilon, a.baseline)};
}

ExtrinsicAngles angles_from_pose(const Extrinsics& pose, GimbalPolicy policy,
                                 const Tolerances& tol) {
  const Matrix3d& r = pose.R;
  ExtrinsicAngles a;

  // R = Ry(a) Rx(b) Rz(g) puts -sin(b) at (1,2), sin(a)cos(b) / cos(a)cos(b)
  // in the third column, and cos(b)sin(g) / cos(b)cos(g) in the second row.
  const double sb = -r(1, 2);
  a.beta = std::asin(std::clamp(sb, -1.0, 1.0));
  const double cb = std::cos(a.beta);
  if (std::abs(cb) < tol.gimbal) {
    if (policy == GimbalPolicy::raise) {
      throw GimbalLock("pitch at +-pi/2: yaw and roll are not unique");
    }
    // Deterministic resolution: gamma = 0, remaining rotation folded into
    // alpha.  With cos(b) = 0 the top row reduces to cos/sin of
    // (alpha -+ gamma) depending on the sign of sin(b).
    a.gamma = 0.0;
    a.alpha = sb > 0.0 ? std::atan2(r(0, 1), r(0, 0)) : std::atan2(-r(0, 1), r(0, 0));
  } else {
    a.alpha = std::atan2(r(0, 2), r(2, 2));
    a.gamma = std::atan2(r(1, 0), r(1, 1));
  }

  a.baseline = pose.T.norm();
  if (a.baseline > 0.0) {
    const Vector3d t = pose.T / a.baseline;
    a.delta = std::asin(std::clamp(t.z(), -1.0, 1.0));
    a.epsilon = std::atan2(t.y(), t.x());
  }
  return a;
}

EssentialMatrix essential_from_pose(const Matrix3d& r, const Vector3d& t,
                                    const Tolerances& tol) {
  if (std::abs(t.norm() - 1.0) > tol.unit_norm) {
    throw ConfigError("essential_from_pose expects a unit translation direction");
  }
  return cross_matrix(t) * r;
}

EssentialMatrix essential_from_extrinsics(const Extrinsics& pose, const Tolerances& tol) {
  const double n = pose.T.norm();
  if (n <= 0.0) {
    throw ConfigError("essential matrix undefined for a zero baseline");
  }
  const Vector3d t = pose.T / n;
  return essential_from_pose(pose.R.transpose(), Vector3d(-pose.R.transpose() * t), tol);
}

double residual(const EssentialMatrix& e, const NormalizedPoint2& q1,
                const NormalizedPoint2& q2) {
  return q1.hom().dot(e * q2.hom());
}

bool is_rotation(const Matrix3d& r, const Tolerances& tol) {
  return (r * r.transpose() - Matrix3d::Identity()).cwiseAbs().maxCoeff() <=
             tol.orthonormal &&
         std::abs(r.determinant() - 1.0) <= tol.orthonormal;
}

bool is_essential(const EssentialMatrix& e, const Tolerances& tol) {
  const Eigen::JacobiSVD<Matrix3d> svd(e);
  const Vector3d s = svd.singularValues();
  if (s(0) <= 0.0) return false;
  const double fro = e.norm();
  return (s(0) - s(1)) <= tol.essential * s(0) &&
         s(2) <= tol.essential * fro &&
         std::abs(e.determinant()) <= tol.essential * fro * fro * fro;
}

EssentialMatrix canonicalize_essential(const EssentialMatrix& e) {
  const double fro = e.norm();
  if (fro <= 0.0) {
    throw ConfigError("cannot canonicalize the zero matrix");
  }
  EssentialMatrix out = e * (std::sqrt(2.0) / fro);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double entry = out(i, j);
      if (std::abs(entry) > 1e-12) {
        if (entry < 0.0) out = -out;
        return out;
      }
    }
  }
  return out;
}

}  // namespace stereocal
