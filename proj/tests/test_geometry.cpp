#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stereocal/geometry.hpp"
#include "stereocal/rng.hpp"
#include "test_support.hpp"

using namespace stereocal;
using test_support::max_abs_diff;
using test_support::simple_camera;

namespace {

constexpr double pi = std::numbers::pi;

/// Naive reference projection written independently of the library code.
Pixel2 project_by_hand(const CameraIntrinsics& k, const Extrinsics& pose, const Point3& q) {
  const Vector3d cam = pose.R * q + pose.T;
  const double u = k.omega * cam.x() + k.s * cam.y() + k.u0 * cam.z();
  const double v = k.omega * cam.y() + k.v0 * cam.z();
  return {u / cam.z(), v / cam.z()};
}

}  // namespace

TEST_CASE("projection of points on the optical axis hits the principal point") {
  const CameraIntrinsics k = simple_camera();
  const Pixel2 p = project(projection_matrix(k), Point3(0.0, 0.0, 5.0));
  CHECK(p.u == doctest::Approx(500.0).epsilon(1e-12));
  CHECK(p.v == doctest::Approx(400.0).epsilon(1e-12));
}

TEST_CASE("projection matches the pinhole formula worked by hand") {
  const CameraIntrinsics k = simple_camera();
  // u = 1000 * 1/5 + 500 = 700, v = 400
  const Pixel2 p = project(projection_matrix(k), Point3(1.0, 0.0, 5.0));
  CHECK(p.u == doctest::Approx(700.0).epsilon(1e-12));
  CHECK(p.v == doctest::Approx(400.0).epsilon(1e-12));
}

TEST_CASE("projection and the naive reference agree on random inputs") {
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    CameraIntrinsics k{rng.next_uniform(500.0, 4000.0), rng.next_uniform(-5.0, 5.0),
                       rng.next_uniform(-100.0, 1200.0), rng.next_uniform(-100.0, 700.0)};
    const ExtrinsicAngles angles = test_support::random_angles(rng);
    const Extrinsics pose = pose_from_angles(angles);
    const Point3 q = test_support::random_projectable_point(rng, pose);
    const Pixel2 a = project(projection_matrix(k, pose), q);
    const Pixel2 b = project_by_hand(k, pose, q);
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-10));
    CHECK(a.v == doctest::Approx(b.v).epsilon(1e-10));
  }
}

TEST_CASE("points on the principal plane raise PointAtInfinity") {
  const CameraIntrinsics k = simple_camera();
  Extrinsics pose;  // identity rotation
  pose.T = Vector3d(0.0, 0.0, -1.0);
  CHECK_THROWS_AS(project(projection_matrix(k, pose), Point3(0.0, 0.0, 1.0)),
                  PointAtInfinity);
}

TEST_CASE("normalization inverts the intrinsics") {
  const CameraIntrinsics k = simple_camera();
  const NormalizedPoint2 center = normalize(k, {500.0, 400.0});
  CHECK(center.x == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(center.y == doctest::Approx(0.0).epsilon(1e-15));

  const NormalizedPoint2 right = normalize(k, {1500.0, 400.0});
  CHECK(right.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(right.y == doctest::Approx(0.0).epsilon(1e-12));

  const CameraIntrinsics wide{2000.0, 0.0, 0.0, 0.0};
  const NormalizedPoint2 n = normalize(wide, {1000.0, -2000.0});
  CHECK(n.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(n.y == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("normalization with skew agrees with a literal matrix inverse") {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const CameraIntrinsics k{rng.next_uniform(500.0, 4000.0), rng.next_uniform(-10.0, 10.0),
                             rng.next_uniform(0.0, 2000.0), rng.next_uniform(0.0, 1000.0)};
    const Pixel2 q{rng.next_uniform(-500.0, 2500.0), rng.next_uniform(-500.0, 1500.0)};
    const Vector3d byinv = k.matrix().inverse() * Vector3d(q.u, q.v, 1.0);
    const NormalizedPoint2 n = normalize(k, q);
    CHECK(n.x == doctest::Approx(byinv.x() / byinv.z()).epsilon(1e-10));
    CHECK(n.y == doctest::Approx(byinv.y() / byinv.z()).epsilon(1e-10));
  }
}

TEST_CASE("project then normalize recovers the camera-frame direction") {
  Rng rng(23);
  const CameraIntrinsics k{3500.0, 1.5, 1024.0, 544.0};
  for (int i = 0; i < 100; ++i) {
    const Point3 q(rng.next_uniform(-2.0, 2.0), rng.next_uniform(-2.0, 2.0),
                   rng.next_uniform(1.0, 10.0));
    const NormalizedPoint2 n = normalize(k, project(projection_matrix(k), q));
    CHECK(n.x == doctest::Approx(q.x() / q.z()).epsilon(1e-12));
    CHECK(n.y == doctest::Approx(q.y() / q.z()).epsilon(1e-12));
  }
}

TEST_CASE("zero angles give the identity rotation") {
  CHECK(max_abs_diff(rotation_from_angles(0.0, 0.0, 0.0), Matrix3d::Identity()) < 1e-15);
}

TEST_CASE("a quarter-turn yaw maps the optical axis onto x") {
  const Vector3d mapped = rotation_from_angles(pi / 2.0, 0.0, 0.0) * Vector3d(0.0, 0.0, 1.0);
  CHECK((mapped - Vector3d(1.0, 0.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("rotation composition order is yaw * pitch * roll") {
  const double a = 0.1, b = 0.2, g = 0.3;
  Matrix3d ry, rx, rz;  // written out entry by entry as the reference
  ry << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  rx << 1, 0, 0, 0, std::cos(b), -std::sin(b), 0, std::sin(b), std::cos(b);
  rz << std::cos(g), -std::sin(g), 0, std::sin(g), std::cos(g), 0, 0, 0, 1;
  CHECK(max_abs_diff(rotation_from_angles(a, b, g), ry * rx * rz) < 1e-12);
}

TEST_CASE("rotations from random angles are orthonormal") {
  Rng rng(24);
  for (int i = 0; i < 500; ++i) {
    const ExtrinsicAngles a = test_support::random_angles(rng);
    CHECK(is_rotation(rotation_from_angles(a.alpha, a.beta, a.gamma)));
  }
}

TEST_CASE("translation angles place the vector on the baseline sphere") {
  CHECK((translation_from_angles(0.0, 0.0, 1.0) - Vector3d(1.0, 0.0, 0.0)).norm() < 1e-15);
  CHECK((translation_from_angles(pi / 2.0, 0.3, 2.0) - Vector3d(0.0, 0.0, 2.0)).norm() <
        1e-12);
  const Vector3d t = translation_from_angles(0.3, 0.7, 4.0);
  CHECK(t.x() == doctest::Approx(4.0 * std::cos(0.3) * std::cos(0.7)).epsilon(1e-14));
  CHECK(t.y() == doctest::Approx(4.0 * std::cos(0.3) * std::sin(0.7)).epsilon(1e-14));
  CHECK(t.z() == doctest::Approx(4.0 * std::sin(0.3)).epsilon(1e-14));
  CHECK(t.norm() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("cross-product matrix reproduces the cross product") {
  Rng rng(25);
  for (int i = 0; i < 100; ++i) {
    const Vector3d a(rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2));
    const Vector3d b(rng.next_uniform(-2, 2), rng.next_uniform(-2, 2), rng.next_uniform(-2, 2));
    CHECK((cross_matrix(a) * b - a.cross(b)).norm() < 1e-14);
    CHECK(max_abs_diff(cross_matrix(a).transpose(), -cross_matrix(a)) < 1e-15);
  }
}

TEST_CASE("essential matrix of a pure x-translation") {
  const EssentialMatrix e = essential_from_pose(Matrix3d::Identity(), Vector3d(1.0, 0.0, 0.0));
  Matrix3d expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(max_abs_diff(e, expected) < 1e-15);
}

TEST_CASE("essential matrix of a pure z-translation") {
  const EssentialMatrix e = essential_from_pose(Matrix3d::Identity(), Vector3d(0.0, 0.0, 1.0));
  Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK(max_abs_diff(e, expected) < 1e-15);
}

TEST_CASE("essential matrices have the (s, s, 0) singular structure") {
  Rng rng(26);
  for (int i = 0; i < 300; ++i) {
    const ExtrinsicAngles a = test_support::random_angles(rng);
    const EssentialMatrix e =
        essential_from_pose(rotation_from_angles(a.alpha, a.beta, a.gamma),
                            translation_from_angles(a.delta, a.epsilon, 1.0));
    CHECK(is_essential(e));
    CHECK(e.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("non-unit translation directions are rejected") {
  CHECK_THROWS_AS(essential_from_pose(Matrix3d::Identity(), Vector3d(0.0, 0.0, 2.0)),
                  ConfigError);
}

TEST_CASE("epipolar residual evaluated by hand") {
  // E = [t]x for t = (1,0,0); q1 = (0,0), q2 = (0,1) on the z = 1 plane.
  // E * (0,1,1) = (0,-1,1) and (0,0,1) . (0,-1,1) = 1.
  const EssentialMatrix e = essential_from_pose(Matrix3d::Identity(), Vector3d(1.0, 0.0, 0.0));
  double by_hand = 0.0;
  const double q1[3] = {0.0, 0.0, 1.0};
  const double q2[3] = {0.0, 1.0, 1.0};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) by_hand += q1[i] * e(i, j) * q2[j];
  }
  CHECK(by_hand == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(residual(e, {0.0, 0.0}, {0.0, 1.0}) == doctest::Approx(by_hand).epsilon(1e-15));
}

TEST_CASE("epipolar consistency holds for random poses and points") {
  Rng rng(27);
  const CameraIntrinsics k1 = simple_camera();
  const CameraIntrinsics k2{1400.0, 0.5, 620.0, 380.0};
  for (int i = 0; i < 1000; ++i) {
    const ExtrinsicAngles a = test_support::random_angles(rng);
    const Extrinsics pose = pose_from_angles(a);
    const EssentialMatrix e = essential_from_extrinsics(pose);
    const Point3 q = test_support::random_projectable_point(rng, pose);
    const double r = residual(e, normalize(k1, project(projection_matrix(k1), q)),
                              normalize(k2, project(projection_matrix(k2, pose), q)));
    CHECK(std::abs(r) < 1e-9);
  }
}

TEST_CASE("identity pose with x-translation decomposes to zero angles") {
  Extrinsics pose;
  pose.T = Vector3d(1.0, 0.0, 0.0);
  const ExtrinsicAngles a = angles_from_pose(pose);
  CHECK(a.alpha == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(a.beta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(a.gamma == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(a.delta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(a.epsilon == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(a.baseline == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("angles round trip through the pose") {
  ExtrinsicAngles in;
  in.alpha = 0.1;
  in.beta = 0.2;
  in.gamma = 0.3;
  in.delta = 0.05;
  in.epsilon = 0.15;
  in.baseline = 4.0;
  const ExtrinsicAngles out = angles_from_pose(pose_from_angles(in));
  CHECK(test_support::max_angle_diff(in, out) < 1e-12);
  CHECK(out.baseline == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("random angles round trip away from the singularities") {
  Rng rng(28);
  for (int i = 0; i < 500; ++i) {
    const ExtrinsicAngles in = test_support::random_angles(rng);
    const Extrinsics pose = pose_from_angles(in);
    const ExtrinsicAngles out = angles_from_pose(pose);
    const Extrinsics back = pose_from_angles(out);
    CHECK(max_abs_diff(pose.R, back.R) < 1e-9);
    CHECK((pose.T - back.T).norm() < 1e-9);
    CHECK(std::abs(out.beta) <= pi / 2.0);
    CHECK(std::abs(out.delta) <= pi / 2.0);
  }
}

TEST_CASE("pitch singularity raises GimbalLock unless resolved") {
  Extrinsics pose;
  pose.R = rotation_from_angles(0.0, pi / 2.0, 0.0);  // pure quarter pitch
  pose.T = Vector3d(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(angles_from_pose(pose), GimbalLock);

  const ExtrinsicAngles resolved = angles_from_pose(pose, GimbalPolicy::resolve);
  CHECK(resolved.gamma == 0.0);
  CHECK(max_abs_diff(pose_from_angles(resolved).R, pose.R) < 1e-12);
}

TEST_CASE("gimbal resolution reproduces the rotation for combined yaw") {
  for (const double sign : {1.0, -1.0}) {
    for (const double yaw : {0.0, 0.4, -1.1, 2.5}) {
      for (const double roll : {0.0, 0.3, -0.9}) {
        Extrinsics pose;
        pose.R = rotation_from_angles(yaw, sign * pi / 2.0, roll);
        pose.T = Vector3d(0.0, 1.0, 0.0);
        const ExtrinsicAngles resolved = angles_from_pose(pose, GimbalPolicy::resolve);
        CHECK(max_abs_diff(pose_from_angles(resolved).R, pose.R) < 1e-12);
      }
    }
  }
}

TEST_CASE("canonical essential form fixes scale and sign") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    const ExtrinsicAngles a = test_support::random_angles(rng);
    const EssentialMatrix e = essential_from_extrinsics(pose_from_angles(a));
    for (const double scale : {1.0, -1.0, 0.37, -250.0}) {
      const EssentialMatrix c = canonicalize_essential(scale * e);
      CHECK(c.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
      // first entry above the noise floor must be positive
      bool found = false;
      for (int r = 0; r < 3 && !found; ++r) {
        for (int col = 0; col < 3 && !found; ++col) {
          if (std::abs(c(r, col)) > 1e-12) {
            CHECK(c(r, col) > 0.0);
            found = true;
          }
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("canonicalization is idempotent") {
  Rng rng(30);
  const ExtrinsicAngles a = test_support::random_angles(rng);
  const EssentialMatrix e =
      canonicalize_essential(essential_from_extrinsics(pose_from_angles(a)));
  CHECK(max_abs_diff(e, canonicalize_essential(e)) < 1e-15);
}
