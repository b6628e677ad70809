#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omniflow/error.hpp"
#include "omniflow/sphere_geometry.hpp"

using namespace omniflow;

namespace {

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  for (;;) {
    const Vec3 v{n(gen), n(gen), n(gen)};
    const double len = norm(v);
    if (len > 1e-3) return (1.0 / len) * v;
  }
}

}  // namespace

TEST(SphereGeometry, AxisCases) {
  // theta is latitude; colatitude 0 is the north pole.
  expect_vec_near(angles_to_sphere({-kHalfPi, 0.0}), {0, 0, 1}, 1e-15);
  expect_vec_near(angles_to_sphere({0.0, 0.0}), {1, 0, 0}, 1e-15);
  expect_vec_near(angles_to_sphere({kHalfPi, 0.0}), {0, 0, -1}, 1e-15);

  bool degenerate = false;
  const AngularCoord pole = sphere_to_angles({0, 0, 1}, &degenerate);
  EXPECT_TRUE(degenerate);
  EXPECT_EQ(pole.phi, 0.0);
  EXPECT_DOUBLE_EQ(pole.theta, -kHalfPi);

  const AngularCoord y = sphere_to_angles({0, 1, 0}, &degenerate);
  EXPECT_FALSE(degenerate);
  EXPECT_NEAR(y.theta + kHalfPi, kHalfPi, 1e-15);
  EXPECT_NEAR(y.phi, kHalfPi, 1e-15);
}

TEST(SphereGeometry, AnglesRoundTrip) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> th(-kHalfPi + 1e-6, kHalfPi - 1e-6);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const AngularCoord a{th(gen), ph(gen)};
    const AngularCoord b = sphere_to_angles(angles_to_sphere(a));
    EXPECT_NEAR(a.theta, b.theta, 1e-9);
    EXPECT_NEAR(a.phi, b.phi, 1e-9);
  }
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v = random_unit(gen);
    expect_vec_near(angles_to_sphere(sphere_to_angles(v)), v, 1e-9);
  }
}

TEST(SphereGeometry, Catadioptric) {
  const auto a = sphere_to_catadioptric({1, 0, 0});
  EXPECT_DOUBLE_EQ(a[0], 1.0);
  EXPECT_DOUBLE_EQ(a[1], 0.0);
  const auto b = sphere_to_catadioptric({0, 0, -1});
  EXPECT_EQ(b[0], 0.0);
  EXPECT_EQ(b[1], 0.0);
  EXPECT_THROW(sphere_to_catadioptric({0, 0, 1}), SingularityError);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> colat(0.01, kPi - 0.01);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const AngularCoord a{colat(gen) - kHalfPi, ph(gen)};
    const auto plane = sphere_to_catadioptric(angles_to_sphere(a));
    const auto cot = catadioptric_from_angles(a);
    EXPECT_NEAR(plane[0], cot[0], 1e-9 * std::max(1.0, std::abs(cot[0])));
    EXPECT_NEAR(plane[1], cot[1], 1e-9 * std::max(1.0, std::abs(cot[1])));
  }
}

TEST(SphereGeometry, PixelMaps) {
  const AngularCoord c = pixel_to_angles({511.5, 255.5, 1024, 512});
  EXPECT_NEAR(c.theta, 0.0, 1e-15);
  EXPECT_NEAR(c.phi, 0.0, 1e-15);
  const AngularCoord top = pixel_to_angles({0.0, 0.0, 1024, 512});
  EXPECT_DOUBLE_EQ(top.theta, -kHalfPi + kPi / 1024.0);

  for (int row = 0; row < 16; ++row) {
    for (int col = 0; col < 32; ++col) {
      const PixelCoord p = angles_to_pixel(pixel_to_angles({double(col), double(row), 32, 16}), 32, 16);
      EXPECT_NEAR(p.col, col, 1e-12);
      EXPECT_NEAR(p.row, row, 1e-12);
    }
  }
  EXPECT_THROW(pixel_to_angles({0, 0, 30, 16}), ShapeError);
  EXPECT_THROW(angles_to_pixel({0, 0}, 32, 17), ShapeError);
}

TEST(SphereGeometry, LiftProjectRoundTrip) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> col(0.0, 128.0), row(0.0, 63.0);
  for (int i = 0; i < 1000; ++i) {
    const double c = col(gen), r = row(gen);
    const PixelCoord p = project_to_pixel(lift_pixel(c, r, 128, 64), 128, 64);
    EXPECT_NEAR(std::remainder(p.col - c, 128.0), 0.0, 1e-9);
    EXPECT_NEAR(p.row, r, 1e-9);
  }
}

TEST(Rotation, EulerBasics) {
  EXPECT_TRUE(rotation_from_euler(0, 0, 0).is_identity());
  expect_vec_near(rotate({1, 0, 0}, rotation_from_euler(0, 0, kPi)), {-1, 0, 0}, 1e-15);
  EXPECT_THROW(rotation_from_euler(std::nan(""), 0, 0), ArgumentError);
  EXPECT_THROW(rotation_from_euler(0, INFINITY, 0), ArgumentError);
}

TEST(Rotation, OrthonormalAndInverse) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const Rotation3 r = rotation_from_euler(ang(gen), ang(gen), ang(gen));
    const Mat3& m = r.matrix();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[k][a] * m[k][b];
        EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-12);
      }
    }
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    EXPECT_NEAR(det, 1.0, 1e-12);
    const Vec3 v = random_unit(gen);
    const Vec3 w = rotate(v, r);
    EXPECT_NEAR(norm(w), 1.0, 1e-12);
    expect_vec_near(rotate(w, r.inverse()), v, 1e-12);
    const Rotation3 id = r * r.inverse();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(id.matrix()[a][b], a == b ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Rotation, EulerDecompositionRoundTrip) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> pitch(-kHalfPi + 0.1, kHalfPi - 0.1);
  for (int i = 0; i < 200; ++i) {
    const double p = pitch(gen), r = ang(gen), y = ang(gen);
    const Rotation3 rot = rotation_from_euler(p, r, y);
    const Rotation3 back = Rotation3::from_matrix(rot.matrix());
    const Rotation3 again = rotation_from_euler(back.pitch(), back.roll(), back.yaw());
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(again.matrix()[a][b], rot.matrix()[a][b], 1e-12);
  }
}

TEST(Rotation, CompositionOrderIsYawPitchRoll) {
  const double p = 0.3, r = -0.7, y = 1.1;
  const Rotation3 composed =
      rotation_from_euler(0, 0, y) * rotation_from_euler(p, 0, 0) * rotation_from_euler(0, r, 0);
  const Rotation3 direct = rotation_from_euler(p, r, y);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(composed.matrix()[a][b], direct.matrix()[a][b], 1e-15);
}

TEST(SphereGeometry, GreatCircleAngle) {
  EXPECT_NEAR(great_circle_angle({1, 0, 0}, {0, 1, 0}), kHalfPi, 1e-15);
  EXPECT_NEAR(great_circle_angle({1, 0, 0}, {-1, 0, 0}), kPi, 1e-15);
  EXPECT_EQ(great_circle_angle({0, 0, 1}, {0, 0, 1}), 0.0);
}
