#include "omniflow/sphere_geometry.hpp"

#include <algorithm>
#include <string>

#include "omniflow/error.hpp"

namespace omniflow {

namespace {

double wrap_azimuth(double phi) {
  double w = std::fmod(phi + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  return w >= kPi ? -kPi : w;
}

double wrap_col(double col, int width) {
  const double w = static_cast<double>(width);
  double c = std::fmod(col, w);
  if (c < 0.0) c += w;
  return c >= w ? 0.0 : c;
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return out;
}

}  // namespace

double great_circle_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

void require_equirect(int width, int height) {
  if (width <= 0 || height <= 0 || width != 2 * height) {
    throw ShapeError("equirectangular raster must satisfy width == 2*height, got " +
                     std::to_string(width) + "x" + std::to_string(height));
  }
}

Vec3 angles_to_sphere(const AngularCoord& a) {
  const double colat = a.theta + kHalfPi;
  const double s = std::sin(colat);
  return {s * std::cos(a.phi), s * std::sin(a.phi), std::cos(colat)};
}

AngularCoord sphere_to_angles(const Vec3& v, bool* degenerate) {
  const double rho = std::hypot(v.x, v.y);
  // atan2 keeps full precision near the poles where acos(z) does not.
  const double colat = std::atan2(rho, v.z);
  const bool pole = rho == 0.0;
  if (degenerate != nullptr) *degenerate = pole;
  return {colat - kHalfPi, pole ? 0.0 : std::atan2(v.y, v.x)};
}

std::array<double, 2> sphere_to_catadioptric(const Vec3& v) {
  const double denom = 1.0 - v.z;
  if (denom == 0.0) {
    throw SingularityError("catadioptric projection is undefined at the +z pole");
  }
  return {v.x / denom, v.y / denom};
}

std::array<double, 2> catadioptric_from_angles(const AngularCoord& a) {
  const double half = 0.5 * (a.theta + kHalfPi);
  if (std::sin(half) == 0.0) {
    throw SingularityError("catadioptric projection is undefined at the +z pole");
  }
  const double cot = std::cos(half) / std::sin(half);
  return {cot * std::cos(a.phi), cot * std::sin(a.phi)};
}

AngularCoord pixel_to_angles(const PixelCoord& p) {
  require_equirect(p.width, p.height);
  const double phi = (p.col + 0.5) / p.width * kTwoPi - kPi;
  const double theta = (p.row + 0.5) / p.height * kPi - kHalfPi;
  return {theta, wrap_azimuth(phi)};
}

PixelCoord angles_to_pixel(const AngularCoord& a, int width, int height) {
  require_equirect(width, height);
  const double col = (a.phi + kPi) / kTwoPi * width - 0.5;
  const double row = (a.theta + kHalfPi) / kPi * height - 0.5;
  return {wrap_col(col, width), row, width, height};
}

Vec3 lift_pixel(double col, double row, int width, int height) {
  const double phi = (col + 0.5) / width * kTwoPi - kPi;
  const double colat = (row + 0.5) / height * kPi;
  const double s = std::sin(colat);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(colat)};
}

PixelCoord project_to_pixel(const Vec3& v, int width, int height) {
  const double rho = std::hypot(v.x, v.y);
  const double colat = std::atan2(rho, v.z);
  const double phi = rho == 0.0 ? 0.0 : std::atan2(v.y, v.x);
  const double col = (phi + kPi) / kTwoPi * width - 0.5;
  const double row = colat / kPi * height - 0.5;
  return {wrap_col(col, width), row, width, height};
}

Rotation3::Rotation3() : m_{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}} {}

Rotation3 Rotation3::from_euler(double pitch, double roll, double yaw) {
  if (!std::isfinite(pitch) || !std::isfinite(roll) || !std::isfinite(yaw)) {
    throw ArgumentError("rotation angles must be finite");
  }
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const Mat3 rz{{{cy, -sy, 0.0}, {sy, cy, 0.0}, {0.0, 0.0, 1.0}}};
  const Mat3 rx{{{1.0, 0.0, 0.0}, {0.0, cp, -sp}, {0.0, sp, cp}}};
  const Mat3 ry{{{cr, 0.0, sr}, {0.0, 1.0, 0.0}, {-sr, 0.0, cr}}};
  Rotation3 r;
  r.m_ = multiply(rz, multiply(rx, ry));
  r.pitch_ = pitch;
  r.roll_ = roll;
  r.yaw_ = yaw;
  return r;
}

Rotation3 Rotation3::from_matrix(const Mat3& m) {
  Rotation3 r;
  r.m_ = m;
  r.decompose();
  return r;
}

void Rotation3::decompose() {
  // Third row of Yaw*Pitch*Roll is (-cp*sr, sp, cp*cr); yaw is read from the
  // second column (-sy*cp, cy*cp, sp).
  const double sp = std::clamp(m_[2][1], -1.0, 1.0);
  pitch_ = std::asin(sp);
  if (std::abs(sp) < 1.0 - 1e-12) {
    roll_ = std::atan2(-m_[2][0], m_[2][2]);
    yaw_ = std::atan2(-m_[0][1], m_[1][1]);
  } else {
    roll_ = 0.0;
    yaw_ = std::atan2(m_[1][0], m_[0][0]);
  }
}

bool Rotation3::is_identity() const {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (m_[i][j] != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

Rotation3 Rotation3::inverse() const {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = m_[j][i];
  return from_matrix(t);
}

Vec3 Rotation3::apply(const Vec3& v) const {
  return {m_[0][0] * v.x + m_[0][1] * v.y + m_[0][2] * v.z,
          m_[1][0] * v.x + m_[1][1] * v.y + m_[1][2] * v.z,
          m_[2][0] * v.x + m_[2][1] * v.y + m_[2][2] * v.z};
}

Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
  return Rotation3::from_matrix(multiply(a.m_, b.m_));
}

}  // namespace omniflow
