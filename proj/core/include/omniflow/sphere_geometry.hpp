#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace omniflow {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Latitude/longitude pair in radians.
///
/// `theta` is the latitude in [-pi/2, pi/2], with -pi/2 at the top row of an
/// equirectangular frame (the +z pole). `phi` is the azimuth in [-pi, pi).
/// The spherical lift uses the colatitude `theta + pi/2`, which spans the
/// whole sphere.
struct AngularCoord {
  double theta = 0.0;
  double phi = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vec3 operator*(double s, const Vec3& a) {
    return {s * a.x, s * a.y, s * a.z};
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Great-circle angle between two unit vectors, stable at both small and
/// near-antipodal separations.
double great_circle_angle(const Vec3& a, const Vec3& b);

/// Continuous pixel position on an equirectangular raster.
///
/// Integer `col`/`row` address pixel centres; `col` wraps modulo `width`.
struct PixelCoord {
  double col = 0.0;
  double row = 0.0;
  int width = 0;
  int height = 0;
};

/// Lifts latitude/longitude onto the unit sphere:
/// (sin t cos phi, sin t sin phi, cos t) with colatitude t = theta + pi/2.
Vec3 angles_to_sphere(const AngularCoord& a);

/// Inverse of angles_to_sphere. At the poles the azimuth is undefined and is
/// reported as 0; `degenerate` (when given) is set in that case.
AngularCoord sphere_to_angles(const Vec3& v, bool* degenerate = nullptr);

/// Stereographic projection from the +z pole, (x / (1 - z), y / (1 - z)).
/// Throws SingularityError at z == 1.
std::array<double, 2> sphere_to_catadioptric(const Vec3& v);

/// Same projection evaluated in angular form, (cot(t/2) cos phi, cot(t/2) sin phi).
std::array<double, 2> catadioptric_from_angles(const AngularCoord& a);

/// Equirectangular raster convention. Both throw ShapeError unless
/// width == 2 * height.
AngularCoord pixel_to_angles(const PixelCoord& p);
PixelCoord angles_to_pixel(const AngularCoord& a, int width, int height);

/// Throws ShapeError unless width == 2 * height and both are positive.
void require_equirect(int width, int height);

/// Pixel centre -> unit sphere, without range checks. Rows outside the raster
/// continue smoothly across the poles.
Vec3 lift_pixel(double col, double row, int width, int height);

/// Unit sphere -> continuous pixel, col wrapped into [0, width).
PixelCoord project_to_pixel(const Vec3& v, int width, int height);

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Proper rotation of R^3.
///
/// Built from Euler angles in the fixed order R = Yaw(Z) * Pitch(X) * Roll(Y)
/// acting on column vectors. The angles reported by pitch()/roll()/yaw() are
/// the decomposition of the stored matrix in that same order.
class Rotation3 {
 public:
  Rotation3();  // identity

  /// Throws ArgumentError on non-finite input.
  static Rotation3 from_euler(double pitch, double roll, double yaw);
  static Rotation3 from_matrix(const Mat3& m);

  double pitch() const { return pitch_; }
  double roll() const { return roll_; }
  double yaw() const { return yaw_; }
  const Mat3& matrix() const { return m_; }

  /// True only for the exact identity matrix.
  bool is_identity() const;

  Rotation3 inverse() const;
  Vec3 apply(const Vec3& v) const;

  friend Rotation3 operator*(const Rotation3& a, const Rotation3& b);

 private:
  void decompose();

  Mat3 m_;
  double pitch_ = 0.0;
  double roll_ = 0.0;
  double yaw_ = 0.0;
};

inline Vec3 rotate(const Vec3& v, const Rotation3& r) { return r.apply(v); }
inline Rotation3 rotation_from_euler(double pitch, double roll, double yaw) {
  return Rotation3::from_euler(pitch, roll, yaw);
}

}  // namespace omniflow
