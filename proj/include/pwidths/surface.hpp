#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pwidths {

using Vec3 = Eigen::Vector3d;

enum class SurfaceKind { RoundSphere, Ellipsoid, FlatRect };

/// One of the three parametric ambient surfaces.
///
/// Ellipsoids are described by their semi-axes: E(a1,a2,a3) = {Σ x_i²/a_i² = 1},
/// restricted to 0.5 <= a_i <= 2. The flat rectangle is the patch
/// [-w/2, w/2] x [-h/2, h/2] embedded in the plane z = 0.
class Surface {
 public:
  static Surface round_sphere();
  static Surface ellipsoid(double a1, double a2, double a3);
  static Surface flat_rect(double width, double height);

  SurfaceKind kind() const noexcept { return kind_; }
  const std::array<double, 3>& params() const noexcept { return params_; }
  std::string kind_name() const;

  /// Conservative lower bound for the injectivity radius: π on the round
  /// sphere, π/2 on supported ellipsoids, half the shorter side on a rectangle.
  double inj_lower_bound() const noexcept { return inj_; }

  /// Value of the defining function (zero on the surface).
  double defining_function(const Vec3& x) const;
  Vec3 unit_normal(const Vec3& p) const;
  double gaussian_curvature(const Vec3& p) const;

  /// Orthonormal basis (e1, e2) of the tangent plane at p; e1 x e2 = normal.
  std::pair<Vec3, Vec3> tangent_basis(const Vec3& p) const;
  Vec3 project_tangent(const Vec3& p, const Vec3& v) const;

  /// Nearest-point style projection of an ambient point onto the surface.
  Vec3 project(const Vec3& x) const;
  /// Throws OutOfDomain unless p lies on the surface to 1e-12.
  void check_point(const Vec3& p) const;
  bool contains(const Vec3& p, double tol = 1e-12) const;

  nlohmann::json to_json() const;
  static Surface from_json(const nlohmann::json& j);

 private:
  Surface(SurfaceKind kind, std::array<double, 3> params, double inj)
      : kind_(kind), params_(params), inj_(inj) {}

  SurfaceKind kind_;
  std::array<double, 3> params_;
  double inj_;
};

/// Minimizing geodesic segment between two points, sampled uniformly in arclength.
struct GeodesicSegment {
  Vec3 start;
  Vec3 end;
  std::vector<Vec3> samples;
  std::vector<double> arclength;
  double length = 0.0;
  /// Unit tangent at `start`, pointing into the segment.
  Vec3 tangent_start;
  /// Unit velocity at `end`, pointing out of the segment (away from `start`).
  Vec3 tangent_end;
};

GeodesicSegment geodesic_between(const Surface& surface, const Vec3& p, const Vec3& q,
                                 int n_samples = 65);

/// Point at arclength s along the segment (0 <= s <= length).
Vec3 point_on_segment(const Surface& surface, const GeodesicSegment& seg, double s);

Vec3 exp_map(const Surface& surface, const Vec3& p, const Vec3& v);

/// Inverse of exp_map below the injectivity radius, read off geodesic_between.
Vec3 log_map(const Surface& surface, const Vec3& p, const Vec3& q);

double distance(const Surface& surface, const Vec3& p, const Vec3& q);

/// Final state of a geodesic launched from p with unit velocity, integrated
/// for a given arclength. Used by the shooting solver and the Jacobi-field code.
struct GeodesicEndState {
  Vec3 position;
  Vec3 velocity;
};

GeodesicEndState integrate_geodesic(const Surface& surface, const Vec3& p, const Vec3& unit_v,
                                    double length, std::vector<Vec3>* samples = nullptr,
                                    int n_samples = 0);

/// Geodesic acceleration x'' for unit-speed motion on the surface.
Vec3 geodesic_acceleration(const Surface& surface, const Vec3& x, const Vec3& v);

// ---------------------------------------------------------------------------
// Principal geodesics γ_i = E ∩ {x_i = 0} and metric tuning.

struct PrincipalLengths {
  std::array<double, 3> ell{};
};

double ellipse_perimeter(double b, double c);

PrincipalLengths principal_geodesic_lengths(double a1, double a2, double a3);

/// Central finite-difference Jacobian of the principal-length map.
Eigen::Matrix3d principal_lengths_jacobian(const std::array<double, 3>& a, double h = 1e-5);

struct TunedEllipsoid {
  std::array<double, 3> a{1.0, 1.0, 1.0};
  double residual = 0.0;
  int iterations = 0;
};

/// Damped Newton from (1,1,1) for lengths (2π, 2π+μ, 2π+2μ).
TunedEllipsoid tune_ellipsoid(double mu);

}  // namespace pwidths
