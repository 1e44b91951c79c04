#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace pwidths {

/// Normalized: W(t) = (1 + cos πt)/π², wells ±1.
/// Shifted: W(t) = 1 - cos t, wells 0 and 2π. The two are related by u = π(1 + t).
enum class PotentialKind { Normalized, Shifted };

double potential(double t, PotentialKind kind = PotentialKind::Normalized);
double potential_d1(double t, PotentialKind kind = PotentialKind::Normalized);
double potential_d2(double t, PotentialKind kind = PotentialKind::Normalized);

/// ℍ(t) = (4/π) atan(e^t) - 1, or 4 atan(e^t) for the shifted wells.
double heteroclinic(double t, PotentialKind kind = PotentialKind::Normalized);
double heteroclinic_d1(double t, PotentialKind kind = PotentialKind::Normalized);

/// ∫ ℍ'(t)² dt by adaptive quadrature.
double h0(PotentialKind kind = PotentialKind::Normalized);
/// ∫ ½ℍ'² + W(ℍ) dt, the equipartition form of the same constant.
double h0_equipartition(PotentialKind kind = PotentialKind::Normalized);

// ---------------------------------------------------------------------------
// 1D states

/// Sphere: axisymmetric field on S², cell-centered latitudes θ_i = (i + ½)π/N.
/// Line: flat interval [-X, X] with N vertices, endpoints fixed.
enum class Geometry1D { Sphere, Line };

struct FieldState1D {
  Geometry1D geometry = Geometry1D::Sphere;
  double eps = 0.1;
  double h = 0.0;
  std::vector<double> grid;
  Eigen::VectorXd values;
  PotentialKind kind = PotentialKind::Normalized;

  int size() const { return static_cast<int>(values.size()); }

  static FieldState1D sphere(int N, double eps, const std::function<double(double)>& u0);
  static FieldState1D line(int N, double half_length, double eps,
                           const std::function<double(double)>& u0);
};

struct EnergyParts {
  double gradient = 0.0;
  double potential = 0.0;
  double total() const { return gradient + potential; }
};

EnergyParts energy_parts(const FieldState1D& state);
double energy(const FieldState1D& state);
/// Pointwise ε²Δ_h u - W'(u) (zero at the fixed endpoints of a Line state).
Eigen::VectorXd residual_vector(const FieldState1D& state);
double pde_residual(const FieldState1D& state);
double varifold_mass(const FieldState1D& state);

/// Negative eigenvalues of the discrete second variation.
int morse_index(const FieldState1D& state);

struct AxisymmetricSolution {
  FieldState1D state;
  int iterations = 0;
  double residual = 0.0;
  int index = -1;
};

/// Odd equatorial critical point of the latitude ODE by damped Newton.
AxisymmetricSolution solve_axisymmetric(double eps, int N);

/// Newton solve of a Line state with its endpoint values held fixed.
int relax_line(FieldState1D& state, double tol = 1e-12, int max_iter = 60);

// ---------------------------------------------------------------------------
// 2D glued kinks on [-L, L]²

struct FieldState2D {
  double L = 25.0;
  int n = 0;
  double eps = 1.0;
  double h = 0.0;
  PotentialKind kind = PotentialKind::Normalized;
  /// Row-major: values[j*n + i] sits at (x_i, y_j), x_i = -L + i·h.
  Eigen::VectorXd values;
  std::vector<Eigen::Vector2d> directions;

  double x(int i) const { return -L + i * h; }
  double at(int i, int j) const { return values[static_cast<Eigen::Index>(j) * n + i]; }
  /// Bilinear interpolation, clamped to the box.
  double sample(double px, double py) const;
};

/// ℍ(σ·dist/ε) with dist the distance to the union of rays and σ = ±1
/// alternating by sector; the sector containing angle 0⁺ is positive.
double glued_ansatz_value(const std::vector<Eigen::Vector2d>& directions, double eps, double x,
                          double y, PotentialKind kind = PotentialKind::Normalized);
FieldState2D glued_ansatz(const std::vector<Eigen::Vector2d>& directions, double L, double eps,
                          int n);

double energy(const FieldState2D& state);
double varifold_mass(const FieldState2D& state);
/// max |ε²Δ_h u - W'(u)| over interior points at least `collar` away from ∂box.
double pde_residual(const FieldState2D& state, double collar = 0.0);

struct GluedSolution {
  FieldState2D state;
  int iterations = 0;
  double residual = 0.0;
  double interior_residual = 0.0;
  int direct_fallbacks = 0;
};

GluedSolution relax_glued_kinks(const std::vector<Eigen::Vector2d>& directions, double L,
                                double eps, int n);
/// Newton relaxation of an arbitrary state with its boundary trace frozen.
GluedSolution relax_field(FieldState2D state, double tol = 1e-10, int max_iter = 60);

/// Sign changes of u along the boundary loop of the box.
int boundary_zero_crossings(const FieldState2D& state);

/// Distance from (x, y) to the union of rays t·d, t >= 0.
double distance_to_rays(const std::vector<Eigen::Vector2d>& directions, double x, double y);

/// max(1 - u², |∇u|) over grid points farther than `dist` from the rays and
/// from the box boundary (second-order gradients).
double localization_defect(const FieldState2D& state, double dist);

std::vector<Eigen::Vector2d> directions_from_degrees(const std::vector<double>& degrees);

}  // namespace pwidths
