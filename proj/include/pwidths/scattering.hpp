#pragma once

#include "pwidths/phase_field.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace pwidths {

using cplx = std::complex<double>;
using Mat2C = Eigen::Matrix2cd;
using Vec2C = Eigen::Vector2cd;

namespace pauli {
Mat2C identity();
Mat2C s1();
Mat2C s2();
Mat2C s3();
/// σ₁² = σ₂² = σ₃² = Id and σ₁σ₂ = iσ₃ to machine precision.
bool check_algebra();
}  // namespace pauli

inline cplx K_of(cplx lambda) { return lambda - 1.0 / lambda; }
inline cplx J_of(cplx lambda) { return lambda + 1.0 / lambda; }

/// Solution of Δu = sin u (wells 0 and 2π) on the box [-L, L]².
///
/// Either analytic (closures for u, ∂ₓu, ∂ᵧu) or sampled on a grid, in which
/// case gradients use fourth-order centered differences and off-grid values
/// use Catmull-Rom bicubic interpolation.
class ShiftedField {
 public:
  struct Sample {
    double u, ux, uy;
  };
  using Fn = std::function<double(double, double)>;

  static ShiftedField analytic(Fn u, Fn ux, Fn uy, double half_width);
  /// Grid of shifted values, row-major (values[j*n + i] at (x_i, y_j)).
  static ShiftedField grid(double half_width, int n, Eigen::VectorXd shifted_values);
  /// Converts a normalized-well state via u = π(1 + ũ).
  static ShiftedField from_state(const FieldState2D& state);

  static ShiftedField constant(double value, double half_width = 25.0);
  /// ℍ̃(x cos β + y sin β): a straight kink whose ends are ±(-sin β, cos β).
  static ShiftedField kink(double beta = 0.0, double half_width = 25.0);
  /// 4 atan((b/a) cosh(a y)/cosh(b x)), a² + b² = 1: ends ±(a, ±b).
  static ShiftedField saddle(double a, double half_width = 25.0);

  double half_width() const noexcept { return L_; }
  bool is_grid() const noexcept { return n_ > 0; }
  int grid_size() const noexcept { return n_; }
  double grid_spacing() const noexcept { return h_; }
  const Eigen::VectorXd& grid_values() const noexcept { return u_; }

  Sample eval(double x, double y) const;
  bool contains(double x, double y) const;

  /// Level-set {u = π} end directions known to the caller, used to exempt
  /// windows from the boundary-decay check.
  std::vector<Eigen::Vector2d> declared_ends;

 private:
  double L_ = 25.0;
  Fn fu_, fux_, fuy_;
  int n_ = 0;
  double h_ = 0.0;
  Eigen::VectorXd u_, ux_, uy_;
};

struct LaxPair {
  Mat2C A;
  Mat2C B;
};

LaxPair lax_connection(const ShiftedField& field, double x, double y, cplx lambda);
LaxPair lax_connection(const ShiftedField::Sample& s, cplx lambda);

/// max over interior nodes of ‖∂ᵧA - ∂ₓB - [B, A]‖ with fourth-order
/// differences on an n×n grid spanning [-R, R]² (R defaults to the field box).
double compatibility_residual(const ShiftedField& field, cplx lambda, int n = 0, double R = 0.0);

Mat2C frame_trivial(double x, double y, cplx lambda);
Mat2C frame_heteroclinic(double x, double y, cplx lambda);

/// max ‖∂ₓΦ - AΦ‖ + ‖∂ᵧΦ - BΦ‖ at (x, y) by centered differences with step h.
double parallelism_residual(const std::function<Mat2C(double, double)>& frame,
                            const ShiftedField& field, double x, double y, cplx lambda,
                            double h = 1e-4);

struct JostPair {
  cplx lambda;
  cplx a_value;
  /// Spread of det(Φ₊,₁, Φ₋,₂) across the five evaluation points.
  double a_spread = 0.0;
  std::vector<double> x;
  /// Gauged columns Ψ₊ = e^{-iKx/4}Φ₊,₁ and Ψ₋ = e^{iKx/4}Φ₋,₂ along the line.
  std::vector<Vec2C> phi_p1;
  std::vector<Vec2C> phi_m2;
  /// Largest violation of the Picard majorant bounds (<= 0 when they hold).
  double majorant_excess = 0.0;
};

struct JostOptions {
  double y0 = 0.0;
  /// Half-width of the integration line; 0 uses the field box.
  double X = 0.0;
  double tol = 1e-11;
  int n_record = 65;
  bool check_decay = true;
};

JostPair jost_solve(const ShiftedField& field, cplx lambda, const JostOptions& opt = {});

/// Throws PreconditionDecayFailed unless max(|sin u|, |∇u|) < tol on ∂box
/// away from windows around the declared (or detected) end rays. The window
/// width is capped at 0.72·L.
void check_boundary_decay(const ShiftedField& field, double tol = 1e-6, double window = 18.0);

struct BoundState {
  double theta;
  cplx lambda;
  double abs_a;
};

struct ScatteringData {
  std::vector<std::pair<double, cplx>> circle_samples;
  std::vector<BoundState> bound_states;
  std::vector<Eigen::Vector2d> directions;
};

/// R(x + iy) = -x + iy as a plane vector.
Eigen::Vector2d reflect_to_direction(cplx lambda);

ScatteringData bound_states(const ShiftedField& field, int n_theta, int threads = 1,
                            double threshold = 1e-3, const JostOptions& opt = {});

/// Crossings of {u = π} with ∂[-0.8L, 0.8L]², as unit vectors merged within 2°.
std::vector<Eigen::Vector2d> detect_ends_geometric(const ShiftedField& field);

struct PairingReport {
  bool paired = false;
  std::vector<std::pair<int, int>> pairs;
  double max_deviation_deg = 0.0;
};

PairingReport verify_antipodal_pairing(const std::vector<Eigen::Vector2d>& directions,
                                       double tol_deg);

/// Angle between two plane vectors in degrees.
double angle_deg(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

/// Every direction in `a` lies within tol_deg of some direction in `b` and
/// vice versa.
bool directions_match(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b,
                      double tol_deg);

}  // namespace pwidths
