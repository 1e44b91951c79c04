#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace pwidths {

/// p = f(x,y) + z·g(x,y) restricted to S², deg f <= k, deg g <= k-1.
///
/// Both coefficient vectors use graded order: 1, x, y, x², xy, y², x³, ...
class SpherePolynomial {
 public:
  SpherePolynomial(int k, std::vector<double> f, std::vector<double> g);

  static int monomial_count(int degree) { return (degree + 1) * (degree + 2) / 2; }
  /// Index of x^a y^b in graded order.
  static int monomial_index(int a, int b) { return monomial_count(a + b - 1) + b; }

  /// Latitude polynomial a·z + c (k = 1).
  static SpherePolynomial linear(double cx, double cy, double cz, double c0);
  /// Gaussian coefficients, normalized to unit Euclidean norm.
  static SpherePolynomial random(int k, std::uint64_t key);

  int k() const noexcept { return k_; }
  const std::vector<double>& f() const noexcept { return f_; }
  const std::vector<double>& g() const noexcept { return g_; }
  double coeff_norm() const;

  double operator()(const Eigen::Vector3d& x) const;
  SpherePolynomial scaled(double c) const;
  /// The polynomial x ↦ p(R x), re-expressed in A_k using z² = 1 - x² - y².
  SpherePolynomial compose_rotation(const Eigen::Matrix3d& R) const;

 private:
  int k_;
  std::vector<double> f_;
  std::vector<double> g_;
};

struct GreatCircle {
  Eigen::Vector3d pole;

  explicit GreatCircle(const Eigen::Vector3d& xi);
  /// Orthonormal (e1, e2) spanning the circle; θ ↦ cos θ e1 + sin θ e2.
  std::pair<Eigen::Vector3d, Eigen::Vector3d> basis() const;
};

/// Σ_j c_j cos jθ + s_j sin jθ for 0 <= j <= degree (s_0 = 0).
struct TrigPolynomial {
  std::vector<double> c;
  std::vector<double> s;

  int degree() const { return static_cast<int>(c.size()) - 1; }
  double operator()(double theta) const;
  double max_abs_coeff() const;
};

TrigPolynomial restrict_to_circle(const SpherePolynomial& poly, const GreatCircle& circle);
TrigPolynomial restrict_to_circle(int k, const std::function<double(const Eigen::Vector3d&)>& fn,
                                  const GreatCircle& circle);

/// Distinct zeros in [0, 2π). Throws IdenticallyZeroOnCircle when every
/// coefficient falls below `zero_tol` relative to `scale`.
std::vector<double> zeros_on_circle(const TrigPolynomial& t, double scale = 1.0,
                                    double zero_tol = 1e-13);

int count_zeros_on_circle(const SpherePolynomial& poly, const GreatCircle& circle);

struct CroftonEstimate {
  double length_mean = 0.0;
  double std_error = 0.0;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  long long rejected = 0;
  int max_count = 0;
};

/// Uniform pole for sample i (attempt numbers redraw rejected circles).
Eigen::Vector3d crofton_pole(std::uint64_t seed, long long sample, int attempt);

CroftonEstimate crofton_length(const SpherePolynomial& poly, long long n_samples,
                               std::uint64_t seed, int threads = 1);

double width_upper_bound(long long p);

struct MassBoundReport {
  int k = 0;
  int trials = 0;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<CroftonEstimate> per_trial;
  double max = 0.0;
  double max_std_error = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool passed = false;
};

MassBoundReport verify_mass_bound(int k, int trials, long long n_samples, std::uint64_t seed,
                                  int threads = 1);

}  // namespace pwidths
