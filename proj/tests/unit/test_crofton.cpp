#include "common.hpp"

#include "pwidths/crofton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace pwidths;
using std::numbers::pi;

namespace {

SpherePolynomial poly_z() { return SpherePolynomial::linear(0, 0, 1, 0); }

SpherePolynomial poly_xy() {
  std::vector<double> f(SpherePolynomial::monomial_count(2), 0.0);
  f[SpherePolynomial::monomial_index(1, 1)] = 1.0;
  return SpherePolynomial(2, f, std::vector<double>(SpherePolynomial::monomial_count(1), 0.0));
}

Eigen::Matrix3d rotation(double angle, const Eigen::Vector3d& axis) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace

TEST_SUITE("crofton") {

TEST_CASE("coefficient layout") {
  for (int k = 1; k <= 6; ++k) {
    const auto p = SpherePolynomial::random(k, 3);
    CHECK(static_cast<int>(p.f().size() + p.g().size()) == (k + 1) * (k + 1));
    CHECK(p.coeff_norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(SpherePolynomial::monomial_index(0, 0) == 0);
  CHECK(SpherePolynomial::monomial_index(1, 0) == 1);
  CHECK(SpherePolynomial::monomial_index(0, 1) == 2);
  CHECK(SpherePolynomial::monomial_index(1, 1) == 4);
  CHECK_ERROR(SpherePolynomial(1, {0, 0, 0}, {0}), InvalidArgument);
  CHECK_ERROR(SpherePolynomial(1, {1, 0}, {0}), InvalidArgument);
  CHECK_ERROR(SpherePolynomial(0, {1}, {}), InvalidArgument);
  CHECK(poly_xy()(Eigen::Vector3d(0.6, 0.8, 0)) == doctest::Approx(0.48));
}

TEST_CASE("restriction of z to a circle through the poles") {
  const auto t = restrict_to_circle(poly_z(), GreatCircle(Eigen::Vector3d(1, 0, 0)));
  CHECK(std::abs(t.c[0]) < 1e-14);
  CHECK(std::abs(std::hypot(t.c[1], t.s[1]) - 1.0) < 1e-14);
  CHECK(std::abs(t.c[1] * t.s[1]) < 1e-14);
  for (int j = 2; j <= t.degree(); ++j) CHECK(std::abs(t.c[j]) + std::abs(t.s[j]) < 1e-14);
}

TEST_CASE("restriction of z to the equator vanishes") {
  const GreatCircle eq(Eigen::Vector3d(0, 0, 1));
  const auto t = restrict_to_circle(poly_z(), eq);
  CHECK(t.max_abs_coeff() < 1e-15);
  CHECK_ERROR(zeros_on_circle(t), IdenticallyZeroOnCircle);
  CHECK_ERROR(count_zeros_on_circle(poly_z(), eq), IdenticallyZeroOnCircle);
}

TEST_CASE("restriction of xy to the equator") {
  const GreatCircle eq(Eigen::Vector3d(0, 0, 1));
  const auto t = restrict_to_circle(poly_xy(), eq);
  const auto [e1, e2] = eq.basis();
  CHECK((e1 - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK((e2 - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
  for (int j = 0; j <= t.degree(); ++j) {
    CHECK(std::abs(t.c[j]) < 1e-14);
    CHECK(std::abs(t.s[j] - (j == 2 ? 0.5 : 0.0)) < 1e-14);
  }
  for (double th = 0; th < 2 * pi; th += 0.37) CHECK(std::abs(t(th) - 0.5 * std::sin(2 * th)) < 1e-14);

  const auto via_fn = restrict_to_circle(
      2, [](const Eigen::Vector3d& x) { return x[0] * x[1]; }, eq);
  for (int j = 0; j <= t.degree(); ++j) CHECK(std::abs(via_fn.s[j] - t.s[j]) < 1e-14);
}

TEST_CASE("zero counts") {
  CHECK(count_zeros_on_circle(poly_z(), GreatCircle(Eigen::Vector3d(0.6, 0, 0.8))) == 2);
  CHECK(count_zeros_on_circle(poly_xy(), GreatCircle(Eigen::Vector3d(0, 0, 1))) == 4);

  std::vector<double> f(SpherePolynomial::monomial_count(2), 0.0);
  f[0] = -0.5;
  f[SpherePolynomial::monomial_index(2, 0)] = 1.0;
  f[SpherePolynomial::monomial_index(0, 2)] = 1.0;
  const SpherePolynomial ring(2, f, std::vector<double>(3, 0.0));
  CHECK(count_zeros_on_circle(ring, GreatCircle(Eigen::Vector3d(0, 0, 1))) == 0);

  const auto zs = zeros_on_circle(restrict_to_circle(poly_xy(), GreatCircle(Eigen::Vector3d(0, 0, 1))));
  REQUIRE(zs.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(zs[i] - i * pi / 2) < 1e-10);

  // Tangency: 1 - cos θ has a double root at 0 and counts once.
  TrigPolynomial tangent{{1.0, -1.0}, {0.0, 0.0}};
  CHECK(zeros_on_circle(tangent).size() == 1);
  CHECK_ERROR(GreatCircle(Eigen::Vector3d(1, 1, 0)), InvalidArgument);
}

TEST_CASE("calibration on a great circle") {
  const auto est = crofton_length(poly_z(), 100000, 7);
  CHECK(est.length_mean == 2 * pi);
  CHECK(est.std_error == 0.0);
  CHECK(est.n_samples == 100000);
  CHECK_ERROR(crofton_length(poly_z(), 50, 7), InvalidArgument);
}

TEST_CASE("latitude circle length") {
  const auto est = crofton_length(SpherePolynomial::linear(0, 0, 1, -0.6), 100000, 11);
  CHECK(std::abs(est.length_mean - 2 * pi * 0.8) <= 3 * est.std_error);
  CHECK(est.std_error > 0.0);
  CHECK(est.max_count <= 2);
}

TEST_CASE("random cubic respects the degree bound") {
  const auto est = crofton_length(SpherePolynomial::random(3, 2024), 100000, 5);
  CHECK(est.length_mean <= 6 * pi + 3 * est.std_error);
  CHECK(est.max_count <= 6);
}

TEST_CASE("width upper bounds") {
  CHECK(width_upper_bound(1) == 2 * pi);
  CHECK(width_upper_bound(3) == 2 * pi);
  CHECK(width_upper_bound(4) == 4 * pi);
  CHECK(width_upper_bound(9) == 6 * pi);
  CHECK_ERROR(width_upper_bound(0), InvalidArgument);
}

TEST_CASE("mass bound for k = 1, 2") {
  for (int k = 1; k <= 2; ++k) {
    const auto rep = verify_mass_bound(k, 50, 4000, 99);
    CHECK(rep.passed);
    CHECK(rep.per_trial.size() == 50);
    CHECK(rep.bound == 2 * pi * k);
    CHECK(rep.max <= rep.bound + 3 * rep.max_std_error);
    for (const auto& t : rep.per_trial) CHECK(t.max_count <= 2 * k);
  }
  const auto a = verify_mass_bound(2, 5, 2000, 42);
  const auto b = verify_mass_bound(2, 5, 2000, 42);
  for (int i = 0; i < 5; ++i) {
    CHECK(a.per_trial[i].length_mean == b.per_trial[i].length_mean);
    CHECK(a.per_trial[i].std_error == b.per_trial[i].std_error);
  }
  CHECK(a.max == b.max);
  CHECK_ERROR(verify_mass_bound(0, 5, 2000, 1), InvalidArgument);
  CHECK_ERROR(verify_mass_bound(2, 0, 2000, 1), InvalidArgument);
}

TEST_CASE("projective invariance") {
  const auto p = SpherePolynomial::random(3, 8);
  const auto base = crofton_length(p, 5000, 3);
  for (double c : {-2.5, 1e-3, 17.0}) {
    const auto est = crofton_length(p.scaled(c), 5000, 3);
    CHECK(est.length_mean == base.length_mean);
    CHECK(est.std_error == base.std_error);
  }
}

TEST_CASE("rotation equivariance of zero counts") {
  for (int k = 1; k <= 4; ++k) {
    const auto p = SpherePolynomial::random(k, 100 + k);
    const Eigen::Matrix3d R = rotation(0.3 + k, Eigen::Vector3d(1, -2, 0.5 * k));
    const auto pr = p.compose_rotation(R);
    const Eigen::Vector3d x = Eigen::Vector3d(0.2, -0.7, 0.4).normalized();
    CHECK(std::abs(pr(x) - p(R * x)) < 1e-12);
    for (int i = 0; i < 40; ++i) {
      const Eigen::Vector3d xi = crofton_pole(77, i, 0);
      CHECK(count_zeros_on_circle(pr, GreatCircle(xi)) ==
            count_zeros_on_circle(p, GreatCircle((R * xi).normalized())));
    }
  }
}

TEST_CASE("estimates do not depend on the thread count") {
  const auto p = SpherePolynomial::random(2, 55);
  const auto one = crofton_length(p, 6000, 9, 1);
  const auto three = crofton_length(p, 6000, 9, 3);
  CHECK(one.length_mean == three.length_mean);
  CHECK(one.std_error == three.std_error);
  CHECK(one.max_count == three.max_count);
}

TEST_CASE("poles are uniform unit vectors") {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  const int n = 20000;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d xi = crofton_pole(1, i, 0);
    worst = std::max(worst, std::abs(xi.norm() - 1.0));
    mean += xi;
  }
  mean /= n;
  CHECK(worst < 1e-14);
  CHECK(mean.norm() < 5.0 / std::sqrt(3.0 * n));
  CHECK((crofton_pole(1, 5, 0) - crofton_pole(1, 5, 1)).norm() > 1e-6);
}

}  // TEST_SUITE
