#include "common.hpp"

#include "pwidths/rng.hpp"
#include "pwidths/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace pwidths;
using std::numbers::pi;

namespace {

const cplx I(0.0, 1.0);

cplx kink_a(cplx lambda) { return (lambda - I) / (lambda + I); }

ShiftedField non_solution() {
  return ShiftedField::analytic([](double x, double y) { return x * y / 10.0; },
                                [](double, double y) { return y / 10.0; },
                                [](double x, double) { return x / 10.0; }, 10.0);
}

// 2π - ℍ̃(x), the kink seen through (x, y) ↦ (-x, -y).
ShiftedField flipped_kink() {
  return ShiftedField::analytic([](double x, double) { return 2 * pi - 4 * std::atan(std::exp(x)); },
                                [](double x, double) { return -2 / std::cosh(x); },
                                [](double, double) { return 0.0; }, 25.0);
}

double sup(const Mat2C& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("Pauli algebra") {
  using namespace pauli;
  CHECK(check_algebra());
  CHECK(sup(s1() * s1() - identity()) == 0.0);
  CHECK(sup(s2() * s2() - identity()) == 0.0);
  CHECK(sup(s3() * s3() - identity()) == 0.0);
  CHECK(sup(s1() * s2() - I * s3()) == 0.0);
}

TEST_CASE("trivial connection") {
  const auto zero = ShiftedField::constant(0.0);
  for (cplx lam : {cplx(0.3, 0.9), cplx(2.0, 0.0), I, cplx(-1.5, 0.4)}) {
    const auto lp = lax_connection(zero, 1.3, -0.7, lam);
    CHECK(sup(lp.A - (I / 4.0) * K_of(lam) * pauli::s3()) < 1e-15);
    CHECK(sup(lp.B + 0.25 * J_of(lam) * pauli::s3()) < 1e-15);
  }
  CHECK(std::abs(K_of(I) - 2.0 * I) < 1e-15);
  CHECK(std::abs(J_of(I)) < 1e-15);
  const auto lp = lax_connection(ShiftedField::kink(), 0.5, 0.0, I);
  // With J(i) = 0, B carries only the field terms.
  const auto s = ShiftedField::kink().eval(0.5, 0.0);
  const Mat2C expectB = 0.25 * (-(I + std::cos(s.u) / I) * pauli::s3() + cplx(s.ux, -s.uy) * pauli::s2() -
                                (std::sin(s.u) / I) * pauli::s1());
  CHECK(sup(lp.B - expectB) < 1e-15);
  CHECK_ERROR(lax_connection(zero, 0, 0, cplx(0, 0)), InvalidArgument);
}

TEST_CASE("kink connection minus the trivial one") {
  const auto kink = ShiftedField::kink();
  const cplx lam(0.6, 0.8);
  double worst = 0.0;
  for (double x = -8; x <= 8; x += 0.5)
    for (double y = -3; y <= 3; y += 1.5) {
      const Mat2C d = lax_connection(kink, x, y, lam).A - (I / 4.0) * K_of(lam) * pauli::s3();
      const double sh = 1 / std::cosh(x), th = std::tanh(x);
      const Mat2C expect =
          (I / 4.0) * 2.0 * (sh * sh / lam * pauli::s3() - sh * pauli::s2() + sh * th / lam * pauli::s1());
      worst = std::max(worst, sup(d - expect));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("connections are traceless") {
  const auto saddle = ShiftedField::saddle(0.6);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = -10 + 20 * rng::uniform(3, 3 * i), y = -10 + 20 * rng::uniform(3, 3 * i + 1);
    const cplx lam = std::polar(0.5 + rng::uniform(3, 3 * i + 2), 0.1 + 2.9 * rng::uniform(4, i));
    const auto lp = lax_connection(saddle, x, y, lam);
    worst = std::max({worst, std::abs(lp.A.trace()), std::abs(lp.B.trace())});
  }
  CHECK(worst < 1e-15);
}

TEST_CASE("compatibility residual") {
  const cplx lam(0.6, 0.8);
  CHECK(compatibility_residual(ShiftedField::constant(pi, 10.0), lam, 64) < 1e-12);
  CHECK(compatibility_residual(ShiftedField::kink(0.0, 10.0), lam, 1024, 10.0) < 1e-6);
  CHECK(compatibility_residual(non_solution(), lam, 256, 10.0) > 1e-3);
  CHECK_ERROR(compatibility_residual(ShiftedField::kink(), lam, 8), InvalidArgument);
}

TEST_CASE("saddle oracle solves the equation") {
  const double a = 0.6, b = 0.8;
  auto u = [&](double x, double y) { return 4 * std::atan((b / a) * std::cosh(a * y) / std::cosh(b * x)); };
  const auto field = ShiftedField::saddle(a);
  const double h = 1e-3;
  double worst = 0.0;
  for (double x = -4; x <= 4; x += 0.8)
    for (double y = -4; y <= 4; y += 0.8) {
      const double lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4 * u(x, y)) / (h * h);
      worst = std::max(worst, std::abs(lap - std::sin(u(x, y))));
      const auto s = field.eval(x, y);
      CHECK(std::abs(s.u - u(x, y)) < 1e-13);
      CHECK(std::abs(s.ux - (u(x + h, y) - u(x - h, y)) / (2 * h)) < 1e-5);
    }
  CHECK(worst < 1e-5);
  CHECK(compatibility_residual(ShiftedField::saddle(a, 10.0), cplx(0.6, 0.8), 512, 10.0) < 1e-5);
  CHECK_ERROR(ShiftedField::saddle(1.2), InvalidArgument);
}

TEST_CASE("trivial frame") {
  for (cplx lam : {cplx(0.3, 0.9), cplx(2.0, 1.0)}) CHECK(sup(frame_trivial(0, 0, lam) - Mat2C::Identity()) < 1e-15);
  const double th = 1.1, q = std::cos(th), p = std::sin(th);
  const cplx lam = std::polar(1.0, th);
  const double x = 0.7, y = -1.3;
  const Mat2C f = frame_trivial(x, y, lam);
  CHECK(std::abs(f(0, 0) - std::exp(-(p * x + q * y) / 2)) < 1e-14);
  CHECK(std::abs(f(1, 1) - std::exp((p * x + q * y) / 2)) < 1e-14);
  CHECK(std::abs(f(0, 1)) + std::abs(f(1, 0)) == 0.0);
  const auto zero = ShiftedField::constant(0.0);
  for (cplx l : {lam, cplx(0.4, 1.7)}) {
    auto fr = [&](double x_, double y_) { return frame_trivial(x_, y_, l); };
    CHECK(parallelism_residual(fr, zero, 0.3, 0.2, l) < 1e-10);
  }
}

TEST_CASE("heteroclinic frame") {
  double det_err = 0.0, par = 0.0;
  const auto kink = ShiftedField::kink();
  for (int i = 0; i < 100; ++i) {
    const double x = -3 + 6 * rng::uniform(10, 4 * i), y = -3 + 6 * rng::uniform(10, 4 * i + 1);
    const cplx lam = std::polar(0.5 + 1.5 * rng::uniform(10, 4 * i + 2), 0.05 + 3.0 * rng::uniform(10, 4 * i + 3));
    auto fr = [&](double a, double b) { return frame_heteroclinic(a, b, lam); };
    det_err = std::max(det_err, std::abs(fr(x, y).determinant() - kink_a(lam)) / std::abs(kink_a(lam)));
    par = std::max(par, parallelism_residual(fr, kink, x, y, lam));
  }
  CHECK(det_err < 1e-12);
  CHECK(par < 1e-8);

  CHECK(std::abs(frame_heteroclinic(0.3, -0.2, 2.0).determinant() - cplx(3, -4) / 5.0) < 1e-14);
  const Mat2C at_i = frame_heteroclinic(0.3, -0.2, I);
  CHECK(std::abs(at_i.determinant()) < 1e-14);
  CHECK(at_i.col(0).norm() > 0.1);
  CHECK(at_i.col(1).norm() > 0.1);

  const cplx lam(0.6, 0.8);
  const double y = 0.7;
  const Vec2C col = std::exp(-I * K_of(lam) * 40.0 / 4.0) * frame_heteroclinic(40.0, y, lam).col(0);
  const Vec2C expect(std::exp(-J_of(lam) * y / 4.0), 0.0);
  CHECK((col - expect).norm() < 1e-12);

  CHECK_ERROR(frame_heteroclinic(0, 0, -I), LambdaAtPole);
}

TEST_CASE("flipped frame is parallel for the flipped field") {
  const auto field = flipped_kink();
  for (cplx lam : {cplx(0.3, 0.8), I, cplx(2.0, 0.5)}) {
    auto G = [&](double x, double y) { return Mat2C(I * pauli::s2() * frame_heteroclinic(-x, -y, lam)); };
    for (double x : {-1.5, 0.4, 2.0}) CHECK(parallelism_residual(G, field, x, -0.3, lam) < 1e-8);
  }
}

TEST_CASE("Jost data of trivial and kink fields") {
  const auto zero = ShiftedField::constant(0.0);
  for (double th : {0.3, 1.5, 2.8}) CHECK(std::abs(jost_solve(zero, std::polar(1.0, th)).a_value - 1.0) < 1e-10);
  const auto kink = ShiftedField::kink();
  for (double th : {pi / 6, pi / 3, 2 * pi / 3}) {
    const cplx lam = std::polar(1.0, th);
    const auto j = jost_solve(kink, lam);
    CHECK(std::abs(j.a_value - kink_a(lam)) < 1e-6);
    CHECK(j.a_spread < 1e-8);
    CHECK(j.majorant_excess <= 0.0);
  }
  CHECK(std::abs(jost_solve(kink, I).a_value) < 1e-6);
  const auto off = jost_solve(kink, cplx(0.5, 1.5));
  CHECK(std::abs(off.a_value - kink_a(cplx(0.5, 1.5))) < 1e-6);

  CHECK_ERROR(jost_solve(kink, cplx(0.5, -0.5)), InvalidArgument);
  CHECK_ERROR(jost_solve(kink, cplx(1.0, 1e-9)), InvalidArgument);
  CHECK_ERROR(jost_solve(kink, cplx(0.0, 0.0)), InvalidArgument);
  CHECK_ERROR(jost_solve(non_solution(), I), PreconditionDecayFailed);
}

TEST_CASE("Wronskian is independent of the evaluation point") {
  const auto saddle = ShiftedField::saddle(0.6);
  JostOptions opt;
  for (double y0 : {-2.0, 0.0, 3.0}) {
    opt.y0 = y0;
    for (double th : {0.4, 1.3, 2.5}) {
      const auto j = jost_solve(saddle, std::polar(1.0, th), opt);
      CHECK(j.a_spread < 1e-8);
      CHECK(j.majorant_excess <= 0.0);
    }
  }
}

TEST_CASE("rotation covariance") {
  const auto base = ShiftedField::kink(0.0);
  for (double beta : {0.3, -0.5}) {
    const auto rot = ShiftedField::kink(beta);
    for (double th : {1.0, 1.6, 2.1}) {
      const cplx lam = std::polar(1.0, th);
      const cplx a0 = jost_solve(base, lam).a_value;
      const cplx ab = jost_solve(rot, lam * std::polar(1.0, -beta)).a_value;
      CHECK(std::abs(ab - a0) < 1e-6);
    }
  }
}

TEST_CASE("bound states") {
  CHECK(bound_states(ShiftedField::constant(0.0), 32).bound_states.empty());

  const auto sd = bound_states(ShiftedField::kink(), 64);
  REQUIRE(sd.bound_states.size() == 1);
  CHECK(std::abs(sd.bound_states[0].lambda - I) < 1e-4);
  REQUIRE(sd.directions.size() == 2);
  CHECK(directions_match(sd.directions, {{0, 1}, {0, -1}}, 1.0));
  CHECK(sd.circle_samples.size() == 64);

  const double beta = 0.5;
  const double p = std::cos(beta), q = std::sin(beta);
  const auto rd = bound_states(ShiftedField::kink(beta), 64);
  REQUIRE(rd.bound_states.size() == 1);
  CHECK(std::abs(rd.bound_states[0].lambda - cplx(q, p)) < 1e-4);
  CHECK(directions_match(rd.directions, {{-q, p}, {q, -p}}, 1.0));

  const auto st = bound_states(ShiftedField::saddle(0.6), 64);
  REQUIRE(st.bound_states.size() == 2);
  CHECK(std::abs(st.bound_states[0].lambda - cplx(0.6, 0.8)) < 1e-4);
  CHECK(std::abs(st.bound_states[1].lambda - cplx(-0.6, 0.8)) < 1e-4);
  CHECK(verify_antipodal_pairing(st.directions, 1.0).paired);

  CHECK_ERROR(bound_states(ShiftedField::kink(), 4), InvalidArgument);
  CHECK((reflect_to_direction(I) - Eigen::Vector2d(0, 1)).norm() == 0.0);
}

TEST_CASE("geometric ends") {
  CHECK(directions_match(detect_ends_geometric(ShiftedField::kink()), {{0, 1}, {0, -1}}, 1.0));
  const double beta = -0.7;
  const Eigen::Vector2d d(-std::sin(beta), std::cos(beta));
  CHECK(directions_match(detect_ends_geometric(ShiftedField::kink(beta)), {d, -d}, 1.0));
  const auto ends = detect_ends_geometric(ShiftedField::saddle(0.6));
  CHECK(ends.size() == 4);
  CHECK(directions_match(ends, {{0.6, 0.8}, {0.6, -0.8}, {-0.6, 0.8}, {-0.6, -0.8}}, 1.0));
  CHECK_ERROR(detect_ends_geometric(ShiftedField::constant(0.0)), NoCrossings);
}

TEST_CASE("antipodal pairing") {
  CHECK(verify_antipodal_pairing({{0, 1}, {0, -1}}, 5.0).paired);
  CHECK_FALSE(verify_antipodal_pairing({{1, 0}, {0, 1}}, 5.0).paired);
  const Eigen::Vector2d a(std::cos(0.03), std::sin(0.03));
  const auto rep = verify_antipodal_pairing({{1, 0}, {0, 1}, -a, {0, -1}}, 5.0);
  CHECK(rep.paired);
  CHECK(rep.pairs.size() == 2);
  CHECK(rep.max_deviation_deg == doctest::Approx(0.03 * 180 / pi).epsilon(1e-9));
  CHECK_FALSE(verify_antipodal_pairing({{1, 0}, {0, 1}, -a, {0, -1}}, 1.0).paired);
  CHECK_ERROR(verify_antipodal_pairing({{1, 0}, {0, 1}, {-1, 0}}, 5.0), OddCount);
  CHECK(angle_deg({1, 0}, {0, 2}) == doctest::Approx(90.0));
}

TEST_CASE("boundary decay precondition") {
  auto kink = ShiftedField::kink();
  CHECK_NOTHROW(check_boundary_decay(kink));
  CHECK_ERROR(check_boundary_decay(ShiftedField::constant(1.0)), PreconditionDecayFailed);
}

TEST_CASE("grid fields") {
  const int n = 201;
  const double L = 25.0, h = 2 * L / (n - 1);
  Eigen::VectorXd v(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v[j * n + i] = 4 * std::atan(std::exp(-L + i * h));
  const auto g = ShiftedField::grid(L, n, v);
  CHECK(g.is_grid());
  const auto s = g.eval(0.37, 1.1);
  CHECK(std::abs(s.u - 4 * std::atan(std::exp(0.37))) < 1e-3);
  CHECK(std::abs(s.ux - 2 / std::cosh(0.37)) < 1e-3);
  CHECK(std::abs(s.uy) < 1e-12);
  CHECK_ERROR(g.eval(30.0, 0.0), OutOfDomain);
  CHECK_ERROR(ShiftedField::grid(L, 4, Eigen::VectorXd::Zero(16)), InvalidArgument);
}

}  // TEST_SUITE
