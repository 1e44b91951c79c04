// One PASS/FAIL line per acceptance criterion; exit 2 if any criterion fails.

#include "pwidths/crofton.hpp"
#include "pwidths/error.hpp"
#include "pwidths/geodesic_nets.hpp"
#include "pwidths/lattice.hpp"
#include "pwidths/phase_field.hpp"
#include "pwidths/reports.hpp"
#include "pwidths/rng.hpp"
#include "pwidths/scattering.hpp"
#include "pwidths/surface.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pwidths;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<void(Outcome&)> run;
};

NetEmbedding perturbed(NetEmbedding net, double size, std::uint64_t key) {
  for (int u = 0; u < net.graph.vertex_count(); ++u) {
    const auto [e1, e2] = net.surface.tangent_basis(net.p[u]);
    const Vec3 v = size * (rng::gaussian(key, 2 * u) * e1 + rng::gaussian(key, 2 * u + 1) * e2) / std::sqrt(2.0);
    net.p[u] = exp_map(net.surface, net.p[u], v);
  }
  return net;
}

void width_table_exact(Outcome& o) {
  const auto r = run_widths_table(100);
  o.require(r.passed(), "report assertions");
  const auto t = width_table(100);
  int exact = 0;
  for (const auto& e : t.entries) {
    const bool ok = e.floor_sqrt == isqrt(e.p) && e.floor_sqrt * e.floor_sqrt <= e.p &&
                    (e.floor_sqrt + 1) * (e.floor_sqrt + 1) > e.p &&
                    e.value == 2 * pi * static_cast<double>(e.floor_sqrt) && e.crofton_upper == e.value;
    exact += ok;
  }
  o.require(exact == 100 && t.entries.size() == 100, "omega_p = 2pi*floor(sqrt p) for all p");
  o.detail << exact << "/100 entries exact, " << t.pinch.size() << " pinch checks";
}

void counting_identity(Outcome& o) {
  for (long long m = 1; m <= 10; ++m) {
    const auto rep = count_check(m, Rational(1, 4 * m));
    o.require(rep.count == (m + 1) * (m + 1) - 1, "count at m = " + std::to_string(m));
  }
  o.detail << "m = 1..10 with mu = 1/(4m): counts (m+1)^2-1";
}

void crofton_bound(Outcome& o) {
  const auto z = crofton_length(SpherePolynomial::linear(0, 0, 1, 0), 100000, 1);
  o.require(z.length_mean == 2 * pi && z.std_error == 0.0, "great circle calibration");
  const auto lat = crofton_length(SpherePolynomial::linear(0, 0, 1, -0.6), 100000, 2);
  o.require(std::abs(lat.length_mean - 2 * pi * 0.8) <= 3 * lat.std_error, "latitude circle");
  double worst = -1e300;
  for (int k = 1; k <= 4; ++k) {
    const auto rep = verify_mass_bound(k, 50, 10000, 100 + k);
    for (const auto& t : rep.per_trial) {
      const double excess = t.length_mean - (2 * pi * k + 3 * t.std_error);
      worst = std::max(worst, excess);
      o.require(excess <= 0.0, "bound at k = " + std::to_string(k));
      o.require(t.max_count <= 2 * k, "per-sample count at k = " + std::to_string(k));
    }
  }
  o.detail << "z: " << z.length_mean << ", z-0.6: " << lat.length_mean << " +- " << lat.std_error
           << ", max(L - 2pi k - 3se) = " << worst;
}

void h0_value(Outcome& o) {
  const double err = std::abs(h0() - 8 / (pi * pi));
  o.require(err < 1e-8, "h0 = 8/pi^2");
  o.detail << "|h0 - 8/pi^2| = " << err;
}

void omega1_phase_transition(Outcome& o) {
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.02}) {
    const auto sol = solve_axisymmetric(eps, 4096);
    const double m = varifold_mass(sol.state);
    const int idx = morse_index(sol.state);
    o.require(m > prev, "monotone at eps = " + std::to_string(eps));
    o.require(m <= 2 * pi * 1.005, "below 2pi (+0.5%) at eps = " + std::to_string(eps));
    o.require(idx == 1, "index 1 at eps = " + std::to_string(eps));
    o.detail << "eps " << eps << ": mass " << m << " index " << idx << "; ";
    prev = m;
  }
  o.require(std::abs(prev - 2 * pi) < 0.02 * 2 * pi, "final mass within 2% of 2pi");
}

void heteroclinic_frame(Outcome& o) {
  const auto kink = ShiftedField::kink();
  const std::complex<double> I(0, 1);
  double det_err = 0.0, par = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = -4 + 8 * rng::uniform(606, 4 * i), y = -4 + 8 * rng::uniform(606, 4 * i + 1);
    const cplx lam = std::polar(0.3 + 2.0 * rng::uniform(606, 4 * i + 2), 0.05 + 3.0 * rng::uniform(606, 4 * i + 3));
    auto fr = [&](double a, double b) { return frame_heteroclinic(a, b, lam); };
    const cplx expect = (lam - I) / (lam + I);
    det_err = std::max(det_err, std::abs(fr(x, y).determinant() - expect) / std::max(1.0, std::abs(expect)));
    par = std::max(par, parallelism_residual(fr, kink, x, y, lam));
  }
  o.require(det_err < 1e-12, "det = (lambda-i)/(lambda+i)");
  o.require(par < 1e-8, "column parallelism");
  o.detail << "det error " << det_err << ", parallelism " << par;
}

void kink_scattering(Outcome& o) {
  const auto kink = ShiftedField::kink();
  const std::complex<double> I(0, 1);
  double err = 0.0;
  for (int k = 0; k < 32; ++k) {
    const cplx lam = std::polar(1.0, (k + 0.5) * pi / 32);
    err = std::max(err, std::abs(jost_solve(kink, lam).a_value - (lam - I) / (lam + I)));
  }
  o.require(err < 1e-6, "a(lambda) at 32 circle points");
  const auto sd = bound_states(kink, 64);
  o.require(sd.bound_states.size() == 1, "exactly one bound state");
  if (!sd.bound_states.empty()) {
    o.require(std::abs(sd.bound_states[0].lambda - I) < 1e-3, "bound state at i");
    o.detail << "bound state " << sd.bound_states[0].lambda << ", ";
  }
  o.require(directions_match(sd.directions, {{0, 1}, {0, -1}}, 1.0), "directions +-(0,1) within 1 deg");
  o.detail << "max |a - (l-i)/(l+i)| = " << err;
}

void antipodal_pairing(Outcome& o) {
  const auto glue = run_glue({60, 120, 240, 300}, 1.0, 25.0, 256);
  o.require(glue.passed(), "glued field assertions");
  const auto field = ShiftedField::from_state(field_from_json(glue.json));
  const auto ends = detect_ends_geometric(field);
  const auto pr = verify_antipodal_pairing(ends, 5.0);
  o.require(ends.size() == 4, "four geometric ends");
  o.require(pr.paired, "antipodal pairing at 5 deg");
  const auto sd = bound_states(field, 256);
  o.require(sd.bound_states.size() == 2, "exactly two bound states");
  o.require(directions_match(sd.directions, ends, 5.0), "+-R(lambda) match the ends within 5 deg");
  o.detail << "interior residual " << glue.json["interior_residual"].get<double>() << ", pairing deviation "
           << pr.max_deviation_deg << " deg, |B| = " << sd.bound_states.size();
}

void lax_compatibility(Outcome& o) {
  const auto kink = ShiftedField::kink(0.0, 10.0);
  const auto bad = ShiftedField::analytic([](double x, double y) { return x * y / 10.0; },
                                          [](double, double y) { return y / 10.0; },
                                          [](double x, double) { return x / 10.0; }, 10.0);
  double worst = 0.0, least = 1e300;
  for (cplx lam : {std::polar(1.0, pi / 3), cplx(0, 1), cplx(0.5, 1.5)}) {
    worst = std::max(worst, compatibility_residual(kink, lam, 1024, 10.0));
    least = std::min(least, compatibility_residual(bad, lam, 1024, 10.0));
  }
  o.require(worst < 1e-6, "kink residual < 1e-6");
  o.require(least > 1e-3, "non-solution residual > 1e-3");
  o.detail << "kink " << worst << ", xy/10 " << least;
}

void ellipsoid_tuning(Outcome& o) {
  const Eigen::Matrix3d J = principal_lengths_jacobian({1, 1, 1}, 1e-5);
  double jerr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) jerr = std::max(jerr, std::abs(J(i, j) - (i == j ? 0.0 : pi)));
  o.require(jerr < 1e-4, "Jacobian = pi (J - I)");
  const auto t = tune_ellipsoid(0.01);
  const auto l = principal_geodesic_lengths(t.a[0], t.a[1], t.a[2]);
  double lerr = 0.0;
  for (int i = 0; i < 3; ++i) lerr = std::max(lerr, std::abs(l.ell[i] - (2 * pi + 0.01 * i)));
  o.require(lerr < 1e-8, "back-substituted lengths");
  o.detail << "Jacobian error " << jerr << ", length error " << lerr;
}

void geodesic_nets(Outcome& o) {
  const Surface sphere = Surface::round_sphere();
  const auto tuned = tune_ellipsoid(0.05);
  const Surface ell = Surface::ellipsoid(tuned.a[0], tuned.a[1], tuned.a[2]);
  auto check_jacobi = [&](const NetEmbedding& net, int kernel, const std::string& what) {
    const auto jac = jacobi_operator(net);
    const double asym = (jac.matrix - jac.matrix.transpose()).cwiseAbs().maxCoeff();
    const int k = kernel_dimension(jac);
    o.require(asym < 1e-8, what + " symmetric");
    o.require(jac.fd_mismatch >= 0.0 && jac.fd_mismatch < 1e-6, what + " matches FD Hessian");
    o.require(k == kernel, what + " kernel " + std::to_string(kernel));
    o.detail << what << ": kernel " << k << ", fd " << jac.fd_mismatch << "; ";
  };

  const auto eq = preset_equator(sphere, 8);
  const auto th = preset_theta(sphere, 4);
  o.require(stationarity_residual(eq).max_norm < 1e-10, "equator stationary");
  o.require(stationarity_residual(th).max_norm < 1e-10, "theta stationary");
  const auto r_eq = relax_to_stationary(perturbed(eq, 1e-2, 11));
  const auto r_th = relax_to_stationary(perturbed(th, 1e-2, 12));
  o.require(r_eq.residual < 1e-10 && std::abs(net_varifold(r_eq.net).total_mass - 2 * pi) < 1e-9,
            "equator recovered");
  o.require(r_th.residual < 1e-10 && std::abs(net_varifold(r_th.net).total_mass - 3 * pi) < 1e-9,
            "theta recovered");
  o.detail << "relaxed residuals " << r_eq.residual << ", " << r_th.residual << "; ";
  check_jacobi(eq, 2, "great circle");
  for (int axis = 0; axis < 3; ++axis)
    check_jacobi(preset_cycle(ell, axis, 8), 0, "gamma" + std::to_string(axis + 1));
}

void stratification(Outcome& o) {
  const auto coarse = preset_theta(Surface::round_sphere(), 2);
  const auto var = net_varifold(coarse);
  const int components = static_cast<int>(coarse.graph.chains().size());
  const int Q = 4;
  const auto s = stratify(coarse, Q);
  const int V = static_cast<int>(var.singular_vertices.size()) + Q * components;
  const int E = (Q + 1) * components;
  o.require(s.graph.vertex_count() == V && V == 14, "#V = 14");
  o.require(s.graph.edge_count() == E && E == 15, "#E = 15");
  o.require(s.graph.is_q_subdivided(Q), "Q-subdivided");
  o.detail << "#V = " << s.graph.vertex_count() << ", #E = " << s.graph.edge_count();
}

void weyl(Outcome& o) {
  const auto t = width_table(1000000, false);
  const double a = weyl_constant(t);
  const double err = std::abs(a - std::sqrt(pi));
  o.require(err <= 4 * std::numeric_limits<double>::epsilon(), "sqrt(pi) to machine precision");
  o.detail << "a(1) = " << a << ", |a - sqrt(pi)| = " << err;
}

}  // namespace

int main() {
  setvbuf(stdout, nullptr, _IOLBF, 0);
  const std::vector<Criterion> criteria = {
      {1, "width table", 1, width_table_exact},
      {2, "counting identity", 1, counting_identity},
      {3, "Crofton calibration and bound", 120, crofton_bound},
      {4, "h0", 1, h0_value},
      {5, "omega_1 via phase transition", 60, omega1_phase_transition},
      {6, "heteroclinic frame", 5, heteroclinic_frame},
      {7, "kink scattering", 60, kink_scattering},
      {8, "antipodal pairing", 600, antipodal_pairing},
      {9, "Lax compatibility", 30, lax_compatibility},
      {10, "ellipsoid tuning", 30, ellipsoid_tuning},
      {11, "geodesic nets", 120, geodesic_nets},
      {12, "stratification counts", 1, stratification},
      {13, "Weyl constant", 1, weyl},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    o.detail.precision(6);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[error: " << e.what() << "]";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt >= c.limit_s) {
      o.pass = false;
      o.detail << " [runtime over " << c.limit_s << " s]";
    }
    failed += !o.pass;
    std::printf("%s %2d %-32s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, dt, o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 2;
}
