#include "pwidths/scattering.hpp"

#include "pwidths/error.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <thread>

namespace pwidths {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI(0.0, 1.0);
}  // namespace

namespace pauli {
Mat2C identity() { return Mat2C::Identity(); }
Mat2C s1() {
  Mat2C m;
  m << 0, 1, 1, 0;
  return m;
}
Mat2C s2() {
  Mat2C m;
  m << 0, -kI, kI, 0;
  return m;
}
Mat2C s3() {
  Mat2C m;
  m << 1, 0, 0, -1;
  return m;
}
bool check_algebra() {
  const double tol = 1e-15;
  const Mat2C I = identity();
  return (s1() * s1() - I).norm() < tol && (s2() * s2() - I).norm() < tol &&
         (s3() * s3() - I).norm() < tol && (s1() * s2() - kI * s3()).norm() < tol;
}
}  // namespace pauli

// ---------------------------------------------------------------------------

ShiftedField ShiftedField::analytic(Fn u, Fn ux, Fn uy, double half_width) {
  if (!(half_width > 0)) fail(ErrorKind::InvalidArgument, "field box must have positive size");
  ShiftedField f;
  f.L_ = half_width;
  f.fu_ = std::move(u);
  f.fux_ = std::move(ux);
  f.fuy_ = std::move(uy);
  return f;
}

namespace {

Eigen::VectorXd grid_derivative(const Eigen::VectorXd& u, int n, double h, bool along_x) {
  Eigen::VectorXd d(u.size());
  auto at = [&](int i, int j) { return u[static_cast<Eigen::Index>(j) * n + i]; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int k = along_x ? i : j;
      auto f = [&](int off) { return along_x ? at(i + off, j) : at(i, j + off); };
      double v;
      if (k >= 2 && k <= n - 3)
        v = (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * h);
      else if (k == 1 || k == n - 2)
        v = (f(1) - f(-1)) / (2.0 * h);
      else if (k == 0)
        v = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
      else
        v = (3.0 * f(0) - 4.0 * f(-1) + f(-2)) / (2.0 * h);
      d[static_cast<Eigen::Index>(j) * n + i] = v;
    }
  return d;
}

void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

}  // namespace

ShiftedField ShiftedField::grid(double half_width, int n, Eigen::VectorXd values) {
  if (n < 8 || values.size() != static_cast<Eigen::Index>(n) * n)
    fail(ErrorKind::InvalidArgument, "grid field needs n >= 8 and n² values");
  ShiftedField f;
  f.L_ = half_width;
  f.n_ = n;
  f.h_ = 2.0 * half_width / (n - 1);
  f.u_ = std::move(values);
  f.ux_ = grid_derivative(f.u_, n, f.h_, true);
  f.uy_ = grid_derivative(f.u_, n, f.h_, false);
  return f;
}

ShiftedField ShiftedField::from_state(const FieldState2D& state) {
  Eigen::VectorXd v = state.values;
  if (state.kind == PotentialKind::Normalized) v = (kPi * (v.array() + 1.0)).matrix();
  auto f = grid(state.L, state.n, std::move(v));
  f.declared_ends = state.directions;
  return f;
}

ShiftedField ShiftedField::constant(double value, double half_width) {
  return analytic([value](double, double) { return value; }, [](double, double) { return 0.0; },
                  [](double, double) { return 0.0; }, half_width);
}

ShiftedField ShiftedField::kink(double beta, double half_width) {
  const double c = std::cos(beta), s = std::sin(beta);
  auto f = analytic([c, s](double x, double y) { return 4.0 * std::atan(std::exp(c * x + s * y)); },
                    [c, s](double x, double y) { return 2.0 * c / std::cosh(c * x + s * y); },
                    [c, s](double x, double y) { return 2.0 * s / std::cosh(c * x + s * y); },
                    half_width);
  f.declared_ends = {{-s, c}, {s, -c}};
  return f;
}

ShiftedField ShiftedField::saddle(double a, double half_width) {
  if (!(a > 0.0 && a < 1.0)) fail(ErrorKind::InvalidArgument, "saddle parameter must lie in (0, 1)");
  const double b = std::sqrt(1.0 - a * a);
  auto g = [a, b](double x, double y) { return (b / a) * std::cosh(a * y) / std::cosh(b * x); };
  auto f = analytic([g](double x, double y) { return 4.0 * std::atan(g(x, y)); },
                    [g, b](double x, double y) {
                      const double v = g(x, y);
                      return -4.0 * b * std::tanh(b * x) * v / (1.0 + v * v);
                    },
                    [g, a](double x, double y) {
                      const double v = g(x, y);
                      return 4.0 * a * std::tanh(a * y) * v / (1.0 + v * v);
                    },
                    half_width);
  f.declared_ends = {{a, b}, {-a, b}, {-a, -b}, {a, -b}};
  return f;
}

bool ShiftedField::contains(double x, double y) const {
  const double lim = L_ * (1.0 + 1e-12);
  return std::abs(x) <= lim && std::abs(y) <= lim;
}

ShiftedField::Sample ShiftedField::eval(double x, double y) const {
  if (!contains(x, y)) fail(ErrorKind::OutOfDomain, "point outside the field box");
  if (!is_grid()) return {fu_(x, y), fux_(x, y), fuy_(x, y)};
  const double fx = std::clamp((x + L_) / h_, 0.0, n_ - 1.0);
  const double fy = std::clamp((y + L_) / h_, 0.0, n_ - 1.0);
  const int i = std::min(static_cast<int>(fx), n_ - 2);
  const int j = std::min(static_cast<int>(fy), n_ - 2);
  double wx[4], wy[4];
  catmull_rom(fx - i, wx);
  catmull_rom(fy - j, wy);
  Sample s{0.0, 0.0, 0.0};
  for (int b = 0; b < 4; ++b) {
    const int jj = std::clamp(j - 1 + b, 0, n_ - 1);
    for (int a = 0; a < 4; ++a) {
      const int ii = std::clamp(i - 1 + a, 0, n_ - 1);
      const double w = wx[a] * wy[b];
      const Eigen::Index k = static_cast<Eigen::Index>(jj) * n_ + ii;
      s.u += w * u_[k];
      s.ux += w * ux_[k];
      s.uy += w * uy_[k];
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

LaxPair lax_connection(const ShiftedField::Sample& s, cplx lambda) {
  if (lambda == 0.0) fail(ErrorKind::InvalidArgument, "lambda must be nonzero");
  const double c = std::cos(s.u), sn = std::sin(s.u);
  const cplx w(s.ux, -s.uy);
  const Mat2C S1 = pauli::s1(), S2 = pauli::s2(), S3 = pauli::s3();
  LaxPair lp;
  lp.A = (kI / 4.0) * ((lambda - c / lambda) * S3 - w * S2 - (sn / lambda) * S1);
  lp.B = 0.25 * (-(lambda + c / lambda) * S3 + w * S2 - (sn / lambda) * S1);
  return lp;
}

LaxPair lax_connection(const ShiftedField& field, double x, double y, cplx lambda) {
  return lax_connection(field.eval(x, y), lambda);
}

double compatibility_residual(const ShiftedField& field, cplx lambda, int n, double R) {
  if (n == 0) n = field.is_grid() ? field.grid_size() : 256;
  if (R == 0.0) R = field.half_width();
  if (n < 16) fail(ErrorKind::InvalidArgument, "compatibility grid too small");
  const double h = 2.0 * R / (n - 1);
  auto node = [&](int i) { return -R + i * h; };
  // On a grid field's own nodes the bicubic weights collapse to the node value.
  auto sample = [&](int i, int j) { return field.eval(node(i), node(j)); };

  // Rolling window of five rows of A; B is needed only on the current row.
  const int margin = 4;
  std::vector<std::vector<Mat2C>> rowsA(5, std::vector<Mat2C>(n));
  auto fill_row = [&](int slot, int j) {
    for (int i = 0; i < n; ++i) rowsA[slot][i] = lax_connection(sample(i, j), lambda).A;
  };
  for (int r = 0; r < 4; ++r) fill_row(r + 1, margin - 2 + r);

  double worst = 0.0;
  std::vector<Mat2C> rowB(n);
  for (int j = margin; j < n - margin; ++j) {
    std::rotate(rowsA.begin(), rowsA.begin() + 1, rowsA.end());
    fill_row(4, j + 2);
    for (int i = margin - 2; i <= n - margin + 1; ++i) rowB[i] = lax_connection(sample(i, j), lambda).B;
    for (int i = margin; i < n - margin; ++i) {
      const Mat2C dyA = (-rowsA[4][i] + 8.0 * rowsA[3][i] - 8.0 * rowsA[1][i] + rowsA[0][i]) / (12.0 * h);
      const Mat2C dxB = (-rowB[i + 2] + 8.0 * rowB[i + 1] - 8.0 * rowB[i - 1] + rowB[i - 2]) / (12.0 * h);
      const Mat2C& A = rowsA[2][i];
      const Mat2C& B = rowB[i];
      const Mat2C res = dyA - dxB - (B * A - A * B);
      worst = std::max(worst, res.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

Mat2C frame_trivial(double x, double y, cplx lambda) {
  if (lambda == 0.0) fail(ErrorKind::InvalidArgument, "lambda must be nonzero");
  const cplx e = std::exp(kI * K_of(lambda) * x / 4.0 - J_of(lambda) * y / 4.0);
  Mat2C m = Mat2C::Zero();
  m(0, 0) = e;
  m(1, 1) = 1.0 / e;
  return m;
}

Mat2C frame_heteroclinic(double x, double y, cplx lambda) {
  if (std::abs(lambda + kI) < 1e-14) fail(ErrorKind::LambdaAtPole, "lambda = -i is a pole of the frame");
  const Mat2C phi0 = frame_trivial(x, y, lambda);
  const Mat2C M = std::tanh(x) * pauli::s3() - (1.0 / std::cosh(x)) * pauli::s1() - pauli::identity();
  return phi0 + (kI / (lambda + kI)) * M * phi0;
}

double parallelism_residual(const std::function<Mat2C(double, double)>& frame,
                            const ShiftedField& field, double x, double y, cplx lambda, double h) {
  auto dx = [&](double s) { return Mat2C((frame(x + s, y) - frame(x - s, y)) / (2.0 * s)); };
  auto dy = [&](double s) { return Mat2C((frame(x, y + s) - frame(x, y - s)) / (2.0 * s)); };
  // One Richardson step lifts the centered difference to fourth order.
  const Mat2C Dx = (4.0 * dx(h / 2) - dx(h)) / 3.0;
  const Mat2C Dy = (4.0 * dy(h / 2) - dy(h)) / 3.0;
  const auto lp = lax_connection(field, x, y, lambda);
  const Mat2C phi = frame(x, y);
  const double scale = std::max(1.0, phi.cwiseAbs().maxCoeff());
  return ((Dx - lp.A * phi).cwiseAbs().maxCoeff() + (Dy - lp.B * phi).cwiseAbs().maxCoeff()) / scale;
}

// ---------------------------------------------------------------------------

namespace {

using JostState = std::array<double, 5>;

struct JostRhs {
  const ShiftedField& field;
  cplx lambda;
  double y0;
  double gauge;  // +1 for Ψ₋, -1 for Ψ₊
  double q_sign;
  Mat2C A0;

  void operator()(const JostState& s, JostState& ds, double x) const {
    const auto lp = lax_connection(field.eval(x, y0), lambda);
    const Mat2C M = lp.A + gauge * (kI * K_of(lambda) / 4.0) * Mat2C::Identity();
    const Vec2C psi(cplx(s[0], s[1]), cplx(s[2], s[3]));
    const Vec2C d = M * psi;
    ds = {d[0].real(), d[0].imag(), d[1].real(), d[1].imag(),
          q_sign * (lp.A - A0).cwiseAbs().sum()};
  }
};

}  // namespace

JostPair jost_solve(const ShiftedField& field, cplx lambda, const JostOptions& opt) {
  if (lambda == 0.0) fail(ErrorKind::InvalidArgument, "lambda must be nonzero");
  if (lambda.imag() < 0.0) fail(ErrorKind::InvalidArgument, "Jost solutions need Im lambda >= 0");
  if (std::abs(lambda.imag()) < 1e-6)
    fail(ErrorKind::InvalidArgument, "lambda too close to the real axis");
  const double X = opt.X > 0.0 ? opt.X : field.half_width();
  if (!field.contains(X, opt.y0)) fail(ErrorKind::OutOfDomain, "integration line leaves the field box");
  if (opt.check_decay) check_boundary_decay(field);

  int nrec = std::max(opt.n_record, 9);
  nrec = 8 * ((nrec - 1 + 7) / 8) + 1;
  std::vector<double> xs(nrec);
  for (int k = 0; k < nrec; ++k) xs[k] = -X + 2.0 * X * k / (nrec - 1);

  namespace odeint = boost::numeric::odeint;
  const Mat2C A0 = (kI / 4.0) * K_of(lambda) * pauli::s3();
  JostPair out;
  out.lambda = lambda;
  out.x = xs;
  out.phi_m2.resize(nrec);
  out.phi_p1.resize(nrec);
  std::vector<double> Qm(nrec), Qp(nrec);

  auto run = [&](double gauge, JostState init, bool forward, std::vector<Vec2C>& dst,
                 std::vector<double>& Q) {
    JostRhs rhs{field, lambda, opt.y0, gauge, forward ? 1.0 : -1.0, A0};
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<JostState>>(opt.tol, opt.tol);
    std::vector<double> times = xs;
    if (!forward) std::reverse(times.begin(), times.end());
    int idx = 0;
    odeint::integrate_times(stepper, rhs, init, times.begin(), times.end(),
                            forward ? 0.01 : -0.01, [&](const JostState& s, double) {
                              const int k = forward ? idx : nrec - 1 - idx;
                              dst[k] = Vec2C(cplx(s[0], s[1]), cplx(s[2], s[3]));
                              Q[k] = s[4];
                              if (!std::isfinite(dst[k].norm()) || dst[k].norm() > 1e12)
                                fail(ErrorKind::IntegratorBlowup, "Jost solution exceeded 1e12");
                              ++idx;
                            });
  };
  run(+1.0, {0.0, 0.0, 1.0, 0.0, 0.0}, true, out.phi_m2, Qm);
  run(-1.0, {1.0, 0.0, 0.0, 0.0, 0.0}, false, out.phi_p1, Qp);

  out.majorant_excess = -1e300;
  for (int k = 0; k < nrec; ++k) {
    const Vec2C& m = out.phi_m2[k];
    const Vec2C& p = out.phi_p1[k];
    const double bm = std::exp(Qm[k]) - 1.0, bp = std::exp(Qp[k]) - 1.0;
    const double em = std::max(std::abs(m[0]) - bm, std::abs(m[1] - 1.0) - bm);
    const double ep = std::max(std::abs(p[1]) - bp, std::abs(p[0] - 1.0) - bp);
    out.majorant_excess = std::max({out.majorant_excess, em, ep});
  }

  auto det_at = [&](int k) {
    const Vec2C& p = out.phi_p1[k];
    const Vec2C& m = out.phi_m2[k];
    return p[0] * m[1] - p[1] * m[0];
  };
  const int mid = (nrec - 1) / 2, q = (nrec - 1) / 8;
  out.a_value = det_at(mid);
  out.a_spread = 0.0;
  for (int k : {mid - 2 * q, mid - q, mid + q, mid + 2 * q})
    out.a_spread = std::max(out.a_spread, std::abs(det_at(k) - out.a_value));
  if (out.a_spread > 1e-8)
    fail(ErrorKind::AssertionFailed,
         "Wronskian varies along the line by " + std::to_string(out.a_spread));
  return out;
}

void check_boundary_decay(const ShiftedField& field, double tol, double window) {
  std::vector<Eigen::Vector2d> ends = field.declared_ends;
  if (ends.empty()) {
    try {
      ends = detect_ends_geometric(field);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossings) throw;
    }
  }
  const double L = field.half_width();
  window = std::min(window, 0.72 * L);
  const int m = field.is_grid() ? field.grid_size() : 400;
  double worst = 0.0;
  int checked = 0;
  Eigen::Vector2d where(0, 0);
  for (int side = 0; side < 4; ++side)
    for (int k = 0; k < m; ++k) {
      const double t = -L + 2.0 * L * k / (m - 1);
      Eigen::Vector2d p;
      switch (side) {
        case 0: p = {t, -L}; break;
        case 1: p = {L, t}; break;
        case 2: p = {t, L}; break;
        default: p = {-L, t}; break;
      }
      if (!ends.empty() && distance_to_rays(ends, p[0], p[1]) < window) continue;
      ++checked;
      const auto s = field.eval(p[0], p[1]);
      const double v = std::max(std::abs(std::sin(s.u)), std::hypot(s.ux, s.uy));
      if (v > worst) {
        worst = v;
        where = p;
      }
    }
  if (checked == 0)
    fail(ErrorKind::PreconditionDecayFailed, "end windows cover the whole boundary");
  if (worst >= tol)
    fail(ErrorKind::PreconditionDecayFailed,
         "field does not decay at boundary point (" + std::to_string(where[0]) + ", " +
             std::to_string(where[1]) + "): " + std::to_string(worst));
}

Eigen::Vector2d reflect_to_direction(cplx lambda) { return {-lambda.real(), lambda.imag()}; }

ScatteringData bound_states(const ShiftedField& field, int n_theta, int threads, double threshold,
                            const JostOptions& opt_in) {
  if (n_theta < 8) fail(ErrorKind::InvalidArgument, "need at least 8 circle samples");
  JostOptions opt = opt_in;
  if (opt.check_decay) check_boundary_decay(field);
  opt.check_decay = false;
  opt.n_record = 9;

  const double delta = kPi / (4.0 * n_theta);
  std::vector<double> th(n_theta);
  for (int k = 0; k < n_theta; ++k) th[k] = delta + (kPi - 2.0 * delta) * k / (n_theta - 1);
  std::vector<cplx> a(n_theta);
  auto eval_a = [&](double t) { return jost_solve(field, std::polar(1.0, t), opt).a_value; };

  threads = std::max(1, std::min(threads, n_theta));
  std::vector<std::exception_ptr> errs(threads);
  auto work = [&](int t) {
    try {
      for (int k = t; k < n_theta; k += threads) a[k] = eval_a(th[k]);
    } catch (...) {
      errs[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& p : pool) p.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  ScatteringData out;
  for (int k = 0; k < n_theta; ++k) out.circle_samples.emplace_back(th[k], a[k]);
  for (int k = 0; k < n_theta; ++k) {
    const double v = std::abs(a[k]);
    const bool left = k == 0 || v <= std::abs(a[k - 1]);
    const bool right = k == n_theta - 1 || v <= std::abs(a[k + 1]);
    if (!left || !right) continue;
    const double lo = th[std::max(0, k - 1)], hi = th[std::min(n_theta - 1, k + 1)];
    auto obj = [&](double t) { return std::abs(eval_a(t)); };
    std::uintmax_t iters = 200;
    const auto [tmin, fmin] = boost::math::tools::brent_find_minima(obj, lo, hi, 30, iters);
    if (fmin >= threshold) continue;
    bool dup = false;
    for (const auto& b : out.bound_states) dup = dup || std::abs(b.theta - tmin) < 1e-6;
    if (dup) continue;
    out.bound_states.push_back({tmin, std::polar(1.0, tmin), fmin});
  }
  for (const auto& b : out.bound_states) {
    const Eigen::Vector2d d = reflect_to_direction(b.lambda);
    out.directions.push_back(d);
    out.directions.push_back(-d);
  }
  return out;
}

std::vector<Eigen::Vector2d> detect_ends_geometric(const ShiftedField& field) {
  const double s = 0.8 * field.half_width();
  const int m = std::max(400, 4 * field.grid_size());
  std::vector<Eigen::Vector2d> loop;
  loop.reserve(4 * m);
  for (int k = 0; k < m; ++k) loop.emplace_back(-s + 2.0 * s * k / m, -s);
  for (int k = 0; k < m; ++k) loop.emplace_back(s, -s + 2.0 * s * k / m);
  for (int k = 0; k < m; ++k) loop.emplace_back(s - 2.0 * s * k / m, s);
  for (int k = 0; k < m; ++k) loop.emplace_back(-s, s - 2.0 * s * k / m);
  std::vector<double> f(loop.size());
  for (std::size_t k = 0; k < loop.size(); ++k) f[k] = field.eval(loop[k][0], loop[k][1]).u - kPi;

  std::vector<double> angles;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const std::size_t k1 = (k + 1) % loop.size();
    if ((f[k] >= 0.0) == (f[k1] >= 0.0)) continue;
    const double t = f[k] / (f[k] - f[k1]);
    const Eigen::Vector2d p = loop[k] + t * (loop[k1] - loop[k]);
    angles.push_back(std::atan2(p[1], p[0]));
  }
  if (angles.empty()) fail(ErrorKind::NoCrossings, "level set {u = pi} misses the detection square");
  std::sort(angles.begin(), angles.end());
  const double merge = 2.0 * kPi / 180.0;
  std::vector<std::vector<double>> groups;
  for (double a : angles) {
    if (!groups.empty() && a - groups.back().back() < merge) groups.back().push_back(a);
    else groups.push_back({a});
  }
  if (groups.size() > 1 && groups.front().front() + 2.0 * kPi - groups.back().back() < merge) {
    for (double a : groups.front()) groups.back().push_back(a + 2.0 * kPi);
    groups.erase(groups.begin());
  }
  std::vector<Eigen::Vector2d> out;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double a : g) mean += a;
    mean /= static_cast<double>(g.size());
    out.emplace_back(std::cos(mean), std::sin(mean));
  }
  return out;
}

double angle_deg(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

PairingReport verify_antipodal_pairing(const std::vector<Eigen::Vector2d>& dirs, double tol_deg) {
  if (dirs.empty()) fail(ErrorKind::InvalidArgument, "no directions to pair");
  if (dirs.size() % 2 != 0) fail(ErrorKind::OddCount, "an odd number of ends cannot pair antipodally");
  PairingReport rep;
  std::vector<bool> used(dirs.size(), false);
  rep.paired = true;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    int best = -1;
    double best_dev = 1e300;
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      if (used[j]) continue;
      const double dev = angle_deg(dirs[j], -dirs[i]);
      if (dev < best_dev) {
        best_dev = dev;
        best = static_cast<int>(j);
      }
    }
    if (best < 0 || best_dev > tol_deg) {
      rep.paired = false;
      if (best >= 0) rep.max_deviation_deg = std::max(rep.max_deviation_deg, best_dev);
      continue;
    }
    used[best] = true;
    rep.pairs.emplace_back(static_cast<int>(i), best);
    rep.max_deviation_deg = std::max(rep.max_deviation_deg, best_dev);
  }
  return rep;
}

bool directions_match(const std::vector<Eigen::Vector2d>& a, const std::vector<Eigen::Vector2d>& b,
                      double tol_deg) {
  if (a.size() != b.size()) return false;
  auto covered = [tol_deg](const std::vector<Eigen::Vector2d>& p, const std::vector<Eigen::Vector2d>& q) {
    for (const auto& u : p) {
      bool hit = false;
      for (const auto& v : q) hit = hit || angle_deg(u, v) <= tol_deg;
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace pwidths
