#include "pwidths/phase_field.hpp"

#include "pwidths/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pwidths {

namespace {
constexpr double kPi = std::numbers::pi;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
}  // namespace

double potential(double t, PotentialKind kind) {
  if (kind == PotentialKind::Shifted) return 1.0 - std::cos(t);
  return (1.0 + std::cos(kPi * t)) / (kPi * kPi);
}

double potential_d1(double t, PotentialKind kind) {
  if (kind == PotentialKind::Shifted) return std::sin(t);
  return -std::sin(kPi * t) / kPi;
}

double potential_d2(double t, PotentialKind kind) {
  if (kind == PotentialKind::Shifted) return std::cos(t);
  return -std::cos(kPi * t);
}

double heteroclinic(double t, PotentialKind kind) {
  const double a = std::atan(std::exp(t));
  return kind == PotentialKind::Shifted ? 4.0 * a : 4.0 / kPi * a - 1.0;
}

double heteroclinic_d1(double t, PotentialKind kind) {
  const double sech = 1.0 / std::cosh(t);
  return kind == PotentialKind::Shifted ? 2.0 * sech : 2.0 / kPi * sech;
}

namespace {
template <class F>
double line_integral(F f) {
  using boost::math::quadrature::gauss_kronrod;
  // The integrands decay like e^{-2|t|}; beyond |t| = 40 they are below 1e-34.
  return gauss_kronrod<double, 61>::integrate(f, -40.0, 0.0, 30, 1e-15) +
         gauss_kronrod<double, 61>::integrate(f, 0.0, 40.0, 30, 1e-15);
}
}  // namespace

double h0(PotentialKind kind) {
  return line_integral([kind](double t) {
    const double d = heteroclinic_d1(t, kind);
    return d * d;
  });
}

double h0_equipartition(PotentialKind kind) {
  return line_integral([kind](double t) {
    const double d = heteroclinic_d1(t, kind);
    return 0.5 * d * d + potential(heteroclinic(t, kind), kind);
  });
}

// ---------------------------------------------------------------------------

FieldState1D FieldState1D::sphere(int N, double eps, const std::function<double(double)>& u0) {
  if (N < 64) fail(ErrorKind::InvalidArgument, "axisymmetric grid needs N >= 64");
  if (!(eps > 0.0) || !(eps < 1.0)) fail(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  FieldState1D s;
  s.geometry = Geometry1D::Sphere;
  s.eps = eps;
  s.h = kPi / N;
  s.grid.resize(N);
  s.values.resize(N);
  for (int i = 0; i < N; ++i) {
    s.grid[i] = (i + 0.5) * s.h;
    s.values[i] = u0(s.grid[i]);
  }
  return s;
}

FieldState1D FieldState1D::line(int N, double half_length, double eps,
                                const std::function<double(double)>& u0) {
  if (N < 3) fail(ErrorKind::InvalidArgument, "line grid needs N >= 3");
  if (!(eps > 0.0) || !(half_length > 0.0)) fail(ErrorKind::InvalidArgument, "bad line state");
  FieldState1D s;
  s.geometry = Geometry1D::Line;
  s.eps = eps;
  s.h = 2.0 * half_length / (N - 1);
  s.grid.resize(N);
  s.values.resize(N);
  for (int i = 0; i < N; ++i) {
    s.grid[i] = -half_length + i * s.h;
    s.values[i] = u0(s.grid[i]);
  }
  return s;
}

namespace {

// Face weights: sin θ at cell faces for the sphere (zero at the poles), 1 on a line.
double face_weight(const FieldState1D& s, int i) {
  if (s.geometry == Geometry1D::Line) return 1.0;
  return std::sin((i + 1) * s.h);
}

double cell_weight(const FieldState1D& s, int i) {
  if (s.geometry == Geometry1D::Line) return (i == 0 || i == s.size() - 1) ? 0.5 : 1.0;
  return std::sin(s.grid[i]);
}

double laplacian_at(const FieldState1D& s, int i) {
  const auto& u = s.values;
  const double h2 = s.h * s.h;
  if (s.geometry == Geometry1D::Line) return (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
  const int N = s.size();
  double flux = 0.0;
  if (i + 1 < N) flux += face_weight(s, i) * (u[i + 1] - u[i]);
  if (i > 0) flux -= face_weight(s, i - 1) * (u[i] - u[i - 1]);
  return flux / (h2 * std::sin(s.grid[i]));
}

double measure_factor(const FieldState1D& s) {
  return s.geometry == Geometry1D::Sphere ? 2.0 * kPi * s.h : s.h;
}

// Symmetric tridiagonal (diag, off) of ε²K + diag(w_i W''(u_i)) where K is
// the weighted stiffness matrix; for a Line only interior unknowns appear.
void second_variation(const FieldState1D& s, Eigen::VectorXd& diag, Eigen::VectorXd& off) {
  const int N = s.size();
  const double e2 = s.eps * s.eps;
  const double h2 = s.h * s.h;
  if (s.geometry == Geometry1D::Line) {
    const int m = N - 2;
    diag.resize(m);
    off.resize(std::max(0, m - 1));
    for (int r = 0; r < m; ++r) {
      diag[r] = 2.0 * e2 / h2 + potential_d2(s.values[r + 1], s.kind);
      if (r + 1 < m) off[r] = -e2 / h2;
    }
    return;
  }
  diag.resize(N);
  off.resize(N - 1);
  for (int i = 0; i < N; ++i) {
    double k = 0.0;
    if (i + 1 < N) k += face_weight(s, i);
    if (i > 0) k += face_weight(s, i - 1);
    diag[i] = e2 * k / h2 + std::sin(s.grid[i]) * potential_d2(s.values[i], s.kind);
    if (i + 1 < N) off[i] = -e2 * face_weight(s, i) / h2;
  }
}

int count_below(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double sigma) {
  // Sturm count via the LDLᵀ pivots of T - σI.
  int count = 0;
  double d = 1.0;
  const double tiny = 1e-300;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    d = diag[i] - sigma - (i > 0 ? off[i - 1] * off[i - 1] / d : 0.0);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

}  // namespace

EnergyParts energy_parts(const FieldState1D& s) {
  const int N = s.size();
  EnergyParts e;
  for (int i = 0; i + 1 < N; ++i) {
    const double du = (s.values[i + 1] - s.values[i]) / s.h;
    e.gradient += 0.5 * s.eps * du * du * face_weight(s, i);
  }
  for (int i = 0; i < N; ++i) e.potential += potential(s.values[i], s.kind) / s.eps * cell_weight(s, i);
  const double m = measure_factor(s);
  e.gradient *= m;
  e.potential *= m;
  return e;
}

double energy(const FieldState1D& state) { return energy_parts(state).total(); }

Eigen::VectorXd residual_vector(const FieldState1D& s) {
  const int N = s.size();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(N);
  const double e2 = s.eps * s.eps;
  const int lo = s.geometry == Geometry1D::Line ? 1 : 0;
  const int hi = s.geometry == Geometry1D::Line ? N - 1 : N;
  for (int i = lo; i < hi; ++i) r[i] = e2 * laplacian_at(s, i) - potential_d1(s.values[i], s.kind);
  return r;
}

double pde_residual(const FieldState1D& state) {
  return residual_vector(state).lpNorm<Eigen::Infinity>();
}

double varifold_mass(const FieldState1D& state) { return energy(state) / h0(state.kind); }

int morse_index(const FieldState1D& state) {
  if (pde_residual(state) >= 1e-8)
    fail(ErrorKind::NotASolution, "morse_index needs an approximate solution");
  Eigen::VectorXd diag, off;
  second_variation(state, diag, off);
  const double scale = diag.cwiseAbs().maxCoeff();
  return count_below(diag, off, -1e-9 * scale);
}

namespace {

// Newton step for the 1D system in its symmetric (weighted) form.
Eigen::VectorXd newton_step_1d(const FieldState1D& s) {
  Eigen::VectorXd diag, off;
  second_variation(s, diag, off);
  const Eigen::VectorXd r = residual_vector(s);
  const int N = s.size();
  const int lo = s.geometry == Geometry1D::Line ? 1 : 0;
  const int m = static_cast<int>(diag.size());
  // G(u) = -w·F(u) has Jacobian equal to the second-variation matrix.
  Eigen::VectorXd rhs(m);
  for (int r_ = 0; r_ < m; ++r_) {
    const int i = r_ + lo;
    const double w = s.geometry == Geometry1D::Sphere ? std::sin(s.grid[i]) : 1.0;
    rhs[r_] = w * r[i];
  }
  std::vector<Triplet> trips;
  trips.reserve(3 * m);
  for (int i = 0; i < m; ++i) {
    trips.emplace_back(i, i, diag[i]);
    if (i + 1 < m) {
      trips.emplace_back(i, i + 1, off[i]);
      trips.emplace_back(i + 1, i, off[i]);
    }
  }
  SpMat H(m, m);
  H.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SpMat> lu;
  lu.compute(H);
  if (lu.info() != Eigen::Success) fail(ErrorKind::NewtonNoConverge, "singular 1D Jacobian");
  const Eigen::VectorXd d = lu.solve(rhs);
  Eigen::VectorXd step = Eigen::VectorXd::Zero(N);
  step.segment(lo, m) = d;
  return step;
}

int newton_1d(FieldState1D& s, double tol, int max_iter, bool odd) {
  // ε²Δ_h amplifies rounding of u by ~4ε²/h²; tighter targets cannot be met.
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() * s.eps * s.eps / (s.h * s.h) *
                       std::max(1.0, s.values.cwiseAbs().maxCoeff());
  tol = std::max(tol, floor);
  double rn = pde_residual(s);
  int it = 0;
  while (rn >= tol) {
    if (it == max_iter)
      fail(ErrorKind::NewtonNoConverge, "1D Newton residual " + std::to_string(rn));
    ++it;
    const Eigen::VectorXd step = newton_step_1d(s);
    const Eigen::VectorXd base = s.values;
    double t = 1.0;
    bool improved = false;
    while (t > 1e-8) {
      s.values = base + t * step;
      if (odd) s.values = 0.5 * (s.values - s.values.reverse()).eval();
      const double rr = pde_residual(s);
      if (rr < rn) {
        rn = rr;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {
      s.values = base;
      fail(ErrorKind::NewtonNoConverge, "1D Newton stalled at residual " + std::to_string(rn));
    }
  }
  return it;
}

}  // namespace

AxisymmetricSolution solve_axisymmetric(double eps, int N) {
  if (!(eps >= 0.005 && eps <= 0.2)) fail(ErrorKind::InvalidArgument, "eps must lie in [0.005, 0.2]");
  if (N < 1024) fail(ErrorKind::InvalidArgument, "axisymmetric solve needs N >= 1024");
  AxisymmetricSolution sol;
  sol.state = FieldState1D::sphere(N, eps, [eps](double th) { return heteroclinic((th - kPi / 2) / eps); });
  sol.state.values = 0.5 * (sol.state.values - sol.state.values.reverse()).eval();
  sol.iterations = newton_1d(sol.state, 1e-11, 60, true);
  sol.residual = pde_residual(sol.state);
  sol.index = morse_index(sol.state);
  return sol;
}

int relax_line(FieldState1D& state, double tol, int max_iter) {
  if (state.geometry != Geometry1D::Line) fail(ErrorKind::InvalidArgument, "relax_line needs a Line state");
  return newton_1d(state, tol, max_iter, false);
}

// ---------------------------------------------------------------------------

double FieldState2D::sample(double px, double py) const {
  const double fx = std::clamp((px + L) / h, 0.0, n - 1.0);
  const double fy = std::clamp((py + L) / h, 0.0, n - 1.0);
  const int i = std::min(static_cast<int>(fx), n - 2);
  const int j = std::min(static_cast<int>(fy), n - 2);
  const double tx = fx - i, ty = fy - j;
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) +
         (1 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1);
}

double distance_to_rays(const std::vector<Eigen::Vector2d>& directions, double x, double y) {
  const Eigen::Vector2d p(x, y);
  double best = p.norm();
  for (const auto& d : directions) {
    const double t = std::max(0.0, p.dot(d));
    best = std::min(best, (p - t * d).norm());
  }
  return best;
}

double glued_ansatz_value(const std::vector<Eigen::Vector2d>& directions, double eps, double x,
                          double y, PotentialKind kind) {
  auto angle = [](double ax, double ay) {
    double a = std::atan2(ay, ax);
    if (a < 0) a += 2.0 * kPi;
    return a;
  };
  const double psi = angle(x, y);
  int count = 0;
  for (const auto& d : directions) {
    const double phi = angle(d[0], d[1]);
    if (phi > 0.0 && phi <= psi) ++count;
  }
  const double sign = (count % 2 == 0) ? 1.0 : -1.0;
  return heteroclinic(sign * distance_to_rays(directions, x, y) / eps, kind);
}

FieldState2D glued_ansatz(const std::vector<Eigen::Vector2d>& directions, double L, double eps,
                          int n) {
  FieldState2D s;
  s.L = L;
  s.n = n;
  s.eps = eps;
  s.h = 2.0 * L / (n - 1);
  s.directions = directions;
  s.values.resize(static_cast<Eigen::Index>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      s.values[static_cast<Eigen::Index>(j) * n + i] =
          std::clamp(glued_ansatz_value(directions, eps, s.x(i), s.x(j)), -1.0, 1.0);
  return s;
}

double energy(const FieldState2D& s) {
  const int n = s.n;
  const double h = s.h;
  auto w = [n](int i) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };
  double grad = 0.0, pot = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n) {
        const double d = (s.at(i + 1, j) - s.at(i, j)) / h;
        grad += w(j) * d * d;
      }
      if (j + 1 < n) {
        const double d = (s.at(i, j + 1) - s.at(i, j)) / h;
        grad += w(i) * d * d;
      }
      pot += w(i) * w(j) * potential(s.at(i, j), s.kind);
    }
  return h * h * (0.5 * s.eps * grad + pot / s.eps);
}

double varifold_mass(const FieldState2D& state) { return energy(state) / h0(state.kind); }

namespace {

Eigen::VectorXd residual_2d(const FieldState2D& s) {
  const int n = s.n;
  const double c = s.eps * s.eps / (s.h * s.h);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(s.values.size());
  for (int j = 1; j < n - 1; ++j)
    for (int i = 1; i < n - 1; ++i) {
      const double lap = s.at(i + 1, j) + s.at(i - 1, j) + s.at(i, j + 1) + s.at(i, j - 1) -
                         4.0 * s.at(i, j);
      r[static_cast<Eigen::Index>(j) * n + i] = c * lap - potential_d1(s.at(i, j), s.kind);
    }
  return r;
}

}  // namespace

double pde_residual(const FieldState2D& s, double collar) {
  const Eigen::VectorXd r = residual_2d(s);
  double m = 0.0;
  for (int j = 1; j < s.n - 1; ++j)
    for (int i = 1; i < s.n - 1; ++i) {
      const double bx = std::min(s.x(i) + s.L, s.L - s.x(i));
      const double by = std::min(s.x(j) + s.L, s.L - s.x(j));
      if (std::min(bx, by) < collar) continue;
      m = std::max(m, std::abs(r[static_cast<Eigen::Index>(j) * s.n + i]));
    }
  return m;
}

GluedSolution relax_field(FieldState2D state, double tol, int max_iter) {
  const int n = state.n;
  const int m = n - 2;
  const Eigen::Index dim = static_cast<Eigen::Index>(m) * m;
  const double c = state.eps * state.eps / (state.h * state.h);
  auto unk = [m](int i, int j) { return static_cast<Eigen::Index>(j - 1) * m + (i - 1); };
  auto full = [n](int i, int j) { return static_cast<Eigen::Index>(j) * n + i; };

  GluedSolution out;
  Eigen::VectorXd r = residual_2d(state);
  double rn = r.norm();
  double rmax = r.lpNorm<Eigen::Infinity>();
  int it = 0;
  while (rmax >= tol) {
    if (it == max_iter)
      fail(ErrorKind::NewtonNoConverge, "2D Newton residual " + std::to_string(rmax));
    ++it;
    // (-J) δ = F with -J = -ε²Δ_h + diag W''(u), symmetric.
    std::vector<Triplet> trips;
    trips.reserve(5 * dim);
    Eigen::VectorXd rhs(dim);
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const Eigen::Index k = unk(i, j);
        trips.emplace_back(k, k, 4.0 * c + potential_d2(state.at(i, j), state.kind));
        if (i > 1) trips.emplace_back(k, unk(i - 1, j), -c);
        if (i < n - 2) trips.emplace_back(k, unk(i + 1, j), -c);
        if (j > 1) trips.emplace_back(k, unk(i, j - 1), -c);
        if (j < n - 2) trips.emplace_back(k, unk(i, j + 1), -c);
        rhs[k] = r[full(i, j)];
      }
    SpMat A(dim, dim);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd delta;
    bool ok = A.diagonal().minCoeff() > 0.0;
    if (ok) {
      Eigen::MINRES<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> solver;
      solver.setTolerance(1e-10);
      solver.setMaxIterations(20000);
      solver.compute(A);
      delta = solver.solve(rhs);
      ok = solver.info() == Eigen::Success && delta.allFinite();
    }
    if (!ok) {
      ++out.direct_fallbacks;
      Eigen::SparseLU<SpMat> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success) fail(ErrorKind::NewtonNoConverge, "singular 2D Jacobian");
      delta = lu.solve(rhs);
    }

    const Eigen::VectorXd base = state.values;
    double t = 1.0;
    bool improved = false;
    while (t > 1e-6) {
      for (int j = 1; j < n - 1; ++j)
        for (int i = 1; i < n - 1; ++i) state.values[full(i, j)] = base[full(i, j)] + t * delta[unk(i, j)];
      const Eigen::VectorXd rr = residual_2d(state);
      if (rr.norm() < rn) {
        r = rr;
        rn = rr.norm();
        rmax = rr.lpNorm<Eigen::Infinity>();
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {
      state.values = base;
      fail(ErrorKind::NewtonNoConverge, "2D Newton stalled at residual " + std::to_string(rmax));
    }
  }
  out.iterations = it;
  out.residual = rmax;
  out.interior_residual = pde_residual(state, 5.0 * state.eps);
  out.state = std::move(state);
  return out;
}

GluedSolution relax_glued_kinks(const std::vector<Eigen::Vector2d>& directions, double L,
                                double eps, int n) {
  const auto cnt = directions.size();
  if (cnt != 2 && cnt != 4 && cnt != 6)
    fail(ErrorKind::InvalidArgument, "need 2m directions with m in {1, 2, 3}");
  for (std::size_t a = 0; a < cnt; ++a) {
    if (std::abs(directions[a].norm() - 1.0) > 1e-9)
      fail(ErrorKind::InvalidArgument, "directions must be unit vectors");
    for (std::size_t b = a + 1; b < cnt; ++b)
      if ((directions[a] - directions[b]).norm() < 1e-9)
        fail(ErrorKind::InvalidArgument, "directions must be distinct");
  }
  if (!(eps > 0.0) || L / eps < 20.0) fail(ErrorKind::InvalidArgument, "need L/eps >= 20");
  if (n < 16) fail(ErrorKind::InvalidArgument, "grid must have at least 16 points per side");

  // Grid sequencing: the X-shaped ansatz is far from the reconnected solution,
  // so Newton starts on the coarsest grid that still resolves ε and each
  // finer level is seeded by interpolating the previous one.
  std::vector<int> levels{n};
  while (true) {
    const int next = (levels.back() + 1) / 2;
    if (next < 16 || 2.0 * L / (next - 1) > eps) break;
    levels.push_back(next);
  }
  std::reverse(levels.begin(), levels.end());
  GluedSolution sol;
  int total = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    FieldState2D start = glued_ansatz(directions, L, eps, levels[k]);
    if (k > 0) {
      const FieldState2D& coarse = sol.state;
      for (int j = 1; j < start.n - 1; ++j)
        for (int i = 1; i < start.n - 1; ++i)
          start.values[static_cast<Eigen::Index>(j) * start.n + i] = coarse.sample(start.x(i), start.x(j));
    }
    const int fallbacks = sol.direct_fallbacks;
    sol = relax_field(std::move(start));
    total += sol.iterations;
    sol.direct_fallbacks += fallbacks;
  }
  sol.iterations = total;
  return sol;
}

int boundary_zero_crossings(const FieldState2D& s) {
  const int n = s.n;
  std::vector<double> loop;
  loop.reserve(4 * n);
  for (int i = 0; i < n - 1; ++i) loop.push_back(s.at(i, 0));
  for (int j = 0; j < n - 1; ++j) loop.push_back(s.at(n - 1, j));
  for (int i = n - 1; i > 0; --i) loop.push_back(s.at(i, n - 1));
  for (int j = n - 1; j > 0; --j) loop.push_back(s.at(0, j));
  int count = 0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const bool a = loop[k] >= 0.0, b = loop[(k + 1) % loop.size()] >= 0.0;
    if (a != b) ++count;
  }
  return count;
}

double localization_defect(const FieldState2D& s, double dist) {
  double worst = 0.0;
  for (int j = 1; j < s.n - 1; ++j)
    for (int i = 1; i < s.n - 1; ++i) {
      if (distance_to_rays(s.directions, s.x(i), s.x(j)) <= dist) continue;
      const double u = s.at(i, j);
      const double gx = (s.at(i + 1, j) - s.at(i - 1, j)) / (2.0 * s.h);
      const double gy = (s.at(i, j + 1) - s.at(i, j - 1)) / (2.0 * s.h);
      worst = std::max({worst, 1.0 - u * u, std::hypot(gx, gy)});
    }
  return worst;
}

std::vector<Eigen::Vector2d> directions_from_degrees(const std::vector<double>& degrees) {
  std::vector<Eigen::Vector2d> out;
  for (double d : degrees) {
    const double r = d * kPi / 180.0;
    out.emplace_back(std::cos(r), std::sin(r));
  }
  return out;
}

}  // namespace pwidths
