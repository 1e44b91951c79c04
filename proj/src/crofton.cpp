#include "pwidths/crofton.hpp"

#include "pwidths/error.hpp"
#include "pwidths/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

namespace pwidths {

namespace {
constexpr double kPi = std::numbers::pi;
}

SpherePolynomial::SpherePolynomial(int k, std::vector<double> f, std::vector<double> g)
    : k_(k), f_(std::move(f)), g_(std::move(g)) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "degree bound k must be >= 1");
  if (static_cast<int>(f_.size()) != monomial_count(k) ||
      static_cast<int>(g_.size()) != monomial_count(k - 1))
    fail(ErrorKind::InvalidArgument, "coefficient vectors have the wrong length");
  if (!(coeff_norm() > 0.0)) fail(ErrorKind::InvalidArgument, "polynomial is identically zero");
}

SpherePolynomial SpherePolynomial::linear(double cx, double cy, double cz, double c0) {
  return SpherePolynomial(1, {c0, cx, cy}, {cz});
}

SpherePolynomial SpherePolynomial::random(int k, std::uint64_t key) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "degree bound k must be >= 1");
  std::vector<double> f(monomial_count(k)), g(monomial_count(k - 1));
  std::uint64_t c = 0;
  double n2 = 0.0;
  for (auto& v : f) {
    v = rng::gaussian(key, c++);
    n2 += v * v;
  }
  for (auto& v : g) {
    v = rng::gaussian(key, c++);
    n2 += v * v;
  }
  const double n = std::sqrt(n2);
  for (auto& v : f) v /= n;
  for (auto& v : g) v /= n;
  return SpherePolynomial(k, std::move(f), std::move(g));
}

double SpherePolynomial::coeff_norm() const {
  double s = 0.0;
  for (double v : f_) s += v * v;
  for (double v : g_) s += v * v;
  return std::sqrt(s);
}

namespace {
double eval_xy(const std::vector<double>& coeffs, int degree, double x, double y) {
  double total = 0.0;
  int idx = 0;
  for (int d = 0; d <= degree; ++d) {
    for (int b = 0; b <= d; ++b) total += coeffs[idx++] * std::pow(x, d - b) * std::pow(y, b);
  }
  return total;
}
}  // namespace

double SpherePolynomial::operator()(const Eigen::Vector3d& p) const {
  return eval_xy(f_, k_, p[0], p[1]) + p[2] * eval_xy(g_, k_ - 1, p[0], p[1]);
}

SpherePolynomial SpherePolynomial::scaled(double c) const {
  auto f = f_;
  auto g = g_;
  for (auto& v : f) v *= c;
  for (auto& v : g) v *= c;
  return SpherePolynomial(k_, std::move(f), std::move(g));
}

SpherePolynomial SpherePolynomial::compose_rotation(const Eigen::Matrix3d& R) const {
  // Restrictions of A_k to S² are injective, so a least-squares fit on
  // scattered sphere points recovers the composed polynomial exactly.
  const int nf = monomial_count(k_), ng = monomial_count(k_ - 1);
  const int dim = nf + ng;
  const int m = 4 * dim;
  Eigen::MatrixXd A(m, dim);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const std::uint64_t key = rng::derive_key(0x5eedULL, static_cast<std::uint64_t>(i));
    Eigen::Vector3d x(rng::gaussian(key, 0), rng::gaussian(key, 1), rng::gaussian(key, 2));
    x.normalize();
    int col = 0;
    for (int d = 0; d <= k_; ++d)
      for (int b = 0; b <= d; ++b) A(i, col++) = std::pow(x[0], d - b) * std::pow(x[1], b);
    for (int d = 0; d <= k_ - 1; ++d)
      for (int b = 0; b <= d; ++b) A(i, col++) = x[2] * std::pow(x[0], d - b) * std::pow(x[1], b);
    rhs[i] = (*this)(R * x);
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
  std::vector<double> f(sol.data(), sol.data() + nf), g(sol.data() + nf, sol.data() + dim);
  return SpherePolynomial(k_, std::move(f), std::move(g));
}

// ---------------------------------------------------------------------------

GreatCircle::GreatCircle(const Eigen::Vector3d& xi) : pole(xi) {
  if (!xi.allFinite() || std::abs(xi.norm() - 1.0) > 1e-12)
    fail(ErrorKind::InvalidArgument, "great-circle pole must be a unit vector");
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> GreatCircle::basis() const {
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitY().cross(pole);
  if (e1.norm() < 1e-6) e1 = Eigen::Vector3d::UnitZ().cross(pole);
  e1.normalize();
  return {e1, pole.cross(e1)};
}

double TrigPolynomial::operator()(double theta) const {
  double v = 0.0;
  for (int j = 0; j <= degree(); ++j) v += c[j] * std::cos(j * theta) + s[j] * std::sin(j * theta);
  return v;
}

double TrigPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::abs(v));
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

TrigPolynomial restrict_to_circle(int k, const std::function<double(const Eigen::Vector3d&)>& fn,
                                  const GreatCircle& circle) {
  const auto [e1, e2] = circle.basis();
  const int n = 4 * k + 4;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * i / n;
    vals[i] = fn(std::cos(th) * e1 + std::sin(th) * e2);
  }
  TrigPolynomial t;
  t.c.assign(k + 1, 0.0);
  t.s.assign(k + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    double cs = 0.0, sn = 0.0;
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * kPi * i / n;
      cs += vals[i] * std::cos(j * th);
      sn += vals[i] * std::sin(j * th);
    }
    t.c[j] = (j == 0 ? 1.0 : 2.0) * cs / n;
    t.s[j] = j == 0 ? 0.0 : 2.0 * sn / n;
  }
  return t;
}

TrigPolynomial restrict_to_circle(const SpherePolynomial& poly, const GreatCircle& circle) {
  return restrict_to_circle(poly.k(), [&poly](const Eigen::Vector3d& x) { return poly(x); },
                            circle);
}

std::vector<double> zeros_on_circle(const TrigPolynomial& t, double scale, double zero_tol) {
  const double amax = t.max_abs_coeff();
  if (amax < zero_tol * scale)
    fail(ErrorKind::IdenticallyZeroOnCircle, "restriction vanishes on the circle");
  const int k = t.degree();
  using cd = std::complex<double>;
  // w^k T(θ) with w = e^{iθ}, as a degree-2k polynomial in w.
  std::vector<cd> a(2 * k + 1);
  a[k] = t.c[0];
  for (int j = 1; j <= k; ++j) {
    a[k + j] = cd(t.c[j], -t.s[j]) / 2.0;
    a[k - j] = cd(t.c[j], t.s[j]) / 2.0;
  }
  const double trim = 1e-14 * amax;
  int lo = 0, hi = 2 * k;
  while (hi > lo && std::abs(a[hi]) <= trim) --hi;
  while (lo < hi && std::abs(a[lo]) <= trim) ++lo;
  const int deg = hi - lo;
  std::vector<double> angles;
  if (deg == 0) return angles;

  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = -a[lo + i] / a[hi];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  for (int i = 0; i < deg; ++i) {
    const cd w = es.eigenvalues()[i];
    if (std::abs(std::abs(w) - 1.0) < 1e-8) {
      double th = std::arg(w);
      if (th < 0) th += 2.0 * kPi;
      angles.push_back(th);
    }
  }
  std::sort(angles.begin(), angles.end());
  std::vector<double> out;
  for (double th : angles)
    if (out.empty() || th - out.back() > 1e-7) out.push_back(th);
  if (out.size() > 1 && out.front() + 2.0 * kPi - out.back() <= 1e-7) out.pop_back();
  return out;
}

int count_zeros_on_circle(const SpherePolynomial& poly, const GreatCircle& circle) {
  const auto t = restrict_to_circle(poly, circle);
  const int n = static_cast<int>(zeros_on_circle(t, poly.coeff_norm()).size());
  if (n > 2 * poly.k())
    fail(ErrorKind::AssertionFailed, "zero count exceeds 2k on a great circle");
  return n;
}

// ---------------------------------------------------------------------------

Eigen::Vector3d crofton_pole(std::uint64_t seed, long long sample, int attempt) {
  const std::uint64_t key =
      rng::derive_key(seed, static_cast<std::uint64_t>(sample), static_cast<std::uint64_t>(attempt));
  for (std::uint64_t c = 0;; c += 3) {
    Eigen::Vector3d v(rng::gaussian(key, c), rng::gaussian(key, c + 1), rng::gaussian(key, c + 2));
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

CroftonEstimate crofton_length(const SpherePolynomial& poly, long long n_samples,
                               std::uint64_t seed, int threads) {
  if (n_samples < 100) fail(ErrorKind::InvalidArgument, "crofton_length needs at least 100 samples");
  threads = std::max(1, threads);

  struct Partial {
    long long sum = 0, sum_sq = 0, rejected = 0;
    int max_count = 0;
  };
  std::vector<Partial> parts(threads);
  auto work = [&](int t) {
    Partial& acc = parts[t];
    const long long begin = n_samples * t / threads, end = n_samples * (t + 1) / threads;
    for (long long i = begin; i < end; ++i) {
      for (int attempt = 0;; ++attempt) {
        try {
          const int n = count_zeros_on_circle(poly, GreatCircle(crofton_pole(seed, i, attempt)));
          acc.sum += n;
          acc.sum_sq += static_cast<long long>(n) * n;
          acc.max_count = std::max(acc.max_count, n);
          break;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::IdenticallyZeroOnCircle || attempt > 64) throw;
          ++acc.rejected;
        }
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  Partial tot;
  for (const auto& p : parts) {
    tot.sum += p.sum;
    tot.sum_sq += p.sum_sq;
    tot.rejected += p.rejected;
    tot.max_count = std::max(tot.max_count, p.max_count);
  }
  const double n = static_cast<double>(n_samples);
  const double mean = tot.sum / n;
  // Integer sums keep the variance exact and thread-count independent.
  const double num = static_cast<double>(tot.sum_sq) * n_samples - static_cast<double>(tot.sum) * tot.sum;
  const double var = std::max(0.0, num / (n * (n - 1.0)));
  CroftonEstimate est;
  est.length_mean = kPi * mean;
  est.std_error = kPi * std::sqrt(var / n);
  est.n_samples = n_samples;
  est.seed = seed;
  est.rejected = tot.rejected;
  est.max_count = tot.max_count;
  return est;
}

double width_upper_bound(long long p) {
  if (p < 1) fail(ErrorKind::InvalidArgument, "p must be >= 1");
  long long r = static_cast<long long>(std::sqrt(static_cast<double>(p)));
  while (r * r > p) --r;
  while ((r + 1) * (r + 1) <= p) ++r;
  return 2.0 * kPi * static_cast<double>(r);
}

MassBoundReport verify_mass_bound(int k, int trials, long long n_samples, std::uint64_t seed,
                                  int threads) {
  if (k < 1 || k > 6) fail(ErrorKind::InvalidArgument, "k must lie in [1, 6]");
  if (trials < 1) fail(ErrorKind::InvalidArgument, "trials must be >= 1");
  MassBoundReport rep;
  rep.k = k;
  rep.trials = trials;
  rep.n_samples = n_samples;
  rep.seed = seed;
  rep.bound = 2.0 * kPi * k;
  for (int t = 0; t < trials; ++t) {
    const auto poly = SpherePolynomial::random(k, rng::derive_key(seed, 0x706f6c79ULL, t));
    auto est = crofton_length(poly, n_samples, rng::derive_key(seed, 0x706f6c65ULL, t), threads);
    rep.max = t == 0 ? est.length_mean : std::max(rep.max, est.length_mean);
    rep.max_std_error = std::max(rep.max_std_error, est.std_error);
    rep.per_trial.push_back(est);
  }
  rep.margin = rep.bound - rep.max;
  rep.passed = rep.margin > -3.0 * rep.max_std_error;
  return rep;
}

}  // namespace pwidths
