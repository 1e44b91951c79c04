#include "pwidths/surface.hpp"

#include "pwidths/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pwidths {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPointTol = 1e-12;

bool in_regime(double a) { return std::isfinite(a) && a >= 0.5 && a <= 2.0; }

Vec3 inv_sq(const std::array<double, 3>& a) {
  return {1.0 / (a[0] * a[0]), 1.0 / (a[1] * a[1]), 1.0 / (a[2] * a[2])};
}

using State = std::array<double, 6>;

struct EllipsoidFlow {
  Vec3 w;  // 1/a_i^2
  void operator()(const State& s, State& ds, double) const {
    const Vec3 x(s[0], s[1], s[2]);
    const Vec3 v(s[3], s[4], s[5]);
    const Vec3 g = x.cwiseProduct(w);
    const double num = v.cwiseProduct(v).dot(w);
    const double den = g.squaredNorm();
    const Vec3 acc = -(num / den) * g;
    ds = {v[0], v[1], v[2], acc[0], acc[1], acc[2]};
  }
};

double perimeter_unchecked(double b, double c) {
  auto f = [b, c](double t) {
    const double s = std::sin(t), co = std::cos(t);
    return std::sqrt(b * b * s * s + c * c * co * co);
  };
  using boost::math::quadrature::gauss_kronrod;
  return 4.0 * gauss_kronrod<double, 31>::integrate(f, 0.0, kPi / 2, 20, 1e-15);
}

std::array<double, 3> lengths_unchecked(const std::array<double, 3>& a) {
  return {perimeter_unchecked(a[1], a[2]), perimeter_unchecked(a[0], a[2]),
          perimeter_unchecked(a[0], a[1])};
}

GeodesicSegment make_segment(const Vec3& p, const Vec3& q, double length, const Vec3& t0,
                             const Vec3& t1, std::vector<Vec3> samples) {
  GeodesicSegment seg;
  seg.start = p;
  seg.end = q;
  seg.length = length;
  seg.tangent_start = t0;
  seg.tangent_end = t1;
  const int n = static_cast<int>(samples.size());
  seg.arclength.resize(n);
  for (int i = 0; i < n; ++i) seg.arclength[i] = length * i / (n - 1);
  samples.front() = p;
  samples.back() = q;
  seg.samples = std::move(samples);
  return seg;
}

}  // namespace

// ---------------------------------------------------------------------------

Surface Surface::round_sphere() { return Surface(SurfaceKind::RoundSphere, {1.0, 1.0, 1.0}, kPi); }

Surface Surface::ellipsoid(double a1, double a2, double a3) {
  if (!in_regime(a1) || !in_regime(a2) || !in_regime(a3))
    fail(ErrorKind::UnsupportedRegime, "ellipsoid semi-axes must lie in [0.5, 2]");
  return Surface(SurfaceKind::Ellipsoid, {a1, a2, a3}, kPi / 2);
}

Surface Surface::flat_rect(double width, double height) {
  if (!(width > 0) || !(height > 0) || !std::isfinite(width) || !std::isfinite(height))
    fail(ErrorKind::InvalidArgument, "rectangle sides must be positive");
  return Surface(SurfaceKind::FlatRect, {width, height, 0.0}, 0.5 * std::min(width, height));
}

std::string Surface::kind_name() const {
  switch (kind_) {
    case SurfaceKind::RoundSphere: return "RoundSphere";
    case SurfaceKind::Ellipsoid: return "Ellipsoid";
    case SurfaceKind::FlatRect: return "FlatRect";
  }
  return "?";
}

double Surface::defining_function(const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::RoundSphere: return x.squaredNorm() - 1.0;
    case SurfaceKind::Ellipsoid: return x.cwiseProduct(x).dot(inv_sq(params_)) - 1.0;
    case SurfaceKind::FlatRect: return x[2];
  }
  return 0.0;
}

Vec3 Surface::unit_normal(const Vec3& p) const {
  switch (kind_) {
    case SurfaceKind::RoundSphere: return p.normalized();
    case SurfaceKind::Ellipsoid: return p.cwiseProduct(inv_sq(params_)).normalized();
    case SurfaceKind::FlatRect: return Vec3::UnitZ();
  }
  return Vec3::UnitZ();
}

double Surface::gaussian_curvature(const Vec3& p) const {
  switch (kind_) {
    case SurfaceKind::RoundSphere: return 1.0;
    case SurfaceKind::Ellipsoid: {
      const Vec3 w = inv_sq(params_);
      const double s = p.cwiseProduct(w).squaredNorm();
      const double abc = params_[0] * params_[1] * params_[2];
      return 1.0 / (abc * abc * s * s);
    }
    case SurfaceKind::FlatRect: return 0.0;
  }
  return 0.0;
}

std::pair<Vec3, Vec3> Surface::tangent_basis(const Vec3& p) const {
  const Vec3 n = unit_normal(p);
  Eigen::Index k;
  n.cwiseAbs().minCoeff(&k);
  Vec3 axis = Vec3::Zero();
  axis[k] = 1.0;
  const Vec3 e1 = (axis - axis.dot(n) * n).normalized();
  return {e1, n.cross(e1)};
}

Vec3 Surface::project_tangent(const Vec3& p, const Vec3& v) const {
  const Vec3 n = unit_normal(p);
  return v - v.dot(n) * n;
}

Vec3 Surface::project(const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::RoundSphere: return x.normalized();
    case SurfaceKind::Ellipsoid:
      return x / std::sqrt(x.cwiseProduct(x).dot(inv_sq(params_)));
    case SurfaceKind::FlatRect: return {x[0], x[1], 0.0};
  }
  return x;
}

bool Surface::contains(const Vec3& p, double tol) const {
  if (!p.allFinite()) return false;
  if (std::abs(defining_function(p)) > tol) return false;
  if (kind_ == SurfaceKind::FlatRect)
    return std::abs(p[0]) <= 0.5 * params_[0] + tol && std::abs(p[1]) <= 0.5 * params_[1] + tol;
  return true;
}

void Surface::check_point(const Vec3& p) const {
  if (!contains(p, kPointTol)) fail(ErrorKind::OutOfDomain, "point is not on the " + kind_name());
}

nlohmann::json Surface::to_json() const {
  nlohmann::json j;
  j["kind"] = kind_name();
  switch (kind_) {
    case SurfaceKind::RoundSphere: j["params"] = nlohmann::json::array(); break;
    case SurfaceKind::Ellipsoid: j["params"] = {params_[0], params_[1], params_[2]}; break;
    case SurfaceKind::FlatRect: j["params"] = {params_[0], params_[1]}; break;
  }
  return j;
}

Surface Surface::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    fail(ErrorKind::InvalidArgument, "surface must be an object with a kind");
  if (!j.at("kind").is_string()) fail(ErrorKind::InvalidArgument, "surface kind must be a string");
  const auto kind = j.at("kind").get<std::string>();
  std::vector<double> ps;
  if (j.contains("params") && !j.at("params").is_null()) {
    const auto& jp = j.at("params");
    if (!jp.is_array() || !std::all_of(jp.begin(), jp.end(), [](const auto& v) { return v.is_number(); }))
      fail(ErrorKind::InvalidArgument, "surface params must be an array of numbers");
    ps = jp.get<std::vector<double>>();
  }
  if (kind == "RoundSphere") return round_sphere();
  if (kind == "Ellipsoid") {
    if (ps.size() != 3) fail(ErrorKind::InvalidArgument, "Ellipsoid needs three params");
    return ellipsoid(ps[0], ps[1], ps[2]);
  }
  if (kind == "FlatRect") {
    if (ps.size() != 2) fail(ErrorKind::InvalidArgument, "FlatRect needs two params");
    return flat_rect(ps[0], ps[1]);
  }
  fail(ErrorKind::InvalidArgument, "unknown surface kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

Vec3 geodesic_acceleration(const Surface& surface, const Vec3& x, const Vec3& v) {
  switch (surface.kind()) {
    case SurfaceKind::RoundSphere: return -v.squaredNorm() * x / x.squaredNorm();
    case SurfaceKind::Ellipsoid: {
      const Vec3 w = inv_sq(surface.params());
      const Vec3 g = x.cwiseProduct(w);
      return -(v.cwiseProduct(v).dot(w) / g.squaredNorm()) * g;
    }
    case SurfaceKind::FlatRect: return Vec3::Zero();
  }
  return Vec3::Zero();
}

GeodesicEndState integrate_geodesic(const Surface& surface, const Vec3& p, const Vec3& unit_v,
                                    double length, std::vector<Vec3>* samples, int n_samples) {
  const int n = samples ? std::max(n_samples, 2) : 2;
  if (samples) samples->assign(n, p);
  switch (surface.kind()) {
    case SurfaceKind::RoundSphere: {
      auto at = [&](double s) { return Vec3(std::cos(s) * p + std::sin(s) * unit_v); };
      if (samples)
        for (int i = 0; i < n; ++i) (*samples)[i] = at(length * i / (n - 1));
      return {at(length), Vec3(-std::sin(length) * p + std::cos(length) * unit_v)};
    }
    case SurfaceKind::FlatRect: {
      if (samples)
        for (int i = 0; i < n; ++i) (*samples)[i] = p + (length * i / (n - 1)) * unit_v;
      return {p + length * unit_v, unit_v};
    }
    case SurfaceKind::Ellipsoid: break;
  }

  namespace odeint = boost::numeric::odeint;
  EllipsoidFlow flow{inv_sq(surface.params())};
  State s{p[0], p[1], p[2], unit_v[0], unit_v[1], unit_v[2]};
  if (length == 0.0) return {p, unit_v};
  std::vector<double> times(n);
  for (int i = 0; i < n; ++i) times[i] = length * i / (n - 1);
  std::vector<State> traj;
  traj.reserve(n);
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(1e-14, 1e-14);
  odeint::integrate_times(stepper, flow, s, times.begin(), times.end(),
                          std::min(0.05, length / 4),
                          [&](const State& st, double) { traj.push_back(st); });
  if (samples)
    for (int i = 0; i < n; ++i)
      (*samples)[i] = surface.project(Vec3(traj[i][0], traj[i][1], traj[i][2]));
  const State& e = traj.back();
  const Vec3 x = surface.project(Vec3(e[0], e[1], e[2]));
  Vec3 v = surface.project_tangent(x, Vec3(e[3], e[4], e[5]));
  return {x, v.normalized()};
}

// ---------------------------------------------------------------------------

namespace {

GeodesicSegment ellipsoid_bvp(const Surface& surface, const Vec3& p, const Vec3& q,
                              int n_samples) {
  const double inj = surface.inj_lower_bound();
  const auto [e1, e2] = surface.tangent_basis(p);

  const double radius = 0.5 * (p.norm() + q.norm());
  const double chord = (q - p).norm();
  const double guess_len = 2.0 * radius * std::asin(std::min(1.0, chord / (2.0 * radius)));
  if (guess_len > 1.25 * inj)
    fail(ErrorKind::BeyondInjectivityRadius, "points are too far apart for a segment");
  const Vec3 t = surface.project_tangent(p, q - p).normalized();
  Eigen::Vector2d w(guess_len * t.dot(e1), guess_len * t.dot(e2));

  auto shoot = [&](const Eigen::Vector2d& ww) -> Vec3 {
    const double len = ww.norm();
    const Vec3 dir = (ww[0] * e1 + ww[1] * e2) / len;
    return integrate_geodesic(surface, p, dir, len).position - q;
  };

  Vec3 r = shoot(w);
  double rn = r.norm();
  bool converged = rn < 1e-13;
  for (int it = 0; it < 60 && !converged; ++it) {
    const double h = 1e-7 * std::max(1.0, w.norm());
    Eigen::Matrix<double, 3, 2> J;
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2d dp = w, dm = w;
      dp[k] += h;
      dm[k] -= h;
      J.col(k) = (shoot(dp) - shoot(dm)) / (2.0 * h);
    }
    const Eigen::Vector2d step = J.colPivHouseholderQr().solve(-r);
    double tstep = 1.0;
    bool improved = false;
    while (tstep > 1e-4) {
      const Eigen::Vector2d wn = w + tstep * step;
      const Vec3 rr = shoot(wn);
      if (rr.norm() < rn) {
        w = wn;
        r = rr;
        rn = rr.norm();
        improved = true;
        break;
      }
      tstep *= 0.5;
    }
    if (rn < 1e-13) converged = true;
    else if (!improved) {
      if (rn < 1e-11) converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorKind::ShootingNoConverge,
         "ellipsoid shooting stalled with residual " + std::to_string(rn));

  const double len = w.norm();
  if (len >= inj) fail(ErrorKind::BeyondInjectivityRadius, "segment length exceeds injectivity bound");
  const Vec3 dir = (w[0] * e1 + w[1] * e2) / len;
  std::vector<Vec3> samples;
  const auto end = integrate_geodesic(surface, p, dir, len, &samples, n_samples);
  return make_segment(p, q, len, dir, end.velocity, std::move(samples));
}

}  // namespace

GeodesicSegment geodesic_between(const Surface& surface, const Vec3& p, const Vec3& q,
                                 int n_samples) {
  surface.check_point(p);
  surface.check_point(q);
  if (n_samples < 2) fail(ErrorKind::InvalidArgument, "need at least two samples");
  if ((p - q).norm() < 1e-14) fail(ErrorKind::PointsCoincide, "segment endpoints coincide");
  const double inj = surface.inj_lower_bound();

  switch (surface.kind()) {
    case SurfaceKind::RoundSphere: {
      const Vec3 c = p.cross(q);
      const double len = std::atan2(c.norm(), p.dot(q));
      if (len >= inj - 1e-12) fail(ErrorKind::BeyondInjectivityRadius, "antipodal points");
      const Vec3 t0 = (q - p.dot(q) * p).normalized();
      std::vector<Vec3> samples;
      const auto end = integrate_geodesic(surface, p, t0, len, &samples, n_samples);
      return make_segment(p, q, len, t0, end.velocity, std::move(samples));
    }
    case SurfaceKind::FlatRect: {
      const double len = (q - p).norm();
      if (len >= inj) fail(ErrorKind::BeyondInjectivityRadius, "segment longer than half the short side");
      const Vec3 t0 = (q - p) / len;
      std::vector<Vec3> samples;
      integrate_geodesic(surface, p, t0, len, &samples, n_samples);
      return make_segment(p, q, len, t0, t0, std::move(samples));
    }
    case SurfaceKind::Ellipsoid: return ellipsoid_bvp(surface, p, q, n_samples);
  }
  fail(ErrorKind::InvalidArgument, "unknown surface");
}

Vec3 point_on_segment(const Surface& surface, const GeodesicSegment& seg, double s) {
  if (s <= 0.0) return seg.start;
  if (s >= seg.length) return seg.end;
  return integrate_geodesic(surface, seg.start, seg.tangent_start, s).position;
}

Vec3 exp_map(const Surface& surface, const Vec3& p, const Vec3& v) {
  surface.check_point(p);
  const Vec3 tv = surface.project_tangent(p, v);
  const double len = tv.norm();
  if (len >= surface.inj_lower_bound())
    fail(ErrorKind::VectorTooLong, "tangent vector exceeds injectivity bound");
  if (len == 0.0) return p;
  const Vec3 x = integrate_geodesic(surface, p, tv / len, len).position;
  if (surface.kind() == SurfaceKind::FlatRect && !surface.contains(x))
    fail(ErrorKind::OutOfDomain, "exp leaves the rectangle");
  return x;
}

Vec3 log_map(const Surface& surface, const Vec3& p, const Vec3& q) {
  if ((p - q).norm() < 1e-14) return Vec3::Zero();
  const auto seg = geodesic_between(surface, p, q, 2);
  return seg.length * seg.tangent_start;
}

double distance(const Surface& surface, const Vec3& p, const Vec3& q) {
  if ((p - q).norm() < 1e-14) return 0.0;
  return geodesic_between(surface, p, q, 2).length;
}

// ---------------------------------------------------------------------------

double ellipse_perimeter(double b, double c) {
  if (!(b > 0) || !(c > 0)) fail(ErrorKind::InvalidArgument, "ellipse semi-axes must be positive");
  return perimeter_unchecked(b, c);
}

PrincipalLengths principal_geodesic_lengths(double a1, double a2, double a3) {
  if (!in_regime(a1) || !in_regime(a2) || !in_regime(a3))
    fail(ErrorKind::UnsupportedRegime, "ellipsoid semi-axes must lie in [0.5, 2]");
  return {lengths_unchecked({a1, a2, a3})};
}

Eigen::Matrix3d principal_lengths_jacobian(const std::array<double, 3>& a, double h) {
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    auto ap = a, am = a;
    ap[k] += h;
    am[k] -= h;
    const auto lp = lengths_unchecked(ap), lm = lengths_unchecked(am);
    for (int i = 0; i < 3; ++i) J(i, k) = (lp[i] - lm[i]) / (2.0 * h);
  }
  return J;
}

TunedEllipsoid tune_ellipsoid(double mu) {
  if (!std::isfinite(mu) || mu < 0.0 || mu > 0.1)
    fail(ErrorKind::InvalidArgument, "mu must lie in [0, 0.1]");
  const Eigen::Vector3d target(2 * kPi, 2 * kPi + mu, 2 * kPi + 2 * mu);
  std::array<double, 3> a{1.0, 1.0, 1.0};
  auto residual = [&](const std::array<double, 3>& x) -> Eigen::Vector3d {
    const auto l = lengths_unchecked(x);
    return Eigen::Vector3d(l[0], l[1], l[2]) - target;
  };
  Eigen::Vector3d r = residual(a);
  double rn = r.lpNorm<Eigen::Infinity>();
  int it = 0;
  while (rn >= 1e-12 && it < 50) {
    ++it;
    const Eigen::Matrix3d J = principal_lengths_jacobian(a, 1e-6);
    const Eigen::Vector3d step = J.partialPivLu().solve(-r);
    double t = 1.0;
    bool improved = false;
    while (t > 1e-6) {
      std::array<double, 3> an{a[0] + t * step[0], a[1] + t * step[1], a[2] + t * step[2]};
      const Eigen::Vector3d rr = residual(an);
      if (rr.lpNorm<Eigen::Infinity>() < rn) {
        a = an;
        r = rr;
        rn = rr.lpNorm<Eigen::Infinity>();
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  if (rn >= 1e-8 || !in_regime(a[0]) || !in_regime(a[1]) || !in_regime(a[2]))
    fail(ErrorKind::NewtonNoConverge, "ellipsoid tuning residual " + std::to_string(rn));
  return {a, rn, it};
}

}  // namespace pwidths
