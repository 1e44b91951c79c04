#include "pwidths/geodesic_nets.hpp"

#include "pwidths/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace pwidths {

namespace {

using AnchorFn = std::function<bool(int)>;

std::vector<GraphStructure::Chain> decompose(const GraphStructure& g, const AnchorFn& anchor) {
  std::vector<GraphStructure::Chain> out;
  std::vector<char> used(g.edge_count(), 0);
  auto walk = [&](int start, int first_edge, bool loop) {
    GraphStructure::Chain c;
    c.loop = loop;
    c.weight = g.edge(first_edge).w;
    c.vertices.push_back(start);
    int u = start;
    int e = first_edge;
    while (true) {
      used[e] = 1;
      c.edges.push_back(e);
      const int v = g.other(e, u);
      if (loop && v == start) break;
      c.vertices.push_back(v);
      if (!loop && anchor(v)) break;
      int next = -1;
      for (int f : g.incident(v))
        if (!used[f]) next = f;
      if (next < 0) break;
      u = v;
      e = next;
    }
    out.push_back(std::move(c));
  };
  for (int u = 0; u < g.vertex_count(); ++u) {
    if (!anchor(u)) continue;
    for (int e : g.incident(u))
      if (!used[e]) walk(u, e, false);
  }
  for (int e = 0; e < g.edge_count(); ++e)
    if (!used[e]) walk(g.edge(e).u, e, true);
  return out;
}

void require_valid(const NetEmbedding& net) {
  if (static_cast<int>(net.p.size()) != net.graph.vertex_count())
    fail(ErrorKind::InvalidArgument, "vertex position count does not match the graph");
}

Vec3 tangent_at(const GraphStructure& g, const NetVarifold& var, int e, int u) {
  const auto& seg = var.segments[e];
  return g.edge(e).u == u ? seg.tangent_start : Vec3(-seg.tangent_end);
}

// Unit normal of the segment at its start and end, N × T.
std::pair<Vec3, Vec3> segment_normals(const Surface& s, const GeodesicSegment& seg) {
  return {s.unit_normal(seg.start).cross(seg.tangent_start),
          s.unit_normal(seg.end).cross(seg.tangent_end)};
}

Vec3 gauged_position(const NetEmbedding& net, const Gauge& gauge, int u, const double* s) {
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < gauge.dof[u]; ++a) v += s[a] * gauge.basis[u][a];
  if (v.squaredNorm() == 0.0) return net.p[u];
  return exp_map(net.surface, net.p[u], v);
}

double edge_length(const Surface& s, const Vec3& p, const Vec3& q) {
  return geodesic_between(s, p, q, 2).length;
}

// RK4 for the geodesic together with the two normal Jacobi solutions
// z (z(0)=1, z'(0)=0) and y (y(0)=0, y'(0)=1).
Eigen::Matrix2d jacobi_rk4(const Surface& surface, const GeodesicSegment& seg, int steps) {
  using State = Eigen::Matrix<double, 10, 1>;
  auto rhs = [&](const State& st) {
    State d;
    const Vec3 x = st.segment<3>(0);
    const Vec3 v = st.segment<3>(3);
    const double K = surface.gaussian_curvature(x);
    d.segment<3>(0) = v;
    d.segment<3>(3) = geodesic_acceleration(surface, x, v);
    d[6] = st[7];
    d[7] = -K * st[6];
    d[8] = st[9];
    d[9] = -K * st[8];
    return d;
  };
  State st;
  st.segment<3>(0) = seg.start;
  st.segment<3>(3) = seg.tangent_start;
  st[6] = 1.0;
  st[7] = 0.0;
  st[8] = 0.0;
  st[9] = 1.0;
  const double h = seg.length / steps;
  for (int k = 0; k < steps; ++k) {
    const State k1 = rhs(st);
    const State k2 = rhs(st + 0.5 * h * k1);
    const State k3 = rhs(st + 0.5 * h * k2);
    const State k4 = rhs(st + h * k3);
    st += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double z = st[6], y = st[8], yp = st[9];
  Eigen::Matrix2d m;
  m << z / y, -1.0 / y, -1.0 / y, yp / y;
  return m;
}

void check_embedding_class(const NetEmbedding& net) {
  const auto& g = net.graph;
  const int n = g.vertex_count();
  for (int u = 0; u < n; ++u) net.surface.check_point(net.p[u]);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if ((net.p[u] - net.p[v]).norm() < 1e-12) {
        std::ostringstream os;
        os << "(I1) vertices " << u << " and " << v << " coincide";
        fail(ErrorKind::ImmersionViolated, os.str());
      }
}

double min_segment_distance(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1) {
  const Vec3 d1 = a1 - a0, d2 = b1 - b0, r = a0 - b0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-300 && e <= 1e-300) return r.norm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double den = a * e - b * b;
      s = den > 1e-300 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (a0 + s * d1 - b0 - t * d2).norm();
}

Eigen::MatrixXd analytic_hessian(const NetEmbedding& net, const NetVarifold& var,
                                 const Gauge& gauge) {
  const auto& g = net.graph;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(gauge.dimension, gauge.dimension);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    const auto& seg = var.segments[e];
    const Eigen::Matrix2d M = ed.w * segment_jacobi_matrix(net.surface, seg);
    const auto [n0, n1] = segment_normals(net.surface, seg);
    const int ends[2] = {ed.u, ed.v};
    const Vec3 nrm[2] = {n0, n1};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int a = 0; a < gauge.dof[ends[x]]; ++a)
          for (int b = 0; b < gauge.dof[ends[y]]; ++b)
            J(gauge.offset[ends[x]] + a, gauge.offset[ends[y]] + b) +=
                M(x, y) * gauge.basis[ends[x]][a].dot(nrm[x]) *
                gauge.basis[ends[y]][b].dot(nrm[y]);
  }
  return J;
}

}  // namespace

// ---------------------------------------------------------------------------
// GraphStructure

GraphStructure::GraphStructure(int n_vertices, std::vector<Edge> edges)
    : n_(n_vertices), edges_(std::move(edges)), incident_(n_vertices) {
  if (n_vertices < 0) fail(ErrorKind::InvalidArgument, "negative vertex count");
  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < edge_count(); ++e) {
    const auto& ed = edges_[e];
    if (ed.u < 0 || ed.v < 0 || ed.u >= n_ || ed.v >= n_)
      fail(ErrorKind::InvalidArgument, "edge endpoint out of range");
    if (ed.u == ed.v) fail(ErrorKind::InvalidArgument, "self-loop edge");
    if (ed.w < 1) fail(ErrorKind::InvalidArgument, "edge weights must be positive integers");
    if (!seen.insert({std::min(ed.u, ed.v), std::max(ed.u, ed.v)}).second)
      fail(ErrorKind::InvalidArgument, "multi-edge");
    incident_[ed.u].push_back(e);
    incident_[ed.v].push_back(e);
  }
}

bool GraphStructure::is_anchor(int u) const {
  if (degree(u) != 2) return true;
  return edges_[incident_[u][0]].w != edges_[incident_[u][1]].w;
}

std::vector<GraphStructure::Chain> GraphStructure::chains() const {
  return decompose(*this, [this](int u) { return is_anchor(u); });
}

bool GraphStructure::is_q_subdivided(int Q) const {
  for (const auto& c : chains()) {
    const int interior = c.loop ? static_cast<int>(c.vertices.size())
                                : static_cast<int>(c.vertices.size()) - 2;
    if (interior != (c.loop ? Q + 1 : Q)) return false;
  }
  return true;
}

GraphStructure GraphStructure::with_weights_scaled(int c) const {
  auto e = edges_;
  for (auto& ed : e) ed.w *= c;
  return GraphStructure(n_, std::move(e));
}

nlohmann::json GraphStructure::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : edges_) edges.push_back({e.u, e.v, e.w});
  return {{"vertices", n_}, {"edges", edges}};
}

// ---------------------------------------------------------------------------

bool NetEmbedding::balanced(double tol) const {
  for (int u = 0; u < graph.vertex_count(); ++u) {
    if (graph.degree(u) != 2) continue;
    const int a = graph.other(graph.incident(u)[0], u);
    const int b = graph.other(graph.incident(u)[1], u);
    if (std::abs(distance(surface, p[u], p[a]) - distance(surface, p[u], p[b])) > tol)
      return false;
  }
  return true;
}

void check_disjoint(const NetEmbedding& net, const std::vector<GeodesicSegment>& segments) {
  const auto& g = net.graph;
  const int m = g.edge_count();
  std::vector<Eigen::AlignedBox3d> box(m);
  for (int e = 0; e < m; ++e)
    for (const auto& x : segments[e].samples) box[e].extend(x);
  for (int e = 0; e < m; ++e) {
    const auto& se = segments[e];
    for (int f = e + 1; f < m; ++f) {
      const auto& sf = segments[f];
      const auto& ee = g.edge(e);
      const auto& ef = g.edge(f);
      int shared = -1;
      if (ee.u == ef.u || ee.u == ef.v) shared = ee.u;
      if (ee.v == ef.u || ee.v == ef.v) shared = ee.v;
      if (shared >= 0) {
        const Vec3 te = ee.u == shared ? se.tangent_start : Vec3(-se.tangent_end);
        const Vec3 tf = ef.u == shared ? sf.tangent_start : Vec3(-sf.tangent_end);
        if ((te - tf).norm() < 1e-6) {
          std::ostringstream os;
          os << "edges " << e << " and " << f << " leave vertex " << shared
             << " in the same direction";
          fail(ErrorKind::SegmentsOverlap, os.str());
        }
        continue;
      }
      if (box[e].exteriorDistance(box[f]) > 1e-3) continue;
      for (size_t i = 0; i + 1 < se.samples.size(); ++i)
        for (size_t j = 0; j + 1 < sf.samples.size(); ++j) {
          const double d = min_segment_distance(se.samples[i], se.samples[i + 1],
                                                sf.samples[j], sf.samples[j + 1]);
          if (d <= 1e-6) {
            std::ostringstream os;
            os << "(E2) edges " << e << " and " << f << " meet away from their endpoints";
            fail(ErrorKind::SegmentsOverlap, os.str());
          }
        }
    }
  }
}

NetVarifold net_varifold(const NetEmbedding& net) {
  require_valid(net);
  check_embedding_class(net);
  const auto& g = net.graph;
  NetVarifold var;
  var.segments.reserve(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    try {
      var.segments.push_back(geodesic_between(net.surface, net.p[ed.u], net.p[ed.v], 64));
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::BeyondInjectivityRadius) throw;
      std::ostringstream os;
      os << "(I2) vertices " << ed.u << " and " << ed.v << " are beyond the injectivity bound";
      fail(ErrorKind::ImmersionViolated, os.str());
    }
    var.multiplicity.push_back(ed.w);
    var.total_mass += ed.w * var.segments.back().length;
  }
  check_disjoint(net, var.segments);
  for (int u = 0; u < g.vertex_count(); ++u)
    if (g.degree(u) != 2) var.singular_vertices.push_back(u);
  return var;
}

Gauge make_gauge(const NetEmbedding& net, const NetVarifold& var) {
  const auto& g = net.graph;
  const int n = g.vertex_count();
  Gauge gauge;
  gauge.offset.resize(n);
  gauge.dof.resize(n);
  gauge.basis.resize(n);
  for (int u = 0; u < n; ++u) {
    gauge.offset[u] = gauge.dimension;
    const Vec3 N = net.surface.unit_normal(net.p[u]);
    if (g.degree(u) == 2) {
      const Vec3 t1 = tangent_at(g, var, g.incident(u)[0], u);
      const Vec3 t2 = tangent_at(g, var, g.incident(u)[1], u);
      Vec3 d = t2 - t1;
      if (d.norm() < 1e-8) d = N.cross(t1);
      gauge.basis[u][0] = N.cross(d).normalized();
      gauge.basis[u][1] = Vec3::Zero();
      gauge.dof[u] = 1;
    } else {
      const auto [e1, e2] = net.surface.tangent_basis(net.p[u]);
      gauge.basis[u] = {e1, e2};
      gauge.dof[u] = 2;
    }
    gauge.dimension += gauge.dof[u];
  }
  return gauge;
}

StationarityReport stationarity_residual(const NetEmbedding& net, const NetVarifold& var,
                                         const Gauge& gauge) {
  const auto& g = net.graph;
  StationarityReport r;
  r.per_vertex.assign(g.vertex_count(), Vec3::Zero());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    r.per_vertex[ed.u] -= ed.w * var.segments[e].tangent_start;
    r.per_vertex[ed.v] += ed.w * var.segments[e].tangent_end;
  }
  r.gauged = Eigen::VectorXd::Zero(gauge.dimension);
  for (int u = 0; u < g.vertex_count(); ++u) {
    r.max_norm = std::max(r.max_norm, r.per_vertex[u].norm());
    for (int a = 0; a < gauge.dof[u]; ++a)
      r.gauged[gauge.offset[u] + a] = r.per_vertex[u].dot(gauge.basis[u][a]);
  }
  r.gauged_max = gauge.dimension ? r.gauged.lpNorm<Eigen::Infinity>() : 0.0;
  return r;
}

StationarityReport stationarity_residual(const NetEmbedding& net) {
  const auto var = net_varifold(net);
  return stationarity_residual(net, var, make_gauge(net, var));
}

double gauged_mass(const NetEmbedding& net, const Gauge& gauge, const Eigen::VectorXd& s) {
  const auto& g = net.graph;
  std::vector<Vec3> q(g.vertex_count());
  for (int u = 0; u < g.vertex_count(); ++u)
    q[u] = gauged_position(net, gauge, u, s.data() + gauge.offset[u]);
  double m = 0.0;
  for (const auto& e : g.edges()) m += e.w * edge_length(net.surface, q[e.u], q[e.v]);
  return m;
}

Eigen::Matrix2d segment_jacobi_matrix(const Surface& surface, const GeodesicSegment& seg) {
  const double l = seg.length;
  Eigen::Matrix2d m;
  switch (surface.kind()) {
    case SurfaceKind::RoundSphere: {
      const double y = std::sin(l), z = std::cos(l);
      m << z / y, -1.0 / y, -1.0 / y, z / y;
      return m;
    }
    case SurfaceKind::FlatRect:
      m << 1.0 / l, -1.0 / l, -1.0 / l, 1.0 / l;
      return m;
    case SurfaceKind::Ellipsoid: {
      const Eigen::Matrix2d coarse = jacobi_rk4(surface, seg, 128);
      const Eigen::Matrix2d fine = jacobi_rk4(surface, seg, 256);
      const Eigen::Matrix2d rich = (16.0 * fine - coarse) / 15.0;
      if ((rich - fine).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, fine.cwiseAbs().maxCoeff()))
        fail(ErrorKind::AssemblyMismatch, "Jacobi ODE step refinement did not settle");
      return rich;
    }
  }
  return m;
}

Eigen::MatrixXd mass_hessian_fd(const NetEmbedding& net, const Gauge& gauge, double h) {
  const auto& g = net.graph;
  const int d = gauge.dimension;
  std::vector<int> owner(d);
  for (int u = 0; u < g.vertex_count(); ++u)
    for (int a = 0; a < gauge.dof[u]; ++a) owner[gauge.offset[u] + a] = u;

  // Mass of the edges touching the moved vertices, with displacement (si, sj)
  // applied to dofs i and j.
  auto local = [&](int i, double si, int j, double sj) {
    const int ui = owner[i], uj = owner[j];
    auto pos = [&](int u) {
      if (u != ui && u != uj) return net.p[u];
      double s[2] = {0.0, 0.0};
      if (u == ui) s[i - gauge.offset[u]] += si;
      if (u == uj) s[j - gauge.offset[u]] += sj;
      return gauged_position(net, gauge, u, s);
    };
    std::set<int> edges(g.incident(ui).begin(), g.incident(ui).end());
    edges.insert(g.incident(uj).begin(), g.incident(uj).end());
    double m = 0.0;
    for (int e : edges) {
      const auto& ed = g.edge(e);
      m += ed.w * edge_length(net.surface, pos(ed.u), pos(ed.v));
    }
    return m;
  };
  auto second = [&](int i, int j, double k) {
    if (i == j)
      return (local(i, k, i, 0.0) - 2.0 * local(i, 0.0, i, 0.0) + local(i, -k, i, 0.0)) / (k * k);
    const int ui = owner[i], uj = owner[j];
    bool adjacent = ui == uj;
    for (int e : g.incident(ui))
      if (g.other(e, ui) == uj) adjacent = true;
    if (!adjacent) return 0.0;
    return (local(i, k, j, k) - local(i, k, j, -k) - local(i, -k, j, k) + local(i, -k, j, -k)) /
           (4.0 * k * k);
  };
  Eigen::MatrixXd H(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double a = second(i, j, h);
      const double b = second(i, j, 0.5 * h);
      H(i, j) = H(j, i) = (4.0 * b - a) / 3.0;
    }
  return H;
}

JacobiOperator jacobi_operator(const NetEmbedding& net, bool verify) {
  const auto var = net_varifold(net);
  const auto gauge = make_gauge(net, var);
  const auto res = stationarity_residual(net, var, gauge);
  if (res.max_norm >= 1e-8) {
    std::ostringstream os;
    os << "net is not stationary (residual " << res.max_norm << ")";
    fail(ErrorKind::NotStationary, os.str());
  }
  JacobiOperator op;
  op.matrix = analytic_hessian(net, var, gauge);
  if (verify) {
    const Eigen::MatrixXd fd = mass_hessian_fd(net, gauge);
    op.fd_mismatch = gauge.dimension ? (fd - op.matrix).cwiseAbs().maxCoeff() : 0.0;
    if (op.fd_mismatch > 1e-6) {
      std::ostringstream os;
      os << "analytic and finite-difference Jacobi operators differ by " << op.fd_mismatch;
      fail(ErrorKind::AssemblyMismatch, os.str());
    }
  }
  return op;
}

int kernel_dimension(const JacobiOperator& op) {
  if (op.matrix.size() == 0) return 0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double rho = ev.cwiseAbs().maxCoeff();
  if (rho == 0.0) return static_cast<int>(ev.size());
  int k = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i]) < op.kernel_tol * rho) ++k;
  return k;
}

// ---------------------------------------------------------------------------
// Relaxation and stratification

namespace {

struct Evaluated {
  NetVarifold var;
  Gauge gauge;
  StationarityReport res;
};

Evaluated evaluate(const NetEmbedding& net) {
  Evaluated ev;
  ev.var = net_varifold(net);
  ev.gauge = make_gauge(net, ev.var);
  ev.res = stationarity_residual(net, ev.var, ev.gauge);
  return ev;
}

NetEmbedding moved(const NetEmbedding& net, const Gauge& gauge, const Eigen::VectorXd& s) {
  NetEmbedding out = net;
  for (int u = 0; u < net.graph.vertex_count(); ++u)
    out.p[u] = net.surface.project(gauged_position(net, gauge, u, s.data() + gauge.offset[u]));
  return out;
}

// Equidistant points at arclengths j·Λ/k, j = 1..k-1 (open) or 0..k-1 (loop),
// along the polyline of segments.
std::vector<Vec3> equidistant(const Surface& surface, const std::vector<GeodesicSegment>& segs,
                              int count, double step, double first) {
  std::vector<Vec3> out;
  size_t e = 0;
  double acc = 0.0;
  for (int j = 0; j < count; ++j) {
    const double s = first + j * step;
    while (e + 1 < segs.size() && acc + segs[e].length < s) acc += segs[e++].length;
    out.push_back(surface.project(point_on_segment(surface, segs[e], s - acc)));
  }
  return out;
}

std::vector<GeodesicSegment> chain_segments(const NetEmbedding& net,
                                            const GraphStructure::Chain& c) {
  std::vector<GeodesicSegment> segs;
  const int k = static_cast<int>(c.edges.size());
  for (int i = 0; i < k; ++i) {
    const int a = c.vertices[i];
    const int b = c.loop ? c.vertices[(i + 1) % c.vertices.size()] : c.vertices[i + 1];
    segs.push_back(geodesic_between(net.surface, net.p[a], net.p[b], 2));
  }
  return segs;
}

double total_length(const std::vector<GeodesicSegment>& segs) {
  double l = 0.0;
  for (const auto& s : segs) l += s.length;
  return l;
}

}  // namespace

NetEmbedding rebalance(const NetEmbedding& net) {
  require_valid(net);
  NetEmbedding out = net;
  for (const auto& c : net.graph.chains()) {
    const auto segs = chain_segments(net, c);
    const double len = total_length(segs);
    const int k = static_cast<int>(c.edges.size());
    const auto pts = equidistant(net.surface, segs, k - 1, len / k, len / k);
    for (int j = 1; j < k; ++j) out.p[c.vertices[j]] = pts[j - 1];
  }
  return out;
}

RelaxResult relax_to_stationary(const NetEmbedding& start, int max_iter, double tol) {
  require_valid(start);
  RelaxResult r;
  r.net = start;
  auto safe_eval = [](const NetEmbedding& n, Evaluated& ev) {
    try {
      ev = evaluate(n);
      return true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SegmentsOverlap || e.kind() == ErrorKind::ImmersionViolated)
        return false;
      throw;
    }
  };
  Evaluated ev;
  if (!safe_eval(r.net, ev))
    fail(ErrorKind::LeftEmbeddingClass, "initial configuration is not an embedding");
  if (!std::isfinite(ev.res.max_norm)) fail(ErrorKind::InvalidArgument, "non-finite residual");

  for (int round = 0; round < 3; ++round) {
    while (ev.res.max_norm >= tol) {
      if (r.iterations >= max_iter) {
        std::ostringstream os;
        os << "Newton stalled at residual " << ev.res.max_norm;
        fail(ErrorKind::NewtonNoConverge, os.str());
      }
      ++r.iterations;
      const Eigen::MatrixXd J = analytic_hessian(r.net, ev.var, ev.gauge);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
      const Eigen::VectorXd lam = es.eigenvalues();
      const double rho = lam.cwiseAbs().maxCoeff();
      Eigen::VectorXd coeff = es.eigenvectors().transpose() * ev.res.gauged;
      for (Eigen::Index i = 0; i < lam.size(); ++i)
        coeff[i] = std::abs(lam[i]) > 1e-10 * rho ? -coeff[i] / lam[i] : 0.0;
      Eigen::VectorXd step = es.eigenvectors() * coeff;
      const double cap = 0.25 * r.net.surface.inj_lower_bound();
      if (step.lpNorm<Eigen::Infinity>() > cap) step *= cap / step.lpNorm<Eigen::Infinity>();

      const double merit = ev.res.gauged.norm();
      double t = 1.0;
      bool accepted = false;
      while (t > 1e-4) {
        NetEmbedding trial = moved(r.net, ev.gauge, t * step);
        Evaluated tev;
        if (safe_eval(trial, tev) && tev.res.gauged.norm() < (1.0 - 1e-4 * t) * merit) {
          r.net = std::move(trial);
          ev = std::move(tev);
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) {
        NetEmbedding trial = moved(r.net, ev.gauge, 1e-4 * step);
        Evaluated tev;
        if (!safe_eval(trial, tev))
          fail(ErrorKind::LeftEmbeddingClass, "Newton step leaves the embedding class");
        std::ostringstream os;
        os << "line search failed at residual " << ev.res.max_norm;
        fail(ErrorKind::NewtonNoConverge, os.str());
      }
    }
    NetEmbedding bal = rebalance(r.net);
    Evaluated bev;
    if (!safe_eval(bal, bev))
      fail(ErrorKind::LeftEmbeddingClass, "rebalancing leaves the embedding class");
    r.net = std::move(bal);
    ev = std::move(bev);
    if (ev.res.max_norm < tol) break;
  }
  r.residual = ev.res.max_norm;
  if (r.residual >= tol) fail(ErrorKind::NewtonNoConverge, "rebalanced net is not stationary");
  return r;
}

NetEmbedding stratify(const NetEmbedding& net, int Q) {
  const auto var = net_varifold(net);
  if (Q < 1 || Q * net.surface.inj_lower_bound() <= var.total_mass) {
    std::ostringstream os;
    os << "Q = " << Q << " does not satisfy Q·inj > mass " << var.total_mass;
    fail(ErrorKind::QTooSmall, os.str());
  }
  const auto& g = net.graph;
  auto anchor = [&](int u) {
    if (g.is_anchor(u)) return true;
    const Vec3 t1 = tangent_at(g, var, g.incident(u)[0], u);
    const Vec3 t2 = tangent_at(g, var, g.incident(u)[1], u);
    return (t1 + t2).norm() > 1e-6;
  };
  const auto chains = decompose(g, anchor);

  std::vector<int> new_index(g.vertex_count(), -1);
  std::vector<Vec3> pos;
  for (int u = 0; u < g.vertex_count(); ++u)
    if (anchor(u)) {
      new_index[u] = static_cast<int>(pos.size());
      pos.push_back(net.p[u]);
    }
  std::vector<GraphStructure::Edge> edges;
  for (const auto& c : chains) {
    const auto segs = chain_segments(net, c);
    const double len = total_length(segs);
    if (c.loop) {
      const auto pts = equidistant(net.surface, segs, Q + 1, len / (Q + 1), 0.0);
      const int base = static_cast<int>(pos.size());
      for (const auto& x : pts) pos.push_back(x);
      for (int j = 0; j <= Q; ++j) edges.push_back({base + j, base + (j + 1) % (Q + 1), c.weight});
    } else {
      const auto pts = equidistant(net.surface, segs, Q, len / (Q + 1), len / (Q + 1));
      int prev = new_index[c.vertices.front()];
      for (const auto& x : pts) {
        const int id = static_cast<int>(pos.size());
        pos.push_back(x);
        edges.push_back({prev, id, c.weight});
        prev = id;
      }
      edges.push_back({prev, new_index[c.vertices.back()], c.weight});
    }
  }
  NetEmbedding out;
  out.graph = GraphStructure(static_cast<int>(pos.size()), std::move(edges));
  out.surface = net.surface;
  out.p = std::move(pos);
  return out;
}

// ---------------------------------------------------------------------------
// Presets

NetEmbedding preset_cycle(const Surface& surface, int axis, int Q, int weight) {
  if (surface.kind() == SurfaceKind::FlatRect)
    fail(ErrorKind::InvalidArgument, "closed presets need a closed surface");
  if (axis < 0 || axis > 2) fail(ErrorKind::InvalidArgument, "axis must be 0, 1 or 2");
  if (Q < 2) fail(ErrorKind::InvalidArgument, "a cycle needs Q >= 2");
  const int i = axis == 0 ? 1 : 0;
  const int j = axis == 2 ? 1 : 2;
  const int n = Q + 1;
  NetEmbedding net;
  net.surface = surface;
  std::vector<GraphStructure::Edge> edges;
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * k / n;
    Vec3 x = Vec3::Zero();
    x[i] = std::cos(t);
    x[j] = std::sin(t);
    net.p.push_back(surface.project(x));
    edges.push_back({k, (k + 1) % n, weight});
  }
  net.graph = GraphStructure(n, std::move(edges));
  return net;
}

NetEmbedding preset_equator(const Surface& surface, int Q, int weight) {
  return preset_cycle(surface, 2, Q, weight);
}

NetEmbedding preset_theta(const Surface& surface, int Q, double twist) {
  if (surface.kind() == SurfaceKind::FlatRect)
    fail(ErrorKind::InvalidArgument, "closed presets need a closed surface");
  if (Q < 1) fail(ErrorKind::InvalidArgument, "theta net needs Q >= 1");
  NetEmbedding net;
  net.surface = surface;
  net.p.push_back(surface.project(Vec3(0, 0, 1)));
  net.p.push_back(surface.project(Vec3(0, 0, -1)));
  std::vector<GraphStructure::Edge> edges;
  for (int c = 0; c < 3; ++c) {
    const double alpha = 2.0 * std::numbers::pi * c / 3.0 + (c == 0 ? twist : 0.0);
    int prev = 0;
    for (int k = 1; k <= Q; ++k) {
      const double phi = std::numbers::pi * k / (Q + 1);
      const Vec3 x(std::sin(phi) * std::cos(alpha), std::sin(phi) * std::sin(alpha),
                   std::cos(phi));
      const int id = static_cast<int>(net.p.size());
      net.p.push_back(surface.project(x));
      edges.push_back({prev, id, 1});
      prev = id;
    }
    edges.push_back({prev, 1, 1});
  }
  net.graph = GraphStructure(static_cast<int>(net.p.size()), std::move(edges));
  return net;
}

nlohmann::json net_to_json(const NetEmbedding& net) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& x : net.p) pts.push_back({x[0], x[1], x[2]});
  return {{"surface", net.surface.to_json()}, {"graph", net.graph.to_json()},
          {"vertex_positions", pts}};
}

}  // namespace pwidths
