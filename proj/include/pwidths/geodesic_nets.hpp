#pragma once

#include "pwidths/surface.hpp"

#include <Eigen/Dense>

#include <json.hpp>

#include <string>
#include <vector>

namespace pwidths {

/// Finite undirected simple graph with positive integer edge weights.
class GraphStructure {
 public:
  struct Edge {
    int u;
    int v;
    int w = 1;
  };

  GraphStructure() = default;
  GraphStructure(int n_vertices, std::vector<Edge> edges);

  int vertex_count() const noexcept { return n_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }
  /// Edge indices incident to u.
  const std::vector<int>& incident(int u) const { return incident_[u]; }
  int degree(int u) const { return static_cast<int>(incident_[u].size()); }
  int other(int e, int u) const { return edges_[e].u == u ? edges_[e].v : edges_[e].u; }

  /// Degree ≠ 2, or degree 2 with unequal incident weights.
  bool is_anchor(int u) const;

  struct Chain {
    /// For an open chain: anchor, interior vertices..., anchor.
    /// For a loop (no anchor): its vertices in cyclic order, first not repeated.
    std::vector<int> vertices;
    std::vector<int> edges;
    bool loop = false;
    int weight = 1;
  };
  std::vector<Chain> chains() const;

  /// Every open chain has exactly Q interior vertices and every loop Q + 1 vertices.
  bool is_q_subdivided(int Q) const;

  GraphStructure with_weights_scaled(int c) const;
  nlohmann::json to_json() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
};

struct NetEmbedding {
  GraphStructure graph;
  Surface surface = Surface::round_sphere();
  std::vector<Vec3> p;

  /// Degree-2 vertices bisect their two incident segment lengths to `tol`.
  bool balanced(double tol = 1e-9) const;
};

struct NetVarifold {
  std::vector<GeodesicSegment> segments;
  std::vector<int> multiplicity;
  double total_mass = 0.0;
  std::vector<int> singular_vertices;
};

/// Segments for every edge after checking (I₁), (I₂) and (E₂).
NetVarifold net_varifold(const NetEmbedding& net);

/// Sampled (E₂) check; throws SegmentsOverlap naming the offending edges.
void check_disjoint(const NetEmbedding& net, const std::vector<GeodesicSegment>& segments);

/// Gauged coordinates at the current positions: one slice direction per
/// degree-2 vertex (the net normal), a tangent basis at every other vertex.
struct Gauge {
  std::vector<int> offset;
  std::vector<int> dof;
  std::vector<std::array<Vec3, 2>> basis;
  int dimension = 0;
};

Gauge make_gauge(const NetEmbedding& net, const NetVarifold& var);

struct StationarityReport {
  /// -Σ_v ω τ_{u,v} at each vertex (tangent vectors).
  std::vector<Vec3> per_vertex;
  double max_norm = 0.0;
  Eigen::VectorXd gauged;
  double gauged_max = 0.0;
};

StationarityReport stationarity_residual(const NetEmbedding& net);
StationarityReport stationarity_residual(const NetEmbedding& net, const NetVarifold& var,
                                         const Gauge& gauge);

/// Total mass after moving each vertex to exp_{p_u}(Σ_a s_{u,a} basis_{u,a}).
double gauged_mass(const NetEmbedding& net, const Gauge& gauge, const Eigen::VectorXd& s);

struct JacobiOperator {
  Eigen::MatrixXd matrix;
  double kernel_tol = 1e-7;
  /// max |analytic - finite difference| entry (negative when not checked).
  double fd_mismatch = -1.0;
};

/// Normal Jacobi data of one segment: the 2×2 edge matrix in (f(0), f(ℓ)).
Eigen::Matrix2d segment_jacobi_matrix(const Surface& surface, const GeodesicSegment& seg);

/// Analytic assembly; when `verify` is set, also builds the Richardson-extrapolated
/// second-difference Hessian of the mass and throws AssemblyMismatch above 1e-6.
JacobiOperator jacobi_operator(const NetEmbedding& net, bool verify = true);

/// Hessian of gauged_mass by central second differences with one Richardson step.
Eigen::MatrixXd mass_hessian_fd(const NetEmbedding& net, const Gauge& gauge, double h = 5e-3);

int kernel_dimension(const JacobiOperator& op);

struct RelaxResult {
  NetEmbedding net;
  int iterations = 0;
  double residual = 0.0;
};

RelaxResult relax_to_stationary(const NetEmbedding& net, int max_iter = 50, double tol = 1e-10);

/// Equidistances interior chain vertices by arclength (loop base vertices stay).
NetEmbedding rebalance(const NetEmbedding& net);

/// Rebuilds a Q-subdivided balanced embedding carrying the same varifold.
NetEmbedding stratify(const NetEmbedding& net, int Q);

// ---------------------------------------------------------------------------
// Presets

/// Cycle of Q+1 vertices on the section {x_axis = 0}, spaced uniformly in the
/// planar angle and projected radially onto the surface.
NetEmbedding preset_cycle(const Surface& surface, int axis, int Q, int weight = 1);
/// Closed curve {x₃ = 0}.
NetEmbedding preset_equator(const Surface& surface, int Q, int weight = 1);
/// Poles (0, 0, ±a₃) joined by three meridians at longitudes 0°, 120°, 240°
/// plus `twist` radians on the first one.
NetEmbedding preset_theta(const Surface& surface, int Q, double twist = 0.0);

nlohmann::json net_to_json(const NetEmbedding& net);

}  // namespace pwidths
