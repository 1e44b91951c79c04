#include "pwidths/reports.hpp"

#include "pwidths/crofton.hpp"
#include "pwidths/error.hpp"
#include "pwidths/geodesic_nets.hpp"
#include "pwidths/lattice.hpp"
#include "pwidths/rng.hpp"
#include "pwidths/scattering.hpp"
#include "pwidths/surface.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace pwidths {

namespace {

using nlohmann::json;

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

json vec2(const Eigen::Vector2d& v) { return {v[0], v[1]}; }

json pinch_json(const PinchInterval& iv) {
  return {{"p", iv.p},
          {"m", iv.m},
          {"mu", iv.mu.str()},
          {"lower", iv.lower.to_double()},
          {"upper", iv.upper.to_double()},
          {"lower_exact", iv.lower.to_string()},
          {"upper_exact", iv.upper.to_string()},
          {"pth_value", iv.pth.value(iv.mu)},
          {"pth_exact", iv.pth.exact(iv.mu).to_string()}};
}

std::string omega_symbolic(long long m) { return "2pi*" + std::to_string(m); }

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) fail(ErrorKind::InvalidArgument, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(ErrorKind::InvalidArgument, "empty list");
  return out;
}

RunResult run_widths_table(long long p_max) {
  const WidthTable t = width_table(p_max, true);
  RunResult r;
  json entries = json::array();
  auto csv = csv_stream();
  csv << "p,floor_sqrt,omega,omega_exact,crofton_upper\n";
  for (size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    entries.push_back({{"p", e.p},
                       {"floor_sqrt", e.floor_sqrt},
                       {"omega", e.value},
                       {"omega_exact", omega_symbolic(e.floor_sqrt)},
                       {"crofton_upper", e.crofton_upper}});
    csv << e.p << ',' << e.floor_sqrt << ',' << e.value << ',' << omega_symbolic(e.floor_sqrt)
        << ',' << e.crofton_upper << '\n';
    if (i > 0 && e.value < t.entries[i - 1].value)
      r.failures.push_back("table decreases at p = " + std::to_string(e.p));
    if (i > 0 && isqrt(e.p) == isqrt(e.p - 1) && e.value != t.entries[i - 1].value)
      r.failures.push_back("table not constant on the block containing p = " +
                           std::to_string(e.p));
  }
  json pinch = json::array();
  for (const auto& iv : t.pinch) pinch.push_back(pinch_json(iv));
  r.json = {{"p_max", p_max}, {"entries", entries}, {"pinch", pinch}};
  r.csv = csv.str();
  return r;
}

RunResult run_quantize(const std::string& mu_text, long long m) {
  const Rational mu = parse_rational(mu_text);
  RunResult r;
  const CountReport c = count_check(m, mu);
  const auto values = quantization_values(mu, SymbolicReal{Rational(m), Rational(1)});
  json vals = json::array();
  auto csv = csv_stream();
  csv << "index,j,k,value,exact\n";
  for (size_t i = 0; i < values.size(); ++i) {
    const auto& v = values[i];
    const std::string ex = v.exact(mu).to_string();
    vals.push_back({{"j", v.j}, {"k", v.k}, {"value", v.value(mu)}, {"exact", ex}});
    csv << i + 1 << ',' << v.j << ',' << v.k << ',' << v.value(mu) << ',' << ex << '\n';
  }
  json pinch = json::array();
  for (long long p = 1; p <= c.expected; ++p) {
    const auto iv = pinch_bounds(p, mu);
    pinch.push_back(pinch_json(iv));
  }
  r.json = {{"mu", mu.str()},
            {"mu_value", mu.convert_to<double>()},
            {"m", m},
            {"count", c.count},
            {"expected", c.expected},
            {"strata_sizes", c.strata_sizes},
            {"values", vals},
            {"pinch", pinch}};
  r.csv = csv.str();
  return r;
}

RunResult run_crofton(int k, int trials, long long samples, std::uint64_t seed, int threads) {
  const MassBoundReport m = verify_mass_bound(k, trials, samples, seed, threads);
  RunResult r;
  json per = json::array();
  auto csv = csv_stream();
  csv << "trial,length_mean,std_error,rejected,max_count\n";
  for (size_t t = 0; t < m.per_trial.size(); ++t) {
    const auto& e = m.per_trial[t];
    per.push_back({{"length_mean", e.length_mean},
                   {"std_error", e.std_error},
                   {"rejected", e.rejected},
                   {"max_count", e.max_count}});
    csv << t << ',' << e.length_mean << ',' << e.std_error << ',' << e.rejected << ','
        << e.max_count << '\n';
  }
  r.json = {{"k", k},
            {"trials", trials},
            {"samples", samples},
            {"per_trial", per},
            {"max", m.max},
            {"max_std_error", m.max_std_error},
            {"bound", m.bound},
            {"margin", m.margin},
            {"passed", m.passed}};
  r.csv = csv.str();
  if (!m.passed) r.failures.push_back("a length estimate exceeds 2pi*k + 3*stderr");
  return r;
}

RunResult run_minmax1(const std::vector<double>& eps_list, int grid) {
  RunResult r;
  struct Row {
    double eps, energy, mass, residual;
    int index, iterations;
  };
  std::vector<Row> rows;
  for (double eps : eps_list) {
    const auto sol = solve_axisymmetric(eps, grid);
    rows.push_back({eps, energy(sol.state), varifold_mass(sol.state), sol.residual, sol.index,
                    sol.iterations});
  }
  auto csv = csv_stream();
  csv << "eps,energy,mass,index,residual\n";
  json out = json::array();
  for (const auto& row : rows) {
    csv << row.eps << ',' << row.energy << ',' << row.mass << ',' << row.index << ','
        << row.residual << '\n';
    out.push_back({{"eps", row.eps},
                   {"energy", row.energy},
                   {"mass", row.mass},
                   {"index", row.index},
                   {"residual", row.residual},
                   {"iterations", row.iterations}});
    if (row.index != 1)
      r.failures.push_back("Morse index " + std::to_string(row.index) + " at eps = " +
                           std::to_string(row.eps));
  }
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const Row& a, const Row& b) { return a.eps > b.eps; });
  for (size_t i = 1; i < sorted.size(); ++i)
    if (!(sorted[i].mass > sorted[i - 1].mass))
      r.failures.push_back("mass is not increasing as eps decreases");
  const double last = sorted.back().mass;
  r.json = {{"grid", grid},
            {"rows", out},
            {"two_pi", 2.0 * std::numbers::pi},
            {"final_relative_gap", std::abs(last - 2.0 * std::numbers::pi) / (2.0 * std::numbers::pi)}};
  r.csv = csv.str();
  return r;
}

json field_to_json(const FieldState2D& s) {
  json dirs = json::array();
  for (const auto& d : s.directions) dirs.push_back(vec2(d));
  std::vector<double> values(s.values.data(), s.values.data() + s.values.size());
  return {{"grid",
           {{"L", s.L},
            {"n", s.n},
            {"h", s.h},
            {"x0", -s.L},
            {"layout", "row-major: values[j*n + i] at (x_i, y_j), x_i = -L + i*h"}}},
          {"eps", s.eps},
          {"potential", s.kind == PotentialKind::Normalized ? "normalized" : "shifted"},
          {"directions", dirs},
          {"values", values}};
}

FieldState2D field_from_json(const json& j) {
  try {
    FieldState2D s;
    const auto& g = j.at("grid");
    s.L = g.at("L").get<double>();
    s.n = g.at("n").get<int>();
    s.h = 2.0 * s.L / (s.n - 1);
    s.eps = j.at("eps").get<double>();
    s.kind = j.value("potential", std::string("normalized")) == "shifted" ? PotentialKind::Shifted
                                                                         : PotentialKind::Normalized;
    for (const auto& d : j.at("directions"))
      s.directions.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
    const auto vals = j.at("values").get<std::vector<double>>();
    if (s.n < 2 || vals.size() != static_cast<size_t>(s.n) * s.n)
      fail(ErrorKind::InvalidArgument, "field values do not match the grid size");
    s.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    return s;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("malformed field JSON: ") + e.what());
  }
}

RunResult run_glue(const std::vector<double>& directions_deg, double eps, double L, int grid) {
  const auto dirs = directions_from_degrees(directions_deg);
  const auto sol = relax_glued_kinks(dirs, L, eps, grid);
  RunResult r;
  r.json = field_to_json(sol.state);
  const int crossings = boundary_zero_crossings(sol.state);
  r.json["iterations"] = sol.iterations;
  r.json["residual"] = sol.residual;
  r.json["interior_residual"] = sol.interior_residual;
  r.json["boundary_crossings"] = crossings;
  r.json["energy"] = energy(sol.state);
  r.json["localization_defect"] = localization_defect(sol.state, 5.0 * eps);
  if (crossings != static_cast<int>(dirs.size()))
    r.failures.push_back("boundary crossings " + std::to_string(crossings) + " != " +
                         std::to_string(dirs.size()) + " ends");
  auto csv = csv_stream();
  csv << "i,j,x,y,u\n";
  for (int j = 0; j < sol.state.n; ++j)
    for (int i = 0; i < sol.state.n; ++i)
      csv << i << ',' << j << ',' << sol.state.x(i) << ',' << sol.state.x(j) << ','
          << sol.state.at(i, j) << '\n';
  r.csv = csv.str();
  return r;
}

RunResult run_scatter(const json& field_json, int thetas, int threads) {
  ShiftedField field = ShiftedField::constant(0.0);
  if (field_json.contains("analytic")) {
    const std::string kind = field_json.at("analytic").get<std::string>();
    const double L = field_json.value("L", 25.0);
    if (kind == "kink")
      field = ShiftedField::kink(field_json.value("beta", 0.0), L);
    else if (kind == "saddle")
      field = ShiftedField::saddle(field_json.value("a", 0.6), L);
    else
      fail(ErrorKind::InvalidArgument, "unknown analytic field '" + kind + "'");
  } else {
    field = ShiftedField::from_state(field_from_json(field_json));
  }
  const ScatteringData data = bound_states(field, thetas, threads);
  RunResult r;
  json samples = json::array();
  auto csv = csv_stream();
  csv << "theta,re_a,im_a\n";
  for (const auto& [t, a] : data.circle_samples) {
    samples.push_back({{"theta", t}, {"re_a", a.real()}, {"im_a", a.imag()}});
    csv << t << ',' << a.real() << ',' << a.imag() << '\n';
  }
  json bs = json::array();
  for (const auto& b : data.bound_states)
    bs.push_back({{"theta", b.theta}, {"lambda", {b.lambda.real(), b.lambda.imag()}},
                  {"abs_a", b.abs_a}});
  json dirs = json::array();
  for (const auto& d : data.directions) dirs.push_back(vec2(d));

  const auto ends = detect_ends_geometric(field);
  json ends_json = json::array();
  for (const auto& d : ends) ends_json.push_back(vec2(d));
  json antipodal = {{"tolerance_deg", 5.0}};
  try {
    const auto pr = verify_antipodal_pairing(ends, 5.0);
    antipodal["paired"] = pr.paired;
    antipodal["max_deviation_deg"] = pr.max_deviation_deg;
    antipodal["pairs"] = pr.pairs;
    if (!pr.paired) r.failures.push_back("geometric ends are not antipodally paired at 5 deg");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OddCount) throw;
    antipodal["paired"] = false;
    antipodal["error"] = e.what();
    r.failures.push_back(e.what());
  }
  const bool match = directions_match(data.directions, ends, 5.0);
  antipodal["bound_state_directions_match_ends"] = match;
  if (!match) r.failures.push_back("bound-state directions do not match the geometric ends");
  if (2 * data.bound_states.size() != ends.size())
    r.failures.push_back("bound-state count does not equal half the number of ends");
  r.json = {{"samples", samples},
            {"bound_states", bs},
            {"directions", dirs},
            {"geometric_ends", ends_json},
            {"antipodal", antipodal.value("paired", false)},
            {"antipodal_report", antipodal}};
  r.csv = csv.str();
  return r;
}

RunResult run_nets(const json& surface_json, const std::string& preset, int Q, bool relax,
                   double perturb, std::uint64_t seed) {
  const Surface surface = Surface::from_json(surface_json);
  NetEmbedding net;
  if (preset == "equator")
    net = preset_equator(surface, Q);
  else if (preset == "theta")
    net = preset_theta(surface, Q);
  else if (preset == "gamma1" || preset == "gamma2" || preset == "gamma3")
    net = preset_cycle(surface, preset.back() - '1', Q);
  else
    fail(ErrorKind::InvalidArgument, "unknown preset '" + preset + "'");

  if (perturb > 0.0) {
    const std::uint64_t key = rng::derive_key(seed, 0x6e657473);
    for (int u = 0; u < net.graph.vertex_count(); ++u) {
      const auto [e1, e2] = surface.tangent_basis(net.p[u]);
      const Vec3 v = perturb * (rng::gaussian(key, 2 * u) * e1 + rng::gaussian(key, 2 * u + 1) * e2);
      net.p[u] = surface.project(exp_map(surface, net.p[u], v));
    }
  }
  RunResult r;
  int iterations = 0;
  if (relax) {
    const auto rr = relax_to_stationary(net);
    net = rr.net;
    iterations = rr.iterations;
  }
  const auto var = net_varifold(net);
  const auto res = stationarity_residual(net);
  r.json = net_to_json(net);
  r.json["mass"] = var.total_mass;
  r.json["residual"] = res.max_norm;
  r.json["iterations"] = iterations;
  r.json["singular_vertices"] = var.singular_vertices;
  r.json["balanced"] = net.balanced();
  if (res.max_norm < 1e-8) {
    const auto op = jacobi_operator(net, true);
    r.json["kernel_dim"] = kernel_dimension(op);
    r.json["fd_mismatch"] = op.fd_mismatch;
    r.json["symmetry_defect"] = (op.matrix - op.matrix.transpose()).cwiseAbs().maxCoeff();
  } else {
    r.json["kernel_dim"] = nullptr;
  }
  if (relax && res.max_norm >= 1e-10)
    r.failures.push_back("relaxed net residual is not below 1e-10");
  auto csv = csv_stream();
  csv << "vertex,x,y,z,degree\n";
  for (int u = 0; u < net.graph.vertex_count(); ++u)
    csv << u << ',' << net.p[u][0] << ',' << net.p[u][1] << ',' << net.p[u][2] << ','
        << net.graph.degree(u) << '\n';
  r.csv = csv.str();
  return r;
}

RunResult run_ellipsoid_tune(double mu) {
  const TunedEllipsoid t = tune_ellipsoid(mu);
  const auto l = principal_geodesic_lengths(t.a[0], t.a[1], t.a[2]).ell;
  const Eigen::Matrix3d J = principal_lengths_jacobian({1.0, 1.0, 1.0});
  RunResult r;
  json jac = json::array();
  for (int i = 0; i < 3; ++i) jac.push_back({J(i, 0), J(i, 1), J(i, 2)});
  const double tp = 2.0 * std::numbers::pi;
  const std::array<double, 3> target{tp, tp + mu, tp + 2.0 * mu};
  double back = 0.0;
  auto csv = csv_stream();
  csv << "i,a,length,target\n";
  for (int i = 0; i < 3; ++i) {
    back = std::max(back, std::abs(l[i] - target[i]));
    csv << i + 1 << ',' << t.a[i] << ',' << l[i] << ',' << target[i] << '\n';
  }
  r.json = {{"mu", mu},
            {"a", t.a},
            {"lengths", l},
            {"targets", target},
            {"residual", back},
            {"iterations", t.iterations},
            {"jacobian_at_round", jac}};
  if (back >= 1e-8) r.failures.push_back("tuned lengths miss their targets by >= 1e-8");
  r.csv = csv.str();
  return r;
}

}  // namespace pwidths
