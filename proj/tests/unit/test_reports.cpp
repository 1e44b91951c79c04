#include "common.hpp"

#include "pwidths/reports.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace pwidths;
using nlohmann::json;
using std::numbers::pi;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_SUITE("reports") {

TEST_CASE("widths-table report") {
  const auto r = run_widths_table(30);
  CHECK(r.passed());
  REQUIRE(r.json["entries"].size() == 30);
  const auto& e24 = r.json["entries"][23];
  CHECK(e24["p"] == 24);
  CHECK(e24["omega_exact"] == "2pi*4");
  CHECK(e24["omega"].get<double>() == 8 * pi);
  CHECK(first_line(r.csv).find("p,") == 0);
  CHECK_ERROR(run_widths_table(0), InvalidArgument);
}

TEST_CASE("quantize report") {
  const auto r = run_quantize("0.04", 10);
  CHECK(r.passed());
  CHECK(r.json["count"] == 120);
  CHECK(r.json["expected"] == 120);
  CHECK(r.json.contains("values"));
  CHECK(r.json.contains("pinch"));
  CHECK_ERROR(run_quantize("0.3", 2), MuTooLarge);
}

TEST_CASE("crofton report") {
  const auto r = run_crofton(2, 3, 2000, 5, 1);
  CHECK(r.passed());
  for (const char* key : {"k", "trials", "per_trial", "max", "bound"}) CHECK(r.json.contains(key));
  CHECK(r.json["k"] == 2);
  REQUIRE(r.json["per_trial"].size() == 3);
  for (const auto& t : r.json["per_trial"]) {
    CHECK(t.contains("length_mean"));
    CHECK(t.contains("std_error"));
  }
  CHECK(r.json["bound"].get<double>() == 4 * pi);
  const auto again = run_crofton(2, 3, 2000, 5, 2);
  CHECK(again.json["per_trial"] == r.json["per_trial"]);
}

TEST_CASE("minmax1 report") {
  const auto r = run_minmax1({0.1, 0.05}, 1024);
  CHECK(r.passed());
  CHECK(first_line(r.csv) == "eps,energy,mass,index,residual");
  std::istringstream rows(r.csv);
  std::string line;
  int n = 0;
  while (std::getline(rows, line))
    if (!line.empty()) ++n;
  CHECK(n == 3);
  REQUIRE(r.json["rows"].size() == 2);
  CHECK(r.json["rows"][0]["index"] == 1);
}

TEST_CASE("glue report and field round trip") {
  const auto r = run_glue({90, 270}, 1.0, 25.0, 64);
  CHECK(r.passed());
  const auto& j = r.json;
  for (const char* key : {"grid", "eps", "values", "directions"}) CHECK(j.contains(key));
  CHECK(j["grid"]["n"] == 64);
  CHECK(j["grid"]["layout"].get<std::string>().rfind("row-major", 0) == 0);
  CHECK(j["values"].size() == 64 * 64);
  const auto st = field_from_json(j);
  CHECK(st.n == 64);
  CHECK(st.eps == 1.0);
  CHECK(field_to_json(st)["values"] == j["values"]);
  CHECK_ERROR(field_from_json(json{{"grid", {{"n", 4}}}}), InvalidArgument);
}

TEST_CASE("scatter report") {
  const auto r = run_scatter(json{{"analytic", "kink"}}, 32, 1);
  CHECK(r.passed());
  const auto& j = r.json;
  REQUIRE(j["samples"].size() == 32);
  for (const char* key : {"theta", "re_a", "im_a"}) CHECK(j["samples"][0].contains(key));
  REQUIRE(j["bound_states"].size() == 1);
  CHECK(j["bound_states"][0].contains("theta"));
  CHECK(j["bound_states"][0].contains("lambda"));
  CHECK(std::abs(j["bound_states"][0]["theta"].get<double>() - pi / 2) < 1e-4);
  CHECK(j["directions"].size() == 2);
  CHECK(j["directions"][0].size() == 2);
  CHECK(j["antipodal"].is_boolean());
  CHECK(j["antipodal"] == true);

  const auto s = run_scatter(json{{"analytic", "saddle"}, {"a", 0.6}}, 32, 1);
  CHECK(s.passed());
  CHECK(s.json["bound_states"].size() == 2);
  CHECK_ERROR(run_scatter(json{{"analytic", "bogus"}}, 32, 1), InvalidArgument);
}

TEST_CASE("nets report") {
  const json sphere = {{"kind", "RoundSphere"}, {"params", json::array()}};
  const auto r = run_nets(sphere, "theta", 4, false, 0.0, 0);
  CHECK(r.passed());
  for (const char* key : {"graph", "vertex_positions", "mass", "residual", "kernel_dim"}) CHECK(r.json.contains(key));
  CHECK(std::abs(r.json["mass"].get<double>() - 3 * pi) < 1e-12);
  CHECK(r.json["kernel_dim"] == 3);
  CHECK(r.json["vertex_positions"].size() == 14);

  const auto p = run_nets(sphere, "equator", 8, true, 1e-2, 7);
  CHECK(p.passed());
  CHECK(p.json["residual"].get<double>() < 1e-10);
  CHECK(p.json["kernel_dim"] == 2);

  const auto twisted = run_nets(sphere, "equator", 8, false, 1e-2, 7);
  CHECK(twisted.json["kernel_dim"].is_null());

  const json ell = {{"kind", "Ellipsoid"}, {"params", {1.0238110260, 1.0079891608, 0.9919787971}}};
  const auto g = run_nets(ell, "gamma2", 8, true, 0.0, 0);
  CHECK(g.passed());
  CHECK(g.json["kernel_dim"] == 0);
  CHECK_ERROR(run_nets(sphere, "tetrahedron", 8, false, 0.0, 0), InvalidArgument);
}

TEST_CASE("ellipsoid-tune report") {
  const auto r = run_ellipsoid_tune(0.05);
  CHECK(r.passed());
  REQUIRE(r.json["a"].size() == 3);
  CHECK(std::abs(r.json["a"][0].get<double>() - 1.0238110260) < 1e-9);
  REQUIRE(r.json["lengths"].size() == 3);
  CHECK(std::abs(r.json["lengths"][2].get<double>() - (2 * pi + 0.1)) < 1e-8);
}

TEST_CASE("double lists") {
  CHECK(parse_double_list("0.1, 0.05,0.02") == std::vector<double>{0.1, 0.05, 0.02});
  CHECK(parse_double_list("90,270") == std::vector<double>{90, 270});
  CHECK_ERROR(parse_double_list("0.1,x"), InvalidArgument);
  CHECK_ERROR(parse_double_list(""), InvalidArgument);
}

}  // TEST_SUITE
