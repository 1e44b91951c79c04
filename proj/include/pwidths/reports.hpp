#pragma once

#include "pwidths/phase_field.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace pwidths {

/// Result of one subcommand: a JSON document, an optional CSV rendering, and
/// the outcome of its built-in assertions.
struct RunResult {
  nlohmann::json json;
  std::string csv;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

RunResult run_widths_table(long long p_max);
RunResult run_quantize(const std::string& mu, long long m);
RunResult run_crofton(int k, int trials, long long samples, std::uint64_t seed, int threads);
RunResult run_minmax1(const std::vector<double>& eps_list, int grid);
RunResult run_glue(const std::vector<double>& directions_deg, double eps, double L, int grid);
/// `field` is a glue dump, or {"analytic":"kink"} / {"analytic":"saddle","a":0.6}.
RunResult run_scatter(const nlohmann::json& field, int thetas, int threads);
RunResult run_nets(const nlohmann::json& surface, const std::string& preset, int Q, bool relax,
                   double perturb, std::uint64_t seed);
RunResult run_ellipsoid_tune(double mu);

nlohmann::json field_to_json(const FieldState2D& state);
FieldState2D field_from_json(const nlohmann::json& j);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace pwidths
