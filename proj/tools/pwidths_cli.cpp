#include "pwidths/error.hpp"
#include "pwidths/reports.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

struct Globals {
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  int threads = 1;
};

void add_globals(CLI::App* app, Globals& g) {
  app->add_option("--out", g.out, "output path (stdout when omitted)");
  app->add_option("--format", g.format, "json or csv (default: from --out extension)")
      ->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--seed", g.seed, "random seed");
  app->add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
}

std::string resolve_format(const Globals& g) {
  if (!g.format.empty()) return g.format;
  const auto dot = g.out.rfind('.');
  if (dot != std::string::npos && g.out.substr(dot) == ".csv") return "csv";
  return "json";
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) pwidths::fail(pwidths::ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  f << text;
}

json read_json_arg(const std::string& text) {
  try {
    if (!text.empty() && (text.front() == '{' || text.front() == '[')) return json::parse(text);
    std::ifstream f(text);
    if (!f) pwidths::fail(pwidths::ErrorKind::InvalidArgument, "cannot read '" + text + "'");
    return json::parse(f);
  } catch (const json::exception& e) {
    pwidths::fail(pwidths::ErrorKind::InvalidArgument, std::string("bad JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Widths of the round sphere: lattice, sweepouts, phase transitions, nets"};
  app.require_subcommand(1);
  Globals g;
  add_globals(&app, g);

  json config;
  std::function<pwidths::RunResult()> job;

  long long pmax = 100;
  auto* widths = app.add_subcommand("widths-table", "exact width table 2pi*floor(sqrt p)");
  widths->add_option("--pmax", pmax)->required()->check(CLI::PositiveNumber);
  widths->callback([&] {
    config = {{"pmax", pmax}};
    job = [&] { return pwidths::run_widths_table(pmax); };
  });

  std::string mu_text;
  long long m = 1;
  auto* quant = app.add_subcommand("quantize", "lattice values, counting identity, pinch bounds");
  quant->add_option("--mu", mu_text)->required();
  quant->add_option("--m", m)->required()->check(CLI::PositiveNumber);
  quant->callback([&] {
    config = {{"mu", mu_text}, {"m", m}};
    job = [&] { return pwidths::run_quantize(mu_text, m); };
  });

  int k = 1, trials = 10;
  long long samples = 100000;
  auto* crof = app.add_subcommand("crofton", "Crofton length estimates of random zero sets");
  crof->add_option("--k", k)->required();
  crof->add_option("--trials", trials)->default_val(10);
  crof->add_option("--samples", samples)->default_val(100000);
  crof->callback([&] {
    config = {{"k", k}, {"trials", trials}, {"samples", samples}};
    job = [&] { return pwidths::run_crofton(k, trials, samples, g.seed, g.threads); };
  });

  std::string eps_list = "0.1,0.05,0.02";
  int grid1 = 4096;
  auto* mm = app.add_subcommand("minmax1", "axisymmetric Allen-Cahn critical points on S^2");
  mm->add_option("--eps-list", eps_list)->default_val("0.1,0.05,0.02");
  mm->add_option("--grid", grid1)->default_val(4096);
  mm->callback([&] {
    config = {{"eps_list", eps_list}, {"grid", grid1}};
    job = [&] { return pwidths::run_minmax1(pwidths::parse_double_list(eps_list), grid1); };
  });

  std::string dirs = "90,270";
  double eps = 1.0, L = 25.0;
  int grid2 = 256;
  auto* glue = app.add_subcommand("glue", "relax glued kinks along rays");
  glue->add_option("--dirs", dirs, "end directions in degrees")->default_val("90,270");
  glue->add_option("--eps", eps)->default_val(1.0);
  glue->add_option("--L", L)->default_val(25.0);
  glue->add_option("--grid", grid2)->default_val(256);
  glue->callback([&] {
    config = {{"dirs", dirs}, {"eps", eps}, {"L", L}, {"grid", grid2}};
    job = [&] { return pwidths::run_glue(pwidths::parse_double_list(dirs), eps, L, grid2); };
  });

  std::string field_arg;
  int thetas = 512;
  auto* scat = app.add_subcommand("scatter", "scattering data of a sine-Gordon field");
  scat->add_option("--field", field_arg, "glue output, or {\"analytic\":\"kink\"}")->required();
  scat->add_option("--thetas", thetas)->default_val(512);
  scat->callback([&] {
    config = {{"field", field_arg}, {"thetas", thetas}};
    job = [&] { return pwidths::run_scatter(read_json_arg(field_arg), thetas, g.threads); };
  });

  std::string surface_arg = R"({"kind":"RoundSphere","params":[]})";
  std::string preset = "equator";
  int Q = 8;
  bool relax = false;
  double perturb = 0.0;
  auto* nets = app.add_subcommand("nets", "geodesic nets: stationarity, relaxation, Jacobi kernel");
  nets->add_option("--surface", surface_arg)->default_val(surface_arg);
  nets->add_option("--preset", preset)
      ->default_val("equator")
      ->check(CLI::IsMember({"equator", "theta", "gamma1", "gamma2", "gamma3"}));
  nets->add_option("--Q", Q)->default_val(8);
  nets->add_flag("--relax", relax);
  nets->add_option("--perturb", perturb, "random tangent displacement before relaxing")
      ->default_val(0.0);
  nets->callback([&] {
    config = {{"surface", surface_arg},
              {"preset", preset},
              {"Q", Q},
              {"relax", relax},
              {"perturb", perturb}};
    job = [&] {
      return pwidths::run_nets(read_json_arg(surface_arg), preset, Q, relax, perturb, g.seed);
    };
  });

  double tune_mu = 0.05;
  auto* tune = app.add_subcommand("ellipsoid-tune", "ellipsoid with principal lengths 2pi+(i-1)mu");
  tune->add_option("--mu", tune_mu)->required();
  tune->callback([&] {
    config = {{"mu", tune_mu}};
    job = [&] { return pwidths::run_ellipsoid_tune(tune_mu); };
  });

  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto t0 = std::chrono::steady_clock::now();
    pwidths::RunResult result = job();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const json meta = {{"tool", "pwidths"},
                       {"version", PWIDTHS_VERSION},
                       {"command", command},
                       {"config", config},
                       {"seed", g.seed},
                       {"threads", g.threads},
                       {"elapsed_s", elapsed},
                       {"passed", result.passed()},
                       {"failures", result.failures}};
    const std::string fmt = resolve_format(g);
    if (fmt == "csv") {
      write_text(g.out, result.csv);
      if (!g.out.empty())
        write_text(g.out + ".meta.json", meta.dump(2) + "\n");
      else
        std::cerr << meta.dump() << "\n";
    } else {
      result.json["meta"] = meta;
      write_text(g.out, result.json.dump(2) + "\n");
    }
    for (const auto& f : result.failures) std::cerr << "assertion failed: " << f << "\n";
    return result.passed() ? 0 : 2;
  } catch (const pwidths::Error& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return e.kind() == pwidths::ErrorKind::AssertionFailed ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 1;
  }
}
