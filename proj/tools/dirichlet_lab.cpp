// dirichlet-lab: command-line front end for the scenario runner.
//
// Every subcommand except `kernel` and `run` is a one-check scenario. Flags are
// overlaid onto the scenario file (if any) before validation, so flag errors
// report the same field paths as file errors.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirichlet_lab/experiments.hpp"

namespace dl = dirichlet_lab;
using nlohmann::json;

namespace {

struct Flags {
  std::string scenario;
  std::string out;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  std::optional<int> quad_nodes;
  std::optional<int> quad_ppo;
  std::optional<double> quad_abs_tol;
  std::optional<double> quad_rel_tol;
  std::optional<double> quad_switch;

  std::optional<std::string> function;
  std::optional<double> period;
  std::vector<double> support;
  std::vector<double> x;
  std::vector<double> x_interval;
  std::optional<long> x_count;
  std::vector<long> n;
  std::vector<double> l;
  std::optional<std::string> route;
  std::optional<double> threshold;
  bool with_bound = false;
  std::optional<long> samples;
  std::vector<double> c_list;
  std::vector<double> t_grid;
  std::optional<double> h_min;
  std::optional<double> h_max;
  std::optional<int> ppd;
  std::vector<std::string> checks;

  // kernel subcommand
  std::optional<double> t_min;
  std::optional<double> t_max;
  long t_count = 201;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file");
  cmd->add_option("--out", f.out, "Output directory (default: print to stdout)");
  cmd->add_flag("--strict", f.strict, "Consistency flags also decide the exit status");
  cmd->add_option("--seed", f.seed, "Seed for sampled inequality checks");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--quad-nodes", f.quad_nodes, "Gauss-Legendre nodes per panel");
  cmd->add_option("--quad-panels-per-osc", f.quad_ppo, "Minimum panels per half-oscillation");
  cmd->add_option("--quad-abs-tol", f.quad_abs_tol, "Absolute quadrature tolerance");
  cmd->add_option("--quad-rel-tol", f.quad_rel_tol, "Relative quadrature tolerance");
  cmd->add_option("--quad-switch-radius", f.quad_switch, "Kernel series switch radius (fraction of l)");

  cmd->add_option("--function", f.function, "Function in the expression DSL");
  cmd->add_option("--period", f.period, "Declared least positive period");
  cmd->add_option("--support", f.support, "Declared support: LO HI")->expected(2);
  cmd->add_option("--x", f.x, "Evaluation points")->expected(1, 1 << 20);
  cmd->add_option("--x-interval", f.x_interval, "Uniform grid interval: A B")->expected(2);
  cmd->add_option("--x-count", f.x_count, "Number of grid points in --x-interval");
  cmd->add_option("--n", f.n, "Partial-sum orders (paired with --l)")->expected(1, 1 << 20);
  cmd->add_option("--l", f.l, "Half-period lengths; n defaults to ceil(l^2)")->expected(1, 1 << 20);
  cmd->add_option("--route", f.route, "coefficient_sum or kernel_convolution");
  cmd->add_option("--threshold", f.threshold, "Final abs_error threshold for converge");
  cmd->add_flag("--with-bound", f.with_bound, "Add the bound right-hand side to converge rows");
  cmd->add_option("--samples", f.samples, "Samples per draw for the sampled inequalities");
  cmd->add_option("--c", f.c_list, "Window lengths c for class-e")->expected(1, 1 << 20);
  cmd->add_option("--T", f.t_grid, "T grid for class-e")->expected(1, 1 << 20);
  cmd->add_option("--h-min", f.h_min, "Smallest h of the Phi profile");
  cmd->add_option("--h-max", f.h_max, "Largest h of the Phi profile");
  cmd->add_option("--points-per-decade", f.ppd, "Phi profile density");
}

json build_document(const Flags& f, const std::optional<std::string>& only_check) {
  json doc = json::object();
  if (!f.scenario.empty()) {
    std::ifstream in(f.scenario, std::ios::binary);
    if (!in) throw dl::ScenarioError("", "cannot open scenario file '" + f.scenario + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw dl::ScenarioError("", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw dl::ScenarioError("", "top level must be a JSON object");
  } else {
    doc["schema_version"] = 1;
  }

  if (f.function) doc["function"] = *f.function;
  if (f.period) doc["period_hint"] = *f.period;
  if (!f.support.empty()) doc["support_hint"] = f.support;
  if (!f.x.empty()) doc["x_points"] = f.x;
  if (!f.x_interval.empty()) doc["x_points"] = {{"interval", f.x_interval}, {"count", f.x_count.value_or(21)}};
  if (!f.l.empty()) {
    if (!f.n.empty() && f.n.size() != f.l.size()) throw dl::ScenarioError("sweep", "--n and --l must pair up");
    json sweep = json::array();
    for (std::size_t j = 0; j < f.l.size(); ++j) {
      const long n = f.n.empty() ? static_cast<long>(std::ceil(f.l[j] * f.l[j] - 1e-9)) : f.n[j];
      sweep.push_back({{"n", n}, {"l", f.l[j]}});
    }
    doc["sweep"] = std::move(sweep);
  } else if (!f.n.empty()) {
    throw dl::ScenarioError("sweep", "--n needs matching --l values");
  }
  if (f.route) doc["route"] = *f.route;
  if (f.threshold) doc["converge"]["threshold"] = *f.threshold;
  if (f.with_bound) doc["converge"]["with_bound"] = true;
  if (f.samples) doc["samples"] = *f.samples;
  if (!f.c_list.empty()) doc["class_e"]["c_list"] = f.c_list;
  if (!f.t_grid.empty()) doc["class_e"]["T_grid"] = f.t_grid;
  if (f.h_min) doc["lebesgue"]["h_min"] = *f.h_min;
  if (f.h_max) doc["lebesgue"]["h_max"] = *f.h_max;
  if (f.ppd) doc["lebesgue"]["points_per_decade"] = *f.ppd;
  if (f.seed) doc["seed"] = *f.seed;
  if (f.quad_nodes) doc["quadrature"]["nodes_per_panel"] = *f.quad_nodes;
  if (f.quad_ppo) doc["quadrature"]["min_panels_per_oscillation"] = *f.quad_ppo;
  if (f.quad_abs_tol) doc["quadrature"]["abs_tol"] = *f.quad_abs_tol;
  if (f.quad_rel_tol) doc["quadrature"]["rel_tol"] = *f.quad_rel_tol;
  if (f.quad_switch) doc["quadrature"]["singularity_switch_radius"] = *f.quad_switch;
  if (only_check) {
    doc["checks"] = json::array({*only_check});
  } else if (!f.checks.empty()) {
    doc["checks"] = f.checks;
  }
  return doc;
}

void emit(const dl::RunReport& report, const Flags& f, bool include_summary) {
  if (!f.out.empty()) {
    dl::write_report(report, f.out);
    return;
  }
  std::vector<const dl::OutputFile*> shown;
  for (const auto& file : report.files) {
    if (include_summary || file.name != "summary.json") shown.push_back(&file);
  }
  for (const auto* file : shown) {
    if (shown.size() > 1) std::cout << "# " << file->name << '\n';
    std::cout << file->content;
  }
}

int run_check(const Flags& f, const std::optional<std::string>& check) {
  const dl::Scenario s = dl::parse_scenario(build_document(f, check));
  const dl::RunReport report = dl::run_scenario(s, {f.threads});
  emit(report, f, !check.has_value());
  for (const auto& o : report.outcomes) {
    if (!o.hard_pass) std::cerr << "FAILED: " << dl::to_string(o.check) << ' ' << o.details.dump() << '\n';
    if (!o.soft_pass) std::cerr << "inconsistent: " << dl::to_string(o.check) << ' ' << o.details.dump() << '\n';
  }
  return report.exit_code(f.strict);
}

int run_kernel(const Flags& f) {
  if (f.l.size() != 1 || f.n.size() != 1) throw dl::ScenarioError("sweep", "kernel needs exactly one --n and one --l");
  const dl::GridParams g(f.l[0], f.n[0]);
  const double lo = f.t_min.value_or(-g.l());
  const double hi = f.t_max.value_or(g.l());
  if (f.t_count < 2 || !(lo < hi)) throw dl::ScenarioError("t", "need t-min < t-max and t-count >= 2");
  const double radius = f.quad_switch.value_or(dl::QuadratureConfig{}.singularity_switch_radius);
  dl::CsvTable csv{"t", "D"};
  for (long i = 0; i < f.t_count; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(f.t_count - 1);
    csv.row(t, dl::kernel(g, t, radius));
  }
  if (f.out.empty()) {
    std::cout << csv.text();
  } else {
    dl::RunReport report;
    report.files.push_back({"kernel.csv", csv.text()});
    dl::write_report(report, f.out);
  }
  return dl::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Dirichlet integrals and a Lebesgue-type convergence test"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> checks{
      {"coeffs", "Fourier coefficients a_k, b_k on [-l, l]"},
      {"partial-sum", "Partial sums by both routes"},
      {"converge", "Convergence sweep of S_n^l(x) toward f(x)"},
      {"lebesgue-check", "Phi profile, consistency flags and translation modulus (JSON)"},
      {"bound-check", "Bound breakdown and sampled kernel inequalities"},
      {"k-check", "K1..K4 decomposition and identity gap"},
      {"class-e-check", "Tail averages and the periodic bound"},
      {"error-repr", "Error representation and its M + N split"},
  };
  std::vector<CLI::App*> check_cmds;
  for (const auto& [name, help] : checks) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags);
    check_cmds.push_back(cmd);
  }
  CLI::App* kernel_cmd = app.add_subcommand("kernel", "Tabulate D_n^l(t)");
  kernel_cmd->add_option("--n", flags.n, "Order n")->expected(1);
  kernel_cmd->add_option("--l", flags.l, "Half-period l")->expected(1);
  kernel_cmd->add_option("--t-min", flags.t_min, "First t (default -l)");
  kernel_cmd->add_option("--t-max", flags.t_max, "Last t (default l)");
  kernel_cmd->add_option("--t-count", flags.t_count, "Number of t values");
  kernel_cmd->add_option("--quad-switch-radius", flags.quad_switch, "Series switch radius (fraction of l)");
  kernel_cmd->add_option("--out", flags.out, "Output directory (default: stdout)");

  CLI::App* run_cmd = app.add_subcommand("run", "Run a full scenario");
  add_common(run_cmd, flags);
  run_cmd->add_option("--checks", flags.checks, "Override the scenario's check list")->expected(1, 16);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dl::exit_invalid_scenario;
  }

  try {
    if (kernel_cmd->parsed()) return run_kernel(flags);
    if (run_cmd->parsed()) return run_check(flags, std::nullopt);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      if (!check_cmds[i]->parsed()) continue;
      std::string check = checks[i].first;
      if (check == "lebesgue-check") check = "lebesgue";
      if (check == "bound-check") check = "bound";
      if (check == "k-check") check = "k";
      if (check == "class-e-check") check = "class-e";
      return run_check(flags, check);
    }
  } catch (const dl::ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return dl::exit_invalid_scenario;
  } catch (const dl::QuadratureError& e) {
    std::cerr << "quadrature failure: " << e.what() << '\n';
    return dl::exit_quadrature_failure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return dl::exit_invalid_scenario;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dl::exit_check_failed;
  }
  return dl::exit_ok;
}
