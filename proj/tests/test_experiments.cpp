// Scenario parsing, the runner's output contract and its determinism.

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dirichlet_lab/experiments.hpp"

using namespace dirichlet_lab;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string error_path(const json& doc) {
  try {
    (void)parse_scenario(doc);
  } catch (const ScenarioError& e) {
    return e.path();
  }
  return "<accepted>";
}

json converge_doc(const std::string& fn) {
  return {{"schema_version", 1},
          {"function", fn},
          {"x_points", {0.0, 0.7}},
          {"sweep", {{{"n", 25}, {"l", 5.0}}, {{"n", 100}, {"l", 10.0}}, {{"n", 400}, {"l", 20.0}}}},
          {"checks", {"converge"}}};
}

}  // namespace

TEST_CASE("number formatting is fixed", "[report]") {
  REQUIRE(format_value(0.1) == "0.1");
  REQUIRE(format_value(1.0 / 3.0) == "0.333333333333");
  REQUIRE(format_value(-0.0) == "0");
  REQUIRE(format_value(1e-20) == "1e-20");
  REQUIRE(format_value(123456789012345.0) == "1.23456789012e+14");
  REQUIRE(format_value(std::nan("")) == "nan");
  REQUIRE(format_value(true) == "true");
  CsvTable t{"a", "b"};
  t.row(1L, 2.5);
  REQUIRE(t.text() == "a,b\n1,2.5\n");
  REQUIRE(t.rows() == 1);
}

TEST_CASE("scenario validation reports field paths", "[scenario]") {
  const json good = converge_doc("3");
  REQUIRE(error_path(good) == "<accepted>");

  json doc = good;
  doc["checks"] = json::array();
  REQUIRE(error_path(doc) == "checks");

  doc = good;
  doc["checks"] = {"converge", "nope"};
  REQUIRE(error_path(doc) == "checks[1]");

  doc = good;
  doc.erase("schema_version");
  REQUIRE(error_path(doc) == "schema_version");

  doc = good;
  doc["schema_version"] = 2;
  REQUIRE(error_path(doc) == "schema_version");

  doc = good;
  doc["function"] = "sin(";
  REQUIRE(error_path(doc) == "function");

  doc = good;
  doc["sweep"][1]["n"] = 0;
  REQUIRE(error_path(doc) == "sweep[1].n");

  doc = good;
  doc["sweep"][2]["l"] = 7.0;
  REQUIRE(error_path(doc) == "sweep[2].l");

  doc = good;
  doc["sweep"][2]["n"] = 50;  // eta rises from 0.1 to 0.4
  REQUIRE(error_path(doc) == "sweep[2].n");

  doc = good;
  doc["sweep"] = {{"l0", 5}, {"steps", 3}, {"exponent", 1.0}};
  REQUIRE(error_path(doc) == "sweep.exponent");

  doc = good;
  doc["quadrature"] = {{"nodes_per_panel", 1}};
  REQUIRE(error_path(doc) == "quadrature.nodes_per_panel");

  doc = good;
  doc["quadrature"] = {{"bogus", 1}};
  REQUIRE(error_path(doc) == "quadrature.bogus");

  doc = good;
  doc["period_hint"] = 3.0;
  REQUIRE(error_path(doc) == "<accepted>");  // a constant has every period
  doc["function"] = "sin(t)";
  REQUIRE(error_path(doc) == "function");

  doc = good;
  doc.erase("x_points");
  REQUIRE(error_path(doc) == "x_points");

  doc = good;
  doc["class_e"] = {{"T_grid", {10, 5}}};
  REQUIRE(error_path(doc) == "class_e.T_grid[1]");

  REQUIRE_THROWS_AS(parse_scenario_text("{"), ScenarioError);
}

TEST_CASE("sweep rules", "[scenario]") {
  const auto sweep = geometric_sweep(10.0, 2.0, 4, 2.0);
  REQUIRE(sweep.size() == 4);
  REQUIRE(sweep[0] == GridParams(10.0, 100));
  REQUIRE(sweep[3] == GridParams(80.0, 6400));
  REQUIRE_NOTHROW(validate_sweep(sweep));
  json doc = converge_doc("3");
  doc["sweep"] = {{"l0", 10}, {"steps", 4}};
  const Scenario s = parse_scenario(doc);
  REQUIRE(s.sweep == sweep);
}

TEST_CASE("x grid from an interval", "[scenario]") {
  json doc = converge_doc("3");
  doc["x_points"] = {{"interval", {-1, 1}}, {"count", 21}};
  const Scenario s = parse_scenario(doc);
  REQUIRE(s.uniform);
  REQUIRE(s.x_points.size() == 21);
  REQUIRE(s.x_points.front() == -1.0);
  REQUIRE(s.x_points.back() == 1.0);
  REQUIRE(s.x_points[10] == 0.0);
}

TEST_CASE("convergence criterion", "[experiments]") {
  const std::vector<double> down{0.4, 0.2, 0.1, 0.04};
  REQUIRE(convergence_demonstrated(down, 0.05));
  REQUIRE_FALSE(convergence_demonstrated(down, 0.01));
  const std::vector<double> bumpy{0.4, 0.5, 0.1, 0.04};
  REQUIRE(convergence_demonstrated(bumpy, 0.05));  // last three steps decrease
  const std::vector<double> late{0.4, 0.2, 0.3, 0.04};
  REQUIRE_FALSE(convergence_demonstrated(late, 0.05));
  const std::vector<double> two{0.2, 0.01};
  REQUIRE_FALSE(convergence_demonstrated(two, 0.05));
  const std::vector<double> floor{1e-15, 3e-16, 2e-15};
  REQUIRE(convergence_demonstrated(floor, 0.05));
}

TEST_CASE("constant scenario converges exactly", "[experiments]") {
  const Scenario s = parse_scenario(converge_doc("3"));
  const RunReport report = run_scenario(s);
  REQUIRE(report.exit_code(false) == exit_ok);
  REQUIRE(report.exit_code(true) == exit_ok);
  const OutputFile* csv = report.find("converge.csv");
  REQUIRE(csv != nullptr);
  const auto rows = lines(csv->content);
  REQUIRE(rows.front() == "j,n,l,eta,x,S,target,abs_error,bound_rhs");
  REQUIRE(rows.size() == 1 + 3 * 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    REQUIRE(cells.size() == 9);
    REQUIRE(std::stod(cells[7]) <= 1e-8);
    REQUIRE(cells[8].empty());
  }
  // ordered by j, eta strictly decreasing
  REQUIRE(split(rows[1])[0] == "0");
  REQUIRE(split(rows[3])[0] == "1");
  REQUIRE(std::stod(split(rows[3])[3]) < std::stod(split(rows[1])[3]));
  REQUIRE(csv->content.back() == '\n');
}

TEST_CASE("single row trace", "[experiments]") {
  json doc = converge_doc("3");
  doc["x_points"] = {0.5};
  doc["sweep"] = {{{"n", 4}, {"l", 2.0}}};
  const RunReport report = run_scenario(parse_scenario(doc));
  REQUIRE(lines(report.find("converge.csv")->content).size() == 2);
}

TEST_CASE("single harmonic scenario", "[experiments]") {
  json doc = converge_doc("cos(pi*t/5)");
  doc["sweep"] = {{{"n", 1}, {"l", 5.0}}};
  doc["x_points"] = {-4.0, -1.0, 0.0, 2.5, 3.3};
  const RunReport report = run_scenario(parse_scenario(doc));
  const auto rows = lines(report.find("converge.csv")->content);
  for (std::size_t i = 1; i < rows.size(); ++i) REQUIRE(std::stod(split(rows[i])[7]) <= 1e-8);
}

TEST_CASE("every check writes its files and a summary", "[experiments]") {
  json doc = {{"schema_version", 1},
              {"name", "all checks"},
              {"function", "sin(t)"},
              {"period_hint", 6.283185307179586},
              {"x_points", {0.0, 1.0}},
              {"sweep", {{{"n", 8}, {"l", 4.0}}, {{"n", 36}, {"l", 6.0}}}},
              {"samples", 500},
              {"seed", 77},
              {"lebesgue", {{"h_min", 0.01}, {"h_max", 100}, {"points_per_decade", 3}}},
              {"converge", {{"with_bound", true}, {"threshold", 1.0}}},
              {"checks", {"coeffs", "partial-sum", "error-repr", "lebesgue", "bound", "k", "class-e", "converge"}}};
  const RunReport report = run_scenario(parse_scenario(doc));
  for (const char* name : {"coeffs_j0.csv", "coeffs_j1.csv", "partial_sum.csv", "error_repr.csv", "lebesgue.json",
                           "bound.csv", "k.csv", "class_e.csv", "class_e_periodic.csv", "class_e.json", "converge.csv",
                           "summary.json"}) {
    INFO(name);
    REQUIRE(report.find(name) != nullptr);
  }
  REQUIRE(report.hard_pass());
  REQUIRE(lines(report.find("coeffs_j1.csv")->content).size() == 1 + 37);
  REQUIRE(lines(report.find("coeffs_j0.csv")->content).front() == "k,a,b");
  REQUIRE(lines(report.find("partial_sum.csv")->content).front() == "x,n,l,value,via");
  REQUIRE(lines(report.find("class_e.csv")->content).front() == "c,T,right_value,left_value");
  const json summary = json::parse(report.find("summary.json")->content);
  REQUIRE(summary["seed"] == 77);
  REQUIRE(summary["checks"].size() == 8);
  REQUIRE(summary["hard_pass"] == true);
  const json leb = json::parse(report.find("lebesgue.json")->content);
  REQUIRE(leb["profiles"].size() == 2);
  // converge rows carry the bound right-hand side when requested
  const auto conv = lines(report.find("converge.csv")->content);
  REQUIRE_FALSE(split(conv[1])[8].empty());
}

TEST_CASE("exit status follows hard and soft flags", "[experiments]") {
  RunReport r;
  r.outcomes.push_back({Check::k, true, true, {}});
  REQUIRE(r.exit_code(false) == exit_ok);
  r.outcomes.push_back({Check::lebesgue, true, false, {}});
  REQUIRE(r.exit_code(false) == exit_ok);
  REQUIRE(r.exit_code(true) == exit_check_failed);
  r.outcomes.push_back({Check::bound, false, true, {}});
  REQUIRE(r.exit_code(false) == exit_check_failed);
}

TEST_CASE("inconsistent flags stay soft", "[experiments]") {
  json doc = {{"schema_version", 1},
              {"function", "abs(t)"},
              {"checks", {"class-e"}}};
  const RunReport report = run_scenario(parse_scenario(doc));
  REQUIRE(report.exit_code(false) == exit_ok);
  REQUIRE(report.exit_code(true) == exit_check_failed);
  REQUIRE(json::parse(report.find("class_e.json")->content)["consistent"] == false);
}

TEST_CASE("runs are byte-identical regardless of threads", "[experiments][determinism]") {
  json doc = {{"schema_version", 1},
              {"function", "sin(3*t)*exp(-t^2/50)"},
              {"x_points", {-0.5, 0.0, 0.9, 1.4}},
              {"sweep", {{{"n", 30}, {"l", 6.0}}, {{"n", 90}, {"l", 9.0}}}},
              {"samples", 300},
              {"checks", {"partial-sum", "bound", "k", "converge"}}};
  const Scenario s = parse_scenario(doc);
  const RunReport one = run_scenario(s, {1});
  const RunReport again = run_scenario(s, {1});
  const RunReport many = run_scenario(s, {6});
  REQUIRE(one.files.size() == many.files.size());
  for (std::size_t i = 0; i < one.files.size(); ++i) {
    INFO(one.files[i].name);
    REQUIRE(one.files[i].name == many.files[i].name);
    REQUIRE(one.files[i].content == again.files[i].content);
    REQUIRE(one.files[i].content == many.files[i].content);
  }
}

TEST_CASE("parallel_for rethrows the lowest failing index", "[experiments]") {
  std::vector<int> out(50, 0);
  try {
    parallel_for(out.size(), 4, [&](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error("slot " + std::to_string(i));
      out[i] = 1;
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    REQUIRE(std::string(e.what()) == "slot 7");
  }
}
