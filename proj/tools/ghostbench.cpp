// ghostbench: ghost-imaging scenario runner.
//
//   ghostbench run <scenario> [--out DIR] [--threads N]
//   ghostbench trend <scenario> --lc <m,m,...> --seeds <s,s,...> [--out DIR] [--threads N]
//   ghostbench selftest
//   ghostbench recipes [name]
//
// <scenario> is a path or builtin:<name>. Exit codes: 0 ok, 1 runtime, 2 usage/parse.

#include "ghostbench/harness.hpp"
#include "ghostbench/keyvalue.hpp"
#include "ghostbench/selftest.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

std::string default_out() {
  const char* env = std::getenv("GHOSTBENCH_OUT");
  return env && *env ? env : "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-light ghost imaging simulation bench"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir = default_out();
  int threads = 1;
  std::string lc_arg, seeds_arg, recipe_name;

  auto* run = app.add_subcommand("run", "Run a scenario file and write images and metrics");
  run->add_option("scenario", scenario_arg, "Scenario file or builtin:<name>")->required();
  run->add_option("--out", out_dir, "Output directory (default $GHOSTBENCH_OUT or ./out)");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* trend = app.add_subcommand("trend", "Sweep coherence lengths and emit a trend table");
  trend->add_option("scenario", scenario_arg, "Base scenario file or builtin:<name>")->required();
  trend->add_option("--lc", lc_arg, "Comma-separated coherence lengths in meters")->required();
  trend->add_option("--seeds", seeds_arg, "Comma-separated master seeds")->required();
  trend->add_option("--out", out_dir, "Output directory (default $GHOSTBENCH_OUT or ./out)");
  trend->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");

  auto* recipes = app.add_subcommand("recipes", "List built-in recipes or print one");
  recipes->add_option("name", recipe_name, "Recipe to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ghost::Scenario scenario;
  std::vector<double> lcs;
  std::vector<std::uint64_t> seeds;
  try {
    if (*run || *trend) scenario = ghost::load_scenario(scenario_arg);
    if (*trend) {
      for (const auto& s : ghost::split_list(lc_arg)) lcs.push_back(ghost::parse_double(s));
      for (const auto& s : ghost::split_list(seeds_arg)) seeds.push_back(ghost::parse_uint64(s));
      if (lcs.size() < 2 || seeds.size() < 2) throw ghost::ParseError("trend needs at least two --lc and two --seeds");
    }
    if (*recipes && !recipe_name.empty() && !ghost::builtin_recipes().count(recipe_name))
      throw ghost::ParseError("unknown built-in recipe '" + recipe_name + "'");
  } catch (const std::exception& e) {
    std::cerr << "ghostbench: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*run) {
      const auto rows = ghost::run_scenario(scenario, {out_dir, threads});
      std::cout << ghost::metrics_csv_header();
      for (const auto& r : rows) std::cout << ghost::to_csv_line(r);
    } else if (*trend) {
      const auto result = ghost::trend_experiment(scenario, lcs, seeds, threads);
      ghost::write_trend(scenario, result, out_dir);
      std::cout << result.csv() << result.verdict_lines();
    } else if (*selftest) {
      return ghost::run_selftest(std::cout) ? 0 : 1;
    } else if (*recipes) {
      if (recipe_name.empty()) {
        for (const auto& [name, text] : ghost::builtin_recipes()) std::cout << name << "\n";
      } else {
        std::cout << ghost::builtin_recipes().at(recipe_name);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "ghostbench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
