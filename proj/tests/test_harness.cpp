#include "ghostbench/harness.hpp"
#include "ghostbench/keyvalue.hpp"
#include "ghostbench/pgm.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace ghost;
namespace fs = std::filesystem;

namespace {

const std::string kSmall =
    "scenario.name = small\n"
    "scenario.m = 120\n"
    "scenario.methods = GI,GICS\n"
    "scenario.seeds = 1,2\n"
    "scenario.mask = double_slit\n"
    "scenario.slit_width_m = 0.06e-3\n"
    "scenario.slit_height_m = 0.3e-3\n"
    "scenario.slit_separation_m = 0.15e-3\n"
    "optics.grid_n = 32\n"
    "optics.lc_target_m = 60e-6\n"
    "gics.tau = 0.001\n";

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("ghostbench_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

int cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " \"" GHOSTBENCH_CLI "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Every CSV below `root`, keyed by relative path.
std::map<std::string, std::string> csv_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().extension() == ".csv")
      out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST(ParseScenario, ReadsAllSections) {
  const auto s = parse_scenario(KeyValueFile::parse(kSmall + "gics.debias = true\nscenario.noise_sigma = 0.5\n"));
  EXPECT_EQ(s.name, "small");
  EXPECT_EQ(s.m, 120u);
  EXPECT_TRUE(s.run_gi);
  EXPECT_TRUE(s.run_gics);
  EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(s.config.grid_n, 32);
  EXPECT_NEAR(coherence_length(s.config), 60e-6, 1e-15);
  EXPECT_DOUBLE_EQ(s.mask.slit.width, 0.06e-3);
  EXPECT_TRUE(s.gics.debias);
  EXPECT_DOUBLE_EQ(s.noise_sigma, 0.5);
}

TEST(ParseScenario, SourceWidthAlternative) {
  std::string text = kSmall;
  text.replace(text.find("optics.lc_target_m = 60e-6"), 26, "optics.source_width_m = 4.3e-3");
  const auto s = parse_scenario(KeyValueFile::parse(text));
  EXPECT_DOUBLE_EQ(s.config.source_width, 4.3e-3);
}

TEST(ParseScenario, Rejections) {
  auto bad = [](const std::string& text) { return parse_scenario(KeyValueFile::parse(text)); };
  EXPECT_THROW(bad(kSmall + "scenario.colour = red\n"), ParseError);
  EXPECT_THROW(bad(kSmall + "optics.source_width_m = 1e-3\n"), ParseError);
  EXPECT_THROW(bad(kSmall + "scenario.methods = GI,FFT\n"), ParseError);
  std::string no_optics = kSmall;
  no_optics.erase(no_optics.find("optics.lc_target_m"));
  EXPECT_THROW(bad(no_optics + "gics.tau = 0.001\n"), ParseError);
  std::string bad_name = kSmall;
  bad_name.replace(bad_name.find("small"), 5, "../x");
  EXPECT_THROW(bad(bad_name), ParseError);
  std::string one_shot = kSmall;
  one_shot.replace(one_shot.find("scenario.m = 120"), 16, "scenario.m = 1");
  EXPECT_THROW(bad(one_shot), ParseError);
  std::string neg_tau = kSmall;
  neg_tau.replace(neg_tau.find("gics.tau = 0.001"), 16, "gics.tau = -1");
  EXPECT_THROW(bad(neg_tau), ParseError);
}

TEST(BuiltinRecipes, AllParseAndBuildMasks) {
  for (const auto& [name, text] : builtin_recipes()) {
    const auto s = load_scenario("builtin:" + name);
    EXPECT_EQ(s.name, name);
    EXPECT_NO_THROW(build_mask(s)) << name;
  }
  const auto fig3 = load_scenario("builtin:fig3-lc69");
  EXPECT_EQ(fig3.m, 500u);
  EXPECT_DOUBLE_EQ(fig3.gics.tau, 0.001);
  EXPECT_EQ(fig3.seeds.size(), 5u);
  EXPECT_NEAR(coherence_length(fig3.config), 68.8e-6, 1e-12);
  EXPECT_THROW(load_scenario("builtin:nope"), ParseError);
}

TEST(RunScenario, WritesPerSeedArtifacts) {
  const auto dir = fresh_dir("artifacts");
  const auto s = parse_scenario(KeyValueFile::parse(kSmall));
  const auto rows = run_scenario(s, {dir, 2});
  ASSERT_EQ(rows.size(), 4u);
  for (const char* seed : {"1", "2"}) {
    for (const char* f : {"gi.pgm", "gics.pgm", "truth.pgm", "metrics.csv", "solve.csv", "measurements.csv"})
      EXPECT_TRUE(fs::exists(dir / "small" / seed / f)) << seed << "/" << f;
  }
  const auto truth = read_pgm(dir / "small" / "1" / "truth.pgm");
  EXPECT_EQ(truth.width, 32);
  const auto combined = slurp(dir / "small" / "metrics.csv");
  EXPECT_EQ(combined.rfind(metrics_csv_header(), 0), 0u);
  EXPECT_EQ(std::count(combined.begin(), combined.end(), '\n'), 5);
  for (const auto& e : fs::recursive_directory_iterator(dir))
    EXPECT_NE(e.path().extension(), ".tmp") << e.path();
}

TEST(RunScenario, TextAndFileMasks) {
  const auto dir = fresh_dir("masks");
  Graymap g;
  g.width = g.height = 32;
  g.samples.assign(32 * 32, 0);
  for (int y = 10; y < 20; ++y)
    for (int x = 12; x < 18; ++x) g.samples[static_cast<std::size_t>(y * 32 + x)] = 255;
  write_pgm(dir / "obj.pgm", g, PgmEncoding::Plain);
  std::string text = kSmall;
  text.replace(text.find("scenario.mask = double_slit"), 27, "scenario.mask = obj.pgm");
  put(dir / "file.scn", text);
  const auto s = load_scenario((dir / "file.scn").string());
  EXPECT_EQ(s.mask.kind, MaskKind::File);
  const auto rows = run_scenario(s, {dir / "out", 1});
  EXPECT_FALSE(rows.front().dip.has_value());
}

TEST(Trend, SortsAndIsOrderIndependent) {
  auto s = parse_scenario(KeyValueFile::parse(kSmall));
  s.m = 60;
  const auto a = trend_experiment(s, {45e-6, 90e-6, 60e-6}, {1, 2}, 4);
  const auto b = trend_experiment(s, {60e-6, 45e-6, 90e-6}, {1, 2}, 1);
  EXPECT_EQ(a.csv(), b.csv());
  EXPECT_EQ(a.verdict_lines(), b.verdict_lines());
  ASSERT_EQ(a.rows.size(), 6u);
  for (std::size_t i = 2; i < a.rows.size(); ++i) EXPECT_LT(a.rows[i].lc, a.rows[i - 2].lc);
  EXPECT_EQ(a.csv().rfind("lc_m,method,seeds,snr_mean,snr_std,mse_mean,mse_std\n", 0), 0u);
}

TEST(Trend, RepeatedCoherenceLengthIsTriviallyMonotone) {
  auto s = parse_scenario(KeyValueFile::parse(kSmall));
  s.m = 40;
  const auto t = trend_experiment(s, {60e-6, 60e-6}, {1, 2});
  EXPECT_EQ(t.verdict_lines(), "monotone_gi_snr=true\nmonotone_gics_mse=true\n");
}

TEST(Trend, NeedsTwoOfEach) {
  const auto s = parse_scenario(KeyValueFile::parse(kSmall));
  EXPECT_THROW(trend_experiment(s, {60e-6}, {1, 2}), ConfigError);
  EXPECT_THROW(trend_experiment(s, {60e-6, 70e-6}, {1}), ConfigError);
}

TEST(Cli, UnknownKeyExitsTwoWithoutOutputs) {
  const auto dir = fresh_dir("cli_unknown");
  put(dir / "bad.scn", kSmall + "scenario.frobnicate = 1\n");
  EXPECT_EQ(cli("run " + (dir / "bad.scn").string() + " --out " + (dir / "out").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli_codes");
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("bogus"), 2);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_EQ(cli("run " + (dir / "missing.scn").string()), 2);
  EXPECT_EQ(cli("trend builtin:fig3-lc69 --lc 1e-4 --seeds 1,2"), 2);
  EXPECT_EQ(cli("recipes"), 0);
  EXPECT_EQ(cli("recipes fig3-lc69"), 0);
  EXPECT_EQ(cli("recipes nope"), 2);
  // Parses, but the referenced mask file does not exist: runtime failure.
  std::string text = kSmall;
  text.replace(text.find("scenario.mask = double_slit"), 27, "scenario.mask = absent.pgm");
  put(dir / "nomask.scn", text);
  EXPECT_EQ(cli("run " + (dir / "nomask.scn").string() + " --out " + (dir / "out").string()), 1);
}

TEST(Cli, RerunsAndThreadCountsAreByteIdentical) {
  const auto dir = fresh_dir("cli_determinism");
  put(dir / "small.scn", kSmall);
  const auto scn = (dir / "small.scn").string();
  ASSERT_EQ(cli("run " + scn + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(cli("run " + scn + " --out " + (dir / "b").string()), 0);
  ASSERT_EQ(cli("run " + scn + " --threads 4", "GHOSTBENCH_OUT=" + (dir / "c").string()), 0);
  const auto a = csv_tree(dir / "a");
  EXPECT_GE(a.size(), 9u);
  EXPECT_EQ(a, csv_tree(dir / "b"));
  EXPECT_EQ(a, csv_tree(dir / "c"));
}

TEST(Cli, TrendWritesCsvAndVerdicts) {
  const auto dir = fresh_dir("cli_trend");
  std::string text = kSmall;
  text.replace(text.find("scenario.m = 120"), 16, "scenario.m = 50");
  put(dir / "small.scn", text);
  ASSERT_EQ(cli("trend " + (dir / "small.scn").string() + " --lc 60e-6,90e-6 --seeds 1,2 --out " + dir.string()), 0);
  const auto verdicts = slurp(dir / "small" / "trend_verdicts.txt");
  EXPECT_NE(verdicts.find("monotone_gi_snr="), std::string::npos);
  EXPECT_NE(verdicts.find("monotone_gics_mse="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "small" / "trend.csv"));
}

TEST(Cli, SelftestPasses) { EXPECT_EQ(cli("selftest"), 0); }
