#pragma once

#include "ghostbench/metrics.hpp"
#include "ghostbench/optics.hpp"
#include "ghostbench/recon_gi.hpp"
#include "ghostbench/recon_gics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ghost {

class KeyValueFile;

enum class MaskKind { DoubleSlit, Text, File };

struct MaskSource {
  MaskKind kind = MaskKind::DoubleSlit;
  DoubleSlit slit;
  std::string text = "SIOM";
  double text_height = 0.315e-3;
  std::filesystem::path file;
};

/// One experiment recipe: optics, object, budget, methods and seeds.
struct Scenario {
  std::string name;
  OpticalConfig config;
  MaskSource mask;
  std::size_t m = 0;
  bool run_gi = true;
  bool run_gics = true;
  GicsParams gics;
  std::vector<std::uint64_t> seeds;
  double noise_sigma = 0.0;

  void validate() const;
};

/// Parses the sectioned key=value scenario format (`scenario.`, `optics.`,
/// `gics.` prefixes). Unknown keys and malformed values throw ParseError;
/// relative mask paths resolve against `base_dir`.
Scenario parse_scenario(const KeyValueFile& kv, const std::filesystem::path& base_dir = {});

/// Loads a scenario file, or a built-in recipe when `spec` is `builtin:<name>`.
Scenario load_scenario(const std::string& spec);

/// Built-in recipes keyed by name, as scenario-file text.
const std::map<std::string, std::string>& builtin_recipes();

ObjectMask build_mask(const Scenario& s);

/// In-memory result of one seed's pipeline.
struct SeedResult {
  std::uint64_t seed = 0;
  std::optional<GiImage> gi;
  std::optional<GicsResult> gics;
  std::vector<MetricsRow> rows;
  std::string measurements_csv;
};

SeedResult evaluate_seed(const Scenario& s, const ObjectMask& truth, std::uint64_t seed, int threads = 1);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  int threads = 1;
};

/// Runs every seed and writes `<out>/<name>/<seed>/...` plus a combined
/// `<out>/<name>/metrics.csv`. Returns all metric rows in seed order.
std::vector<MetricsRow> run_scenario(const Scenario& s, const RunOptions& opt);

struct TrendRow {
  double lc = 0.0;
  Method method = Method::GI;
  std::size_t seeds = 0;
  double snr_mean = 0.0;
  double snr_std = 0.0;
  double mse_mean = 0.0;
  double mse_std = 0.0;
};

struct TrendResult {
  std::vector<TrendRow> rows;  // l_c strictly descending, GI before GICS
  std::optional<bool> monotone_gi_snr;
  std::optional<bool> monotone_gics_mse;

  std::string csv() const;
  std::string verdict_lines() const;
  /// Means of one method in row order (descending l_c).
  std::vector<double> snr_means(Method m) const;
  std::vector<double> mse_means(Method m) const;
};

/// Reruns `base` at each coherence length (sorted descending, duplicates
/// merged) over `seeds`. Needs at least two entries in each list.
TrendResult trend_experiment(const Scenario& base, std::vector<double> lc_list, const std::vector<std::uint64_t>& seeds,
                             int threads = 1);

/// Writes `<out>/<name>/trend.csv` and `<out>/<name>/trend_verdicts.txt`.
void write_trend(const Scenario& base, const TrendResult& trend, const std::filesystem::path& out_dir);

}  // namespace ghost
