#include "ghostbench/harness.hpp"

#include "ghostbench/keyvalue.hpp"
#include "ghostbench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace ghost {

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "scenario.name",          "scenario.m",
      "scenario.methods",       "scenario.seeds",
      "scenario.noise_sigma",   "scenario.mask",
      "scenario.slit_width_m",  "scenario.slit_height_m",
      "scenario.slit_separation_m", "scenario.slit_center_x_m",
      "scenario.slit_center_y_m", "scenario.text",
      "scenario.text_height_m", "optics.wavelength_m",
      "optics.z_m",             "optics.z1_m",
      "optics.source_width_m",  "optics.lc_target_m",
      "optics.grid_n",          "optics.pixel_pitch_m",
      "optics.source_samples_min", "gics.tau",
      "gics.max_iters",         "gics.tol_rel_obj",       "gics.tol_kkt_rel",
      "gics.bb_step_min",       "gics.bb_step_max",
      "gics.debias",            "gics.nonneg"};
  return keys;
}

bool valid_name(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::string grid_csv(const Grid& g) {
  std::string out;
  for (Eigen::Index y = 0; y < g.rows(); ++y) {
    for (Eigen::Index x = 0; x < g.cols(); ++x) {
      if (x) out += ',';
      out += format_double(g(y, x));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

void Scenario::validate() const {
  config.validate();
  gics.validate();
  if (!valid_name(name)) throw ConfigError("scenario name must be a non-empty [A-Za-z0-9._-] string");
  if (!run_gi && !run_gics) throw ConfigError("no reconstruction method requested");
  if (m < 1) throw ConfigError("m must be at least 1");
  if (run_gi && m < 2) throw ConfigError("GI needs m >= 2");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be non-negative");
}

Scenario parse_scenario(const KeyValueFile& kv, const std::filesystem::path& base_dir) {
  kv.require_known(known_keys());
  Scenario s;
  s.name = kv.raw("scenario.name");
  const auto m = kv.integer("scenario.m");
  if (m < 1) throw ParseError("scenario.m must be positive");
  s.m = static_cast<std::size_t>(m);

  if (kv.has("scenario.methods")) {
    s.run_gi = s.run_gics = false;
    for (const auto& item : split_list(kv.raw("scenario.methods"))) {
      if (item == "GI") {
        s.run_gi = true;
      } else if (item == "GICS") {
        s.run_gics = true;
      } else {
        throw ParseError("scenario.methods: unknown method '" + item + "'");
      }
    }
  }
  if (kv.has("scenario.seeds")) {
    for (const auto& item : split_list(kv.raw("scenario.seeds"))) s.seeds.push_back(parse_uint64(item));
  } else {
    s.seeds = {1};
  }
  s.noise_sigma = kv.number_or("scenario.noise_sigma", 0.0);

  const std::string mask = kv.has("scenario.mask") ? kv.raw("scenario.mask") : "double_slit";
  if (mask == "double_slit") {
    s.mask.kind = MaskKind::DoubleSlit;
  } else if (mask == "text") {
    s.mask.kind = MaskKind::Text;
  } else {
    s.mask.kind = MaskKind::File;
    s.mask.file = std::filesystem::path(mask).is_absolute() ? std::filesystem::path(mask) : base_dir / mask;
  }
  s.mask.slit.width = kv.number_or("scenario.slit_width_m", s.mask.slit.width);
  s.mask.slit.height = kv.number_or("scenario.slit_height_m", s.mask.slit.height);
  s.mask.slit.separation = kv.number_or("scenario.slit_separation_m", s.mask.slit.separation);
  s.mask.slit.center_x = kv.number_or("scenario.slit_center_x_m", 0.0);
  s.mask.slit.center_y = kv.number_or("scenario.slit_center_y_m", 0.0);
  if (kv.has("scenario.text")) s.mask.text = kv.raw("scenario.text");
  s.mask.text_height = kv.number_or("scenario.text_height_m", s.mask.text_height);

  auto& c = s.config;
  c.wavelength = kv.number_or("optics.wavelength_m", c.wavelength);
  c.z_source_to_object = kv.number_or("optics.z_m", c.z_source_to_object);
  c.z_source_to_reference = kv.number_or("optics.z1_m", c.z_source_to_reference);
  c.grid_n = static_cast<int>(kv.integer_or("optics.grid_n", c.grid_n));
  c.pixel_pitch = kv.number_or("optics.pixel_pitch_m", c.pixel_pitch);
  c.source_samples_min = static_cast<int>(kv.integer_or("optics.source_samples_min", c.source_samples_min));
  const bool has_lc = kv.has("optics.lc_target_m");
  const bool has_d = kv.has("optics.source_width_m");
  if (has_lc && has_d) throw ParseError("give either optics.lc_target_m or optics.source_width_m, not both");
  if (!has_lc && !has_d) throw ParseError("missing optics.lc_target_m (or optics.source_width_m)");
  if (has_lc) {
    const double lc = kv.number("optics.lc_target_m");
    if (!(lc > 0.0)) throw ParseError("optics.lc_target_m must be positive");
    c.source_width = c.wavelength * c.z_source_to_object / lc;
  } else {
    c.source_width = kv.number("optics.source_width_m");
  }

  auto& g = s.gics;
  g.tau = kv.number_or("gics.tau", g.tau);
  g.max_iters = static_cast<int>(kv.integer_or("gics.max_iters", g.max_iters));
  g.tol_rel_obj = kv.number_or("gics.tol_rel_obj", g.tol_rel_obj);
  g.tol_kkt_rel = kv.number_or("gics.tol_kkt_rel", g.tol_kkt_rel);
  g.bb_step_min = kv.number_or("gics.bb_step_min", g.bb_step_min);
  g.bb_step_max = kv.number_or("gics.bb_step_max", g.bb_step_max);
  g.debias = kv.boolean_or("gics.debias", g.debias);
  g.nonneg = kv.boolean_or("gics.nonneg", g.nonneg);

  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what());
  }
  return s;
}

const std::map<std::string, std::string>& builtin_recipes() {
  static const std::map<std::string, std::string> recipes = [] {
    std::map<std::string, std::string> r;
    const std::string slit =
        "scenario.mask = double_slit\n"
        "scenario.slit_width_m = 0.1e-3\n"
        "scenario.slit_height_m = 1.0e-3\n"
        "scenario.slit_separation_m = 0.2e-3\n";
    const std::string optics =
        "optics.wavelength_m = 650e-9\n"
        "optics.z_m = 0.4\n"
        "optics.z1_m = 0.5\n"
        "optics.grid_n = 100\n"
        "optics.pixel_pitch_m = 15e-6\n";
    r["fig2-sim"] = "scenario.name = fig2-sim\nscenario.m = 300\nscenario.methods = GI,GICS\n"
                    "scenario.seeds = 1\n" + slit + optics + "optics.lc_target_m = 135.5e-6\ngics.tau = 0.001\n";
    const std::pair<const char*, const char*> fig3[] = {
        {"fig3-lc276", "276.7e-6"}, {"fig3-lc135", "135.5e-6"}, {"fig3-lc69", "68.8e-6"}};
    for (const auto& [name, lc] : fig3) {
      r[name] = std::string("scenario.name = ") + name + "\nscenario.m = 500\nscenario.methods = GI,GICS\n" +
                "scenario.seeds = 1,2,3,4,5\n" + slit + optics + "optics.lc_target_m = " + lc + "\ngics.tau = 0.001\n";
    }
    const std::pair<const char*, const char*> fig4[] = {
        {"lc272", "272.2e-6"}, {"lc194", "193.5e-6"}, {"lc110", "109.6e-6"}};
    const std::string siom = "scenario.mask = text\nscenario.text = SIOM\nscenario.text_height_m = 0.315e-3\n";
    for (const auto& [tag, lc] : fig4) {
      r[std::string("fig4-gi-") + tag] = std::string("scenario.name = fig4-gi-") + tag +
                                          "\nscenario.m = 2000\nscenario.methods = GI\nscenario.seeds = 1\n" + siom +
                                          optics + "optics.lc_target_m = " + lc + "\n";
      r[std::string("fig4-gics-") + tag] = std::string("scenario.name = fig4-gics-") + tag +
                                            "\nscenario.m = 1000\nscenario.methods = GICS\nscenario.seeds = 1\n" + siom +
                                            optics + "optics.lc_target_m = " + lc + "\ngics.tau = 0.001\n";
    }
    return r;
  }();
  return recipes;
}

Scenario load_scenario(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    const auto name = spec.substr(prefix.size());
    auto it = builtin_recipes().find(name);
    if (it == builtin_recipes().end()) throw ParseError("unknown built-in recipe '" + name + "'");
    return parse_scenario(KeyValueFile::parse(it->second));
  }
  const std::filesystem::path path(spec);
  return parse_scenario(KeyValueFile::load(path), path.parent_path());
}

ObjectMask build_mask(const Scenario& s) {
  switch (s.mask.kind) {
    case MaskKind::DoubleSlit: return make_double_slit(s.config, s.mask.slit);
    case MaskKind::Text: return make_block_text(s.config, s.mask.text, s.mask.text_height);
    case MaskKind::File: return load_mask_pgm(s.mask.file, s.config);
  }
  throw ConfigError("unknown mask kind");
}

SeedResult evaluate_seed(const Scenario& s, const ObjectMask& truth, std::uint64_t seed, int threads) {
  const MeasurementSet ms = run_campaign(s.config, truth, s.m, seed, s.noise_sigma, threads);
  SeedResult out;
  out.seed = seed;
  out.measurements_csv = ms.to_csv();
  const double lc = coherence_length(s.config);

  auto make_row = [&](Method method, const Grid& img) {
    MetricsRow row;
    row.scenario = s.name;
    row.lc = lc;
    row.m = s.m;
    row.method = method;
    row.seed = seed;
    row.snr = recon_snr(img, truth);
    row.mse = mse(img, truth);
    row.psnr = psnr(img, truth);
    if (s.mask.kind == MaskKind::DoubleSlit) {
      try {
        row.dip = slit_dip(img, s.mask.slit, s.config.pixel_pitch);
      } catch (const NumericError&) {
        row.dip.reset();  // flat image: dip undefined
      }
    }
    return row;
  };

  if (s.run_gi) {
    out.gi = gi_reconstruct(ms);
    out.rows.push_back(make_row(Method::GI, out.gi->values));
  }
  if (s.run_gics) {
    out.gics = gics_reconstruct(ms, s.gics);
    out.rows.push_back(make_row(Method::GICS, out.gics->image.values));
  }
  return out;
}

std::vector<MetricsRow> run_scenario(const Scenario& s, const RunOptions& opt) {
  s.validate();
  const ObjectMask truth = build_mask(s);
  const auto dir = opt.out_dir / s.name;

  // Seeds run concurrently; each campaign is then single-threaded.
  const int seed_threads = std::max(1, opt.threads);
  const int inner_threads = s.seeds.size() > 1 ? 1 : seed_threads;
  std::vector<std::vector<MetricsRow>> per_seed(s.seeds.size());
  parallel_for(s.seeds.size(), seed_threads, [&](std::size_t i) {
    const auto seed = s.seeds[i];
    SeedResult r = evaluate_seed(s, truth, seed, inner_threads);
    const auto sd = dir / std::to_string(seed);
    save_grid_pgm(sd / "truth.pgm", truth.values());
    if (r.gi) {
      save_grid_pgm(sd / "gi.pgm", min_max_normalize(r.gi->values));
      write_file_atomic(sd / "gi_raw.csv", grid_csv(r.gi->values));
    }
    if (r.gics) {
      save_grid_pgm(sd / "gics.pgm", min_max_normalize(r.gics->image.values));
      write_file_atomic(sd / "gics_raw.csv", grid_csv(r.gics->image.values));
      write_file_atomic(sd / "solve.csv", r.gics->report.trace_csv());
    }
    write_file_atomic(sd / "measurements.csv", r.measurements_csv);
    std::string csv = metrics_csv_header();
    for (const auto& row : r.rows) csv += to_csv_line(row);
    write_file_atomic(sd / "metrics.csv", csv);
    per_seed[i] = std::move(r.rows);
  });

  std::vector<MetricsRow> all;
  std::string csv = metrics_csv_header();
  for (auto& rows : per_seed) {
    for (auto& row : rows) {
      csv += to_csv_line(row);
      all.push_back(std::move(row));
    }
  }
  write_file_atomic(dir / "metrics.csv", csv);
  return all;
}

std::string TrendResult::csv() const {
  std::string out = "lc_m,method,seeds,snr_mean,snr_std,mse_mean,mse_std\n";
  for (const auto& r : rows) {
    out += format_double(r.lc) + "," + method_name(r.method) + "," + std::to_string(r.seeds) + "," +
           format_double(r.snr_mean) + "," + format_double(r.snr_std) + "," + format_double(r.mse_mean) + "," +
           format_double(r.mse_std) + "\n";
  }
  return out;
}

std::string TrendResult::verdict_lines() const {
  std::string out;
  if (monotone_gi_snr) out += std::string("monotone_gi_snr=") + (*monotone_gi_snr ? "true" : "false") + "\n";
  if (monotone_gics_mse) out += std::string("monotone_gics_mse=") + (*monotone_gics_mse ? "true" : "false") + "\n";
  return out;
}

std::vector<double> TrendResult::snr_means(Method m) const {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.method == m) v.push_back(r.snr_mean);
  }
  return v;
}

std::vector<double> TrendResult::mse_means(Method m) const {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r.method == m) v.push_back(r.mse_mean);
  }
  return v;
}

TrendResult trend_experiment(const Scenario& base, std::vector<double> lc_list, const std::vector<std::uint64_t>& seeds,
                             int threads) {
  if (lc_list.size() < 2) throw ConfigError("trend needs at least two coherence lengths");
  if (seeds.size() < 2) throw ConfigError("trend needs at least two seeds");
  for (double lc : lc_list) {
    if (!(lc > 0.0)) throw ConfigError("coherence lengths must be positive");
  }
  std::sort(lc_list.begin(), lc_list.end(), std::greater<>());
  lc_list.erase(std::unique(lc_list.begin(), lc_list.end()), lc_list.end());

  std::vector<Scenario> variants;
  for (double lc : lc_list) {
    Scenario s = base;
    s.seeds = seeds;
    s.config.source_width = s.config.wavelength * s.config.z_source_to_object / lc;
    s.validate();
    variants.push_back(std::move(s));
  }
  const ObjectMask truth = build_mask(variants.front());

  const std::size_t jobs = variants.size() * seeds.size();
  std::vector<std::vector<MetricsRow>> rows(jobs);
  parallel_for(jobs, threads, [&](std::size_t j) {
    const auto& s = variants[j / seeds.size()];
    rows[j] = evaluate_seed(s, truth, seeds[j % seeds.size()], 1).rows;
  });

  TrendResult out;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (Method method : {Method::GI, Method::GICS}) {
      std::vector<double> snr, err;
      for (std::size_t k = 0; k < seeds.size(); ++k) {
        for (const auto& row : rows[v * seeds.size() + k]) {
          if (row.method == method) {
            snr.push_back(row.snr);
            err.push_back(row.mse);
          }
        }
      }
      if (snr.empty()) continue;
      TrendRow t;
      t.lc = lc_list[v];
      t.method = method;
      t.seeds = snr.size();
      for (double x : snr) t.snr_mean += x;
      for (double x : err) t.mse_mean += x;
      t.snr_mean /= static_cast<double>(snr.size());
      t.mse_mean /= static_cast<double>(err.size());
      t.snr_std = sample_std(snr, t.snr_mean);
      t.mse_std = sample_std(err, t.mse_mean);
      out.rows.push_back(t);
    }
  }

  auto non_increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[i - 1]) return false;
    }
    return true;
  };
  if (base.run_gi) out.monotone_gi_snr = non_increasing(out.snr_means(Method::GI));
  if (base.run_gics) out.monotone_gics_mse = non_increasing(out.mse_means(Method::GICS));
  return out;
}

void write_trend(const Scenario& base, const TrendResult& trend, const std::filesystem::path& out_dir) {
  const auto dir = out_dir / base.name;
  write_file_atomic(dir / "trend.csv", trend.csv());
  write_file_atomic(dir / "trend_verdicts.txt", trend.verdict_lines());
}

}  // namespace ghost
