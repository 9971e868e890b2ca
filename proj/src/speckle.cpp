#include "ghostbench/speckle.hpp"

#include "ghostbench/keyvalue.hpp"
#include "ghostbench/pgm.hpp"
#include "ghostbench/rng.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace ghost {

namespace {
constexpr std::uint64_t kSpeckleSalt = 0x5e7c1eULL;
}

SourceSampling plan_source_sampling(const OpticalConfig& config) {
  config.validate();
  const double lc = coherence_length(config);
  const double lc_pixels = lc / config.pixel_pitch;

  SourceSampling s;
  s.samples_across = std::max(config.source_samples_min, static_cast<int>(std::ceil(config.grid_n / lc_pixels)));
  s.dft_length = static_cast<int>(std::lround(s.samples_across * lc_pixels));
  while (s.dft_length < config.grid_n) {
    ++s.samples_across;
    s.dft_length = static_cast<int>(std::lround(s.samples_across * lc_pixels));
  }
  s.source_pitch = config.wavelength * config.z_source_to_object / (s.dft_length * config.pixel_pitch);
  if (config.source_width < s.source_pitch)
    throw ConfigError("source aperture is narrower than one source-plane sample");
  s.effective_aperture = s.samples_across * s.source_pitch;
  s.effective_coherence_length = config.wavelength * config.z_source_to_object / s.effective_aperture;
  return s;
}

SpeckleSynthesizer::SpeckleSynthesizer(const OpticalConfig& config)
    : config_(config), sampling_(plan_source_sampling(config)) {
  const int n = config_.grid_n;
  const int k = sampling_.samples_across;
  transform_.resize(n, k);
  const double x0 = 0.5 * (n - 1);
  const double s0 = 0.5 * (k - 1);
  for (int x = 0; x < n; ++x) {
    for (int s = 0; s < k; ++s) {
      const double phase = -2.0 * std::numbers::pi * (x - x0) * (s - s0) / sampling_.dft_length;
      transform_(x, s) = std::polar(1.0, phase);
    }
  }
}

SpeckleFrame SpeckleSynthesizer::frame(std::uint64_t master_seed, std::uint64_t frame_index) const {
  const int k = sampling_.samples_across;
  GaussianStream rng(stream_seed(master_seed, frame_index, kSpeckleSalt));
  // Circular complex Gaussian source field, unit mean power per sample.
  Eigen::MatrixXcd source(k, k);
  const double amp = std::sqrt(0.5);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const double re = rng.normal();
      const double im = rng.normal();
      source(r, c) = {amp * re, amp * im};
    }
  }
  const Eigen::MatrixXcd field = transform_ * source * transform_.transpose();

  SpeckleFrame f;
  f.seed = master_seed;
  f.frame_index = frame_index;
  f.intensity = field.array().abs2() / (static_cast<double>(k) * k);
  return f;
}

SpeckleFrame synthesize_frame(const OpticalConfig& config, std::uint64_t master_seed, std::uint64_t frame_index) {
  return SpeckleSynthesizer(config).frame(master_seed, frame_index);
}

SpeckleStatsAccumulator::SpeckleStatsAccumulator(int grid_n, double pixel_pitch)
    : n_(grid_n), pitch_(pixel_pitch), max_lag_(grid_n / 2), sum_(Grid::Zero(grid_n, grid_n)) {
  if (grid_n < 2) throw ConfigError("grid too small for statistics");
  lag_products_.reserve(static_cast<std::size_t>(max_lag_) + 1);
  for (int k = 0; k <= max_lag_; ++k) lag_products_.push_back(Grid::Zero(n_, n_ - k));
}

void SpeckleStatsAccumulator::add(const Grid& intensity) {
  if (intensity.rows() != n_ || intensity.cols() != n_) throw ConfigError("frame geometry differs from the ensemble");
  sum_ += intensity;
  for (int k = 0; k <= max_lag_; ++k) {
    lag_products_[static_cast<std::size_t>(k)] += intensity.leftCols(n_ - k) * intensity.rightCols(n_ - k);
  }
  central_.push_back(intensity(n_ / 2, n_ / 2));
  ++count_;
}

SpeckleStats SpeckleStatsAccumulator::finish() const {
  if (count_ < 2) throw ConfigError("intensity statistics need at least two frames");
  const double frames = static_cast<double>(count_);
  const Grid mean = sum_ / frames;

  SpeckleStats st;
  const int q = n_ / 4;
  st.mean_intensity = mean.block(q, q, n_ - 2 * q, n_ - 2 * q).mean();

  double c_mean = 0.0;
  for (double v : central_) c_mean += v;
  c_mean /= frames;
  double c_var = 0.0;
  std::size_t above = 0;
  for (double v : central_) {
    c_var += (v - c_mean) * (v - c_mean);
    if (v > c_mean * std::numbers::ln2) ++above;
  }
  c_var /= frames;
  st.contrast = c_mean > 0.0 ? std::sqrt(c_var) / c_mean : 0.0;
  st.fraction_above_median_level = static_cast<double>(above) / frames;

  std::vector<double> cov(static_cast<std::size_t>(max_lag_) + 1);
  for (int k = 0; k <= max_lag_; ++k) {
    const Grid centered = lag_products_[static_cast<std::size_t>(k)] / frames -
                          mean.leftCols(n_ - k) * mean.rightCols(n_ - k);
    cov[static_cast<std::size_t>(k)] = centered.mean();
  }
  const double scale = mean.square().mean();
  if (!(cov[0] > 1e-12 * scale)) {
    // No fluctuations: only the normalization at zero lag is defined.
    st.covariance_profile = {1.0};
    st.measured_lc = std::numeric_limits<double>::quiet_NaN();
    return st;
  }
  st.covariance_profile.resize(cov.size());
  for (std::size_t k = 0; k < cov.size(); ++k) st.covariance_profile[k] = cov[k] / cov[0];
  st.covariance_profile[0] = 1.0;
  st.measured_lc = first_zero_lag(st.covariance_profile) * pitch_;
  return st;
}

SpeckleStats intensity_stats(std::span<const SpeckleFrame> frames, double pixel_pitch) {
  if (frames.size() < 2) throw ConfigError("intensity statistics need at least two frames");
  SpeckleStatsAccumulator acc(static_cast<int>(frames.front().intensity.rows()), pixel_pitch);
  for (const auto& f : frames) acc.add(f.intensity);
  return acc.finish();
}

double first_zero_lag(std::span<const double> c) {
  const std::size_t n = c.size();
  auto amp = [&](std::size_t k) { return std::sqrt(std::max(c[k], 0.0)); };
  for (std::size_t k = 1; k < n; ++k) {
    if (c[k] <= 0.0) return static_cast<double>(k - 1) + c[k - 1] / (c[k - 1] - c[k]);
    if (k + 1 < n && c[k + 1] > c[k]) {
      // First local minimum: the zero lies between it and its smaller neighbour.
      if (c[k - 1] < c[k + 1]) return static_cast<double>(k - 1) + amp(k - 1) / (amp(k - 1) + amp(k));
      return static_cast<double>(k) + amp(k) / (amp(k) + amp(k + 1));
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void export_frame_pgm(const SpeckleFrame& frame, const std::filesystem::path& path) {
  const double peak = frame.intensity.maxCoeff();
  const double per_count = peak > 0.0 ? peak / 65535.0 : 1.0;
  Graymap img;
  img.width = static_cast<int>(frame.intensity.cols());
  img.height = static_cast<int>(frame.intensity.rows());
  img.maxval = 65535;
  img.samples.resize(static_cast<std::size_t>(frame.intensity.size()));
  for (Eigen::Index i = 0; i < frame.intensity.size(); ++i) {
    img.samples[static_cast<std::size_t>(i)] =
        static_cast<std::uint16_t>(std::lround(frame.intensity.data()[i] / per_count));
  }
  write_pgm(path, img, PgmEncoding::Binary);
  auto meta = path;
  meta += ".meta";
  write_file_atomic(meta, "intensity_per_count=" + format_double(per_count) + "\nmaster_seed=" +
                              std::to_string(frame.seed) + "\nframe_index=" + std::to_string(frame.frame_index) + "\n");
}

}  // namespace ghost
