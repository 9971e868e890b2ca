#pragma once

#include "ghostbench/grid.hpp"
#include "ghostbench/optics.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ghost {

/// One realization of the reference-plane intensity.
struct SpeckleFrame {
  Grid intensity;
  std::uint64_t seed = 0;  // master seed of the campaign
  std::uint64_t frame_index = 0;
};

/// Discretization of the emitting aperture used by the synthesizer.
///
/// The aperture spans `samples_across` source samples out of a transform of
/// length `dft_length`; the object-plane pitch then equals the pixel pitch and
/// the first zero of the field correlation sits at dft_length/samples_across pixels.
struct SourceSampling {
  int samples_across = 0;
  int dft_length = 0;
  double source_pitch = 0.0;           // meters
  double effective_aperture = 0.0;     // meters
  double effective_coherence_length = 0.0;  // meters
};

SourceSampling plan_source_sampling(const OpticalConfig& config);

/// Generates speckle frames for one configuration. Thread-safe; every frame is
/// a pure function of (master_seed, frame_index).
class SpeckleSynthesizer {
 public:
  explicit SpeckleSynthesizer(const OpticalConfig& config);

  SpeckleFrame frame(std::uint64_t master_seed, std::uint64_t frame_index) const;

  const SourceSampling& sampling() const { return sampling_; }
  const OpticalConfig& config() const { return config_; }

 private:
  OpticalConfig config_;
  SourceSampling sampling_;
  Eigen::MatrixXcd transform_;  // grid_n x samples_across
};

SpeckleFrame synthesize_frame(const OpticalConfig& config, std::uint64_t master_seed, std::uint64_t frame_index);

struct SpeckleStats {
  double mean_intensity = 0.0;
  double contrast = 0.0;
  std::vector<double> covariance_profile;  // index = lag in pixels
  double measured_lc = 0.0;                // meters, NaN when no zero is found
  double fraction_above_median_level = 0.0;  // central pixel samples above mean*ln2
};

/// Single-pass accumulator behind intensity_stats, for ensembles too large to hold.
class SpeckleStatsAccumulator {
 public:
  SpeckleStatsAccumulator(int grid_n, double pixel_pitch);

  void add(const Grid& intensity);
  std::size_t count() const { return count_; }
  SpeckleStats finish() const;

 private:
  int n_;
  double pitch_;
  int max_lag_;
  std::size_t count_ = 0;
  Grid sum_;
  std::vector<Grid> lag_products_;  // lag k: sum of I(y,x) * I(y,x+k)
  std::vector<double> central_;
};

/// Ensemble statistics; throws ConfigError for fewer than two frames or mixed grids.
SpeckleStats intensity_stats(std::span<const SpeckleFrame> frames, double pixel_pitch);

/// First zero of the field correlation |mu| = sqrt(C), in lag pixels. C is an
/// intensity covariance, which for thermal light equals |mu|^2 and therefore
/// touches zero without crossing it; the zero is located by linear
/// interpolation of the signed amplitude around the first local minimum, or of
/// C itself where C does go negative. Returns NaN when neither happens.
double first_zero_lag(std::span<const double> covariance_profile);

/// Writes a 16-bit P5 frame plus `<path>.meta` holding the intensity scale.
void export_frame_pgm(const SpeckleFrame& frame, const std::filesystem::path& path);

}  // namespace ghost
