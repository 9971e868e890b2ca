#include "ghostbench/keyvalue.hpp"
#include "ghostbench/pgm.hpp"
#include "ghostbench/speckle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace ghost;

namespace {

OpticalConfig small_config(double lc, int grid_n = 64) {
  return OpticalConfig::for_coherence_length(lc, 650e-9, 0.4, 0.5, grid_n, 15e-6);
}

std::vector<SpeckleFrame> ensemble(const OpticalConfig& c, std::uint64_t seed, int count) {
  SpeckleSynthesizer synth(c);
  std::vector<SpeckleFrame> frames;
  for (int i = 1; i <= count; ++i) frames.push_back(synth.frame(seed, static_cast<std::uint64_t>(i)));
  return frames;
}

double sinc2(double x) {
  if (x == 0.0) return 1.0;
  const double s = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
  return s * s;
}

}  // namespace

TEST(SourceSampling, GridCoversFieldAndCoherenceIsClose) {
  for (double lc : {276.7e-6, 135.5e-6, 68.8e-6, 40e-6}) {
    const auto c = OpticalConfig::for_coherence_length(lc);
    const auto s = plan_source_sampling(c);
    EXPECT_GE(s.dft_length, c.grid_n);
    EXPECT_GE(s.samples_across, c.source_samples_min);
    // dft_length is the rounded product samples_across * l_c / pitch.
    EXPECT_LE(std::abs(s.effective_coherence_length - lc), 0.5 * c.pixel_pitch / s.samples_across + 1e-15);
    EXPECT_NEAR(s.effective_aperture, c.source_width, c.source_width * 0.5 / s.samples_across + 1e-15);
  }
}

TEST(Speckle, FrameIsDeterministicAndIndexed) {
  const auto c = small_config(100e-6, 32);
  const auto a = synthesize_frame(c, 7, 3);
  const auto b = synthesize_frame(c, 7, 3);
  EXPECT_TRUE((a.intensity == b.intensity).all());
  EXPECT_EQ(a.seed, 7u);
  EXPECT_EQ(a.frame_index, 3u);
  EXPECT_FALSE((a.intensity == synthesize_frame(c, 7, 4).intensity).all());
  EXPECT_FALSE((a.intensity == synthesize_frame(c, 8, 3).intensity).all());
}

TEST(Speckle, FramesAreNonnegativeWithPositiveMean) {
  const auto c = small_config(68.8e-6, 48);
  for (const auto& f : ensemble(c, 1, 20)) {
    EXPECT_EQ(f.intensity.rows(), 48);
    EXPECT_GE(f.intensity.minCoeff(), 0.0);
    EXPECT_GT(f.intensity.mean(), 0.0);
  }
}

TEST(Speckle, MeanIntensityIsNearUnity) {
  const auto frames = ensemble(small_config(100e-6), 2, 300);
  const auto st = intensity_stats(frames, 15e-6);
  EXPECT_NEAR(st.mean_intensity, 1.0, 0.05);
}

TEST(SpeckleStats, RequiresTwoFrames) {
  const auto frames = ensemble(small_config(100e-6, 32), 1, 1);
  EXPECT_THROW(intensity_stats(frames, 15e-6), ConfigError);
  EXPECT_THROW(intensity_stats({}, 15e-6), ConfigError);
}

TEST(SpeckleStats, RejectsMixedGrids) {
  std::vector<SpeckleFrame> frames = ensemble(small_config(100e-6, 32), 1, 2);
  frames.push_back(synthesize_frame(small_config(100e-6, 40), 1, 3));
  EXPECT_THROW(intensity_stats(frames, 15e-6), ConfigError);
}

TEST(SpeckleStats, DuplicatedFrameHasZeroContrast) {
  const auto one = synthesize_frame(small_config(100e-6, 32), 1, 1);
  std::vector<SpeckleFrame> frames(10, one);
  const auto st = intensity_stats(frames, 15e-6);
  EXPECT_EQ(st.contrast, 0.0);
  EXPECT_EQ(st.covariance_profile.front(), 1.0);
}

TEST(SpeckleStats, ProfileStartsAtOne) {
  const auto st = intensity_stats(ensemble(small_config(100e-6), 3, 100), 15e-6);
  ASSERT_FALSE(st.covariance_profile.empty());
  EXPECT_EQ(st.covariance_profile[0], 1.0);
  EXPECT_GE(st.contrast, 0.0);
}

TEST(SpeckleStats, ProfileFollowsSincSquared) {
  const double lc = 135.5e-6;
  const auto c = small_config(lc);
  const auto st = intensity_stats(ensemble(c, 4, 600), c.pixel_pitch);
  const double lc_px = plan_source_sampling(c).effective_coherence_length / c.pixel_pitch;
  for (std::size_t k = 0; k < 12; ++k) {
    EXPECT_NEAR(st.covariance_profile[k], sinc2(static_cast<double>(k) / lc_px), 0.05) << "lag " << k;
  }
}

TEST(SpeckleStats, MeasuredLengthScalesInverselyWithAperture) {
  OpticalConfig narrow = small_config(276.7e-6, 80);
  OpticalConfig wide = narrow;
  wide.source_width *= 2.0;
  const double a = intensity_stats(ensemble(narrow, 5, 400), narrow.pixel_pitch).measured_lc;
  const double b = intensity_stats(ensemble(wide, 5, 400), wide.pixel_pitch).measured_lc;
  EXPECT_NEAR(a / b, 2.0, 0.2);
}

TEST(SpeckleStats, DistinctFramesAreUncorrelated) {
  const int n = 64;
  const auto frames = ensemble(small_config(68.8e-6, n), 6, 201);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    const Grid a = frames[i].intensity - frames[i].intensity.mean();
    const Grid b = frames[i + 1].intensity - frames[i + 1].intensity.mean();
    sum += (a * b).sum() / std::sqrt(a.square().sum() * b.square().sum());
  }
  const double mean_rho = sum / static_cast<double>(frames.size() - 1);
  EXPECT_LE(std::abs(mean_rho), 3.0 / n);
}

TEST(FirstZeroLag, SampledSincSquared) {
  for (double zero : {4.6, 7.3, 9.03, 18.45}) {
    std::vector<double> c;
    for (int k = 0; k <= 50; ++k) c.push_back(sinc2(k / zero));
    EXPECT_NEAR(first_zero_lag(c), zero, 0.05 * zero) << zero;
  }
}

TEST(FirstZeroLag, SignChangeUsesLinearInterpolation) {
  const std::vector<double> c{1.0, 0.5, 0.1, -0.3, -0.2};
  EXPECT_DOUBLE_EQ(first_zero_lag(c), 2.25);
  const std::vector<double> exact{1.0, 0.4, 0.0, 0.2};
  EXPECT_DOUBLE_EQ(first_zero_lag(exact), 2.0);
}

TEST(FirstZeroLag, MonotoneProfileHasNoZero) {
  const std::vector<double> c{1.0, 0.9, 0.8, 0.7};
  EXPECT_TRUE(std::isnan(first_zero_lag(c)));
}

TEST(ExportFrame, RoundTripsWithinOneCount) {
  const auto dir = std::filesystem::temp_directory_path() / "ghostbench_speckle_export";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto f = synthesize_frame(small_config(100e-6, 32), 11, 2);
  export_frame_pgm(f, dir / "frame.pgm");
  const auto img = read_pgm(dir / "frame.pgm");
  const auto meta = KeyValueFile::load(dir / "frame.pgm.meta");
  EXPECT_EQ(img.maxval, 65535);
  EXPECT_EQ(meta.integer("master_seed"), 11);
  EXPECT_EQ(meta.integer("frame_index"), 2);
  const double per_count = meta.number("intensity_per_count");
  for (Eigen::Index i = 0; i < f.intensity.size(); ++i) {
    EXPECT_NEAR(img.samples[static_cast<std::size_t>(i)] * per_count, f.intensity.data()[i], 0.5 * per_count + 1e-12);
  }
}
