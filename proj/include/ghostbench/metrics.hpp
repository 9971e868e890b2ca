#pragma once

#include "ghostbench/grid.hpp"
#include "ghostbench/optics.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

namespace ghost {

enum class Method { GI, GICS };

const char* method_name(Method m);

/// Reconstructed |T|^2 estimate on the reference grid.
struct ReconImage {
  Grid values;
  Method provenance = Method::GI;
  std::string params_digest;
};

/// Returned by recon_snr when the background is perfectly flat.
inline constexpr double kDegenerateSnr = std::numeric_limits<double>::infinity();

/// Min-max rescale to [0,1]; a constant image maps to all zeros.
Grid min_max_normalize(const Grid& g);

/// (mean over truth > 0.5 - mean over truth <= 0.5) / std over truth <= 0.5.
double recon_snr(const Grid& img, const ObjectMask& truth);
inline double recon_snr(const ReconImage& img, const ObjectMask& truth) { return recon_snr(img.values, truth); }

/// Mean squared error after min-max normalizing `img`. A constant image has no
/// range and is compared at its value clamped to [0,1].
double mse(const Grid& img, const ObjectMask& truth);
inline double mse(const ReconImage& img, const ObjectMask& truth) { return mse(img.values, truth); }

/// -10 log10(mse); +inf when the images agree exactly.
double psnr(const Grid& img, const ObjectMask& truth);
inline double psnr(const ReconImage& img, const ObjectMask& truth) { return psnr(img.values, truth); }

struct DipResult {
  double dip_ratio = 0.0;
  bool resolved = false;
};

inline constexpr double kResolvedDipThreshold = 0.8;

/// Valley-to-peak ratio across a double slit. The horizontal profile is the
/// mean over rows whose centers fall inside the slit band; the valley is the
/// profile interpolated at the pair center and each peak is the profile maximum
/// on its side within one separation of the center.
DipResult slit_dip(const Grid& img, const DoubleSlit& slit, double pitch,
                   double threshold = kResolvedDipThreshold);

/// One line of a scenario metrics table.
struct MetricsRow {
  std::string scenario;
  double lc = 0.0;
  std::size_t m = 0;
  Method method = Method::GI;
  std::uint64_t seed = 0;
  double snr = 0.0;
  double mse = 0.0;
  double psnr = 0.0;
  std::optional<DipResult> dip;
};

std::string metrics_csv_header();
std::string to_csv_line(const MetricsRow& row);

}  // namespace ghost
