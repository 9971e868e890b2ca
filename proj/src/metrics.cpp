#include "ghostbench/metrics.hpp"

#include "ghostbench/keyvalue.hpp"

#include <algorithm>
#include <cmath>

namespace ghost {

const char* method_name(Method m) { return m == Method::GI ? "GI" : "GICS"; }

namespace {

void require_same_grid(const Grid& img, const ObjectMask& truth) {
  if (img.rows() != truth.values().rows() || img.cols() != truth.values().cols())
    throw ConfigError("image and truth grids differ");
  if (!img.isFinite().all()) throw NumericError("image contains non-finite values");
}

}  // namespace

Grid min_max_normalize(const Grid& g) {
  const double lo = g.minCoeff();
  const double hi = g.maxCoeff();
  if (!(hi > lo)) return Grid::Zero(g.rows(), g.cols());
  return (g - lo) / (hi - lo);
}

double recon_snr(const Grid& img, const ObjectMask& truth) {
  require_same_grid(img, truth);
  const Grid& t = truth.values();
  double sig_sum = 0.0, bg_sum = 0.0;
  std::size_t sig_n = 0, bg_n = 0;
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    if (t.data()[i] > 0.5) {
      sig_sum += img.data()[i];
      ++sig_n;
    } else {
      bg_sum += img.data()[i];
      ++bg_n;
    }
  }
  if (sig_n == 0 || bg_n == 0) throw ConfigError("SNR needs both object support and background");
  const double sig_mean = sig_sum / static_cast<double>(sig_n);
  const double bg_mean = bg_sum / static_cast<double>(bg_n);
  double bg_var = 0.0;
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    if (!(t.data()[i] > 0.5)) bg_var += (img.data()[i] - bg_mean) * (img.data()[i] - bg_mean);
  }
  const double bg_std = std::sqrt(bg_var / static_cast<double>(bg_n));
  if (!(bg_std > 0.0)) return kDegenerateSnr;
  return (sig_mean - bg_mean) / bg_std;
}

double mse(const Grid& img, const ObjectMask& truth) {
  require_same_grid(img, truth);
  if (!(img.maxCoeff() > img.minCoeff())) {
    // No range to stretch: a flat image is compared at its own level.
    const double level = std::clamp(img(0, 0), 0.0, 1.0);
    return (truth.values() - level).square().mean();
  }
  return (min_max_normalize(img) - truth.values()).square().mean();
}

double psnr(const Grid& img, const ObjectMask& truth) {
  const double e = mse(img, truth);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(e);
}

DipResult slit_dip(const Grid& img, const DoubleSlit& slit, double pitch, double threshold) {
  const int n = static_cast<int>(img.rows());
  if (img.cols() != n) throw ConfigError("image must be square");
  if (!img.isFinite().all()) throw NumericError("image contains non-finite values");

  Eigen::ArrayXd profile = Eigen::ArrayXd::Zero(n);
  int rows = 0;
  for (int y = 0; y < n; ++y) {
    if (std::abs(pixel_center(y, n, pitch) - slit.center_y) < 0.5 * slit.height) {
      profile += img.row(y).transpose();
      ++rows;
    }
  }
  if (rows == 0) throw ConfigError("slit band contains no pixel rows");
  profile /= rows;

  // Fractional pixel index of the pair center.
  const double mid = slit.center_x / pitch + 0.5 * n - 0.5;
  const int lo = std::clamp(static_cast<int>(std::floor(mid)), 0, n - 1);
  const int hi = std::min(lo + 1, n - 1);
  const double frac = mid - lo;
  const double valley = (1.0 - frac) * profile(lo) + frac * profile(hi);

  double left = -std::numeric_limits<double>::infinity();
  double right = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x) {
    const double dx = pixel_center(x, n, pitch) - slit.center_x;
    if (dx < 0.0 && dx >= -slit.separation) left = std::max(left, profile(x));
    if (dx > 0.0 && dx <= slit.separation) right = std::max(right, profile(x));
  }
  const double peak = 0.5 * (left + right);
  const double floor = profile.minCoeff();
  if (!std::isfinite(peak) || !(peak > 0.0) || !(peak - floor > 1e-12 * std::abs(peak)))
    throw NumericError("double-slit peaks not locatable (flat profile)");

  DipResult r;
  r.dip_ratio = valley / peak;
  r.resolved = r.dip_ratio < threshold;
  return r;
}

std::string metrics_csv_header() { return "scenario,lc_m,m,method,seed,snr,mse,psnr,dip_ratio,resolved\n"; }

std::string to_csv_line(const MetricsRow& row) {
  std::string out = row.scenario + "," + format_double(row.lc) + "," + std::to_string(row.m) + "," +
                    method_name(row.method) + "," + std::to_string(row.seed) + "," + format_double(row.snr) + "," +
                    format_double(row.mse) + "," + format_double(row.psnr) + ",";
  if (row.dip) {
    out += format_double(row.dip->dip_ratio) + "," + (row.dip->resolved ? "true" : "false");
  } else {
    out += ",";
  }
  return out + "\n";
}

}  // namespace ghost
