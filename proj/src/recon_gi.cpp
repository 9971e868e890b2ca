#include "ghostbench/recon_gi.hpp"

namespace ghost {

GiImage gi_reconstruct(const MeasurementSet& ms) {
  if (ms.m() < 2) throw ConfigError("GI needs at least two measurements");
  const auto& first = ms.records.front().frame.intensity;
  const double b0 = ms.records.front().bucket;
  // Fluctuations are accumulated relative to the first record (shifted data),
  // which leaves the covariance unchanged and limits cancellation.
  Grid sum_bi = Grid::Zero(first.rows(), first.cols());
  Grid sum_i = Grid::Zero(first.rows(), first.cols());
  double sum_b = 0.0;
  for (const auto& r : ms.records) {
    if (r.frame.intensity.rows() != first.rows() || r.frame.intensity.cols() != first.cols())
      throw ConfigError("frames have mixed geometry");
    const double db = r.bucket - b0;
    sum_bi += db * (r.frame.intensity - first);
    sum_i += r.frame.intensity - first;
    sum_b += db;
  }
  const double m = static_cast<double>(ms.m());
  GiImage img;
  img.values = sum_bi / m - (sum_b / m) * (sum_i / m);
  img.m_used = ms.m();
  if (!img.values.isFinite().all()) throw NumericError("GI estimate is not finite");
  return img;
}

GiImage normalized(const GiImage& img) {
  GiImage out = img;
  out.values = min_max_normalize(img.values);
  out.normalized = true;
  return out;
}

ReconImage to_recon_image(const GiImage& img) {
  return {img.values, Method::GI, "gi m=" + std::to_string(img.m_used)};
}

}  // namespace ghost
