#pragma once

#include "ghostbench/forward.hpp"
#include "ghostbench/metrics.hpp"

namespace ghost {

/// Intensity-fluctuation correlation estimate, arbitrary units.
struct GiImage {
  Grid values;
  std::size_t m_used = 0;
  bool normalized = false;
};

/// <B I(x,y)> - <B><I(x,y)> over the records, accumulated in frame order.
/// Negative estimator noise is kept. Throws ConfigError when m < 2.
GiImage gi_reconstruct(const MeasurementSet& ms);

/// Min-max rescaled copy for display.
GiImage normalized(const GiImage& img);

ReconImage to_recon_image(const GiImage& img);

}  // namespace ghost
