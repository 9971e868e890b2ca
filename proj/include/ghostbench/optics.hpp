#pragma once

#include "ghostbench/grid.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace ghost {

class KeyValueFile;

/// Physical geometry of the two-arm setup. All lengths are in meters.
///
/// The reference plane is taken optically conjugate to the object plane, so
/// `z_source_to_reference` is carried for the record but never used numerically.
struct OpticalConfig {
  double wavelength = 650e-9;
  double z_source_to_object = 0.400;
  double z_source_to_reference = 0.500;
  double source_width = 0.0;  // side D of the square emitting aperture
  int grid_n = 100;
  double pixel_pitch = 15e-6;
  /// Minimum number of source-plane samples across D used by speckle synthesis.
  int source_samples_min = 16;

  /// Throws ConfigError when any invariant is violated.
  void validate() const;

  double field_of_view() const { return grid_n * pixel_pitch; }

  /// Config whose source width produces coherence length `lc` on the object plane.
  static OpticalConfig for_coherence_length(double lc, double wavelength = 650e-9,
                                            double z = 0.400, double z1 = 0.500,
                                            int grid_n = 100, double pixel_pitch = 15e-6);

  /// Reads the flat config format with keys wavelength_m, z_m, z1_m,
  /// source_width_m, grid_n, pixel_pitch_m.
  static OpticalConfig from_key_values(const KeyValueFile& kv);
  static OpticalConfig load(const std::filesystem::path& path);
  std::string to_key_values() const;
};

/// l_c = wavelength * z / D.
double coherence_length(const OpticalConfig& config);

/// Intensity transmittance |T|^2 sampled on the object grid.
class ObjectMask {
 public:
  /// Throws ConfigError if any value leaves [0,1] or the mask is entirely opaque.
  ObjectMask(Grid values, double pitch);

  const Grid& values() const { return values_; }
  double pitch() const { return pitch_; }
  int size() const { return static_cast<int>(values_.rows()); }

 private:
  Grid values_;
  double pitch_;
};

/// Two vertical slits; all lengths in meters. `center_x`/`center_y` offset the
/// slit pair from the grid center.
struct DoubleSlit {
  double width = 0.1e-3;
  double height = 1.0e-3;
  double separation = 0.2e-3;
  double center_x = 0.0;
  double center_y = 0.0;
};

/// Physical coordinate of the center of pixel `i` relative to the grid center.
inline double pixel_center(int i, int grid_n, double pitch) {
  return (i + 0.5 - 0.5 * grid_n) * pitch;
}

/// Binary mask, pixel set iff its center lies strictly inside a slit rectangle.
ObjectMask make_double_slit(const OpticalConfig& config, const DoubleSlit& slit);

/// Block-letter transmission aperture (5x7 glyphs; supports S, I, O, M and
/// space), centered on the grid with the given total letter height in meters.
ObjectMask make_block_text(const OpticalConfig& config, std::string_view text, double letter_height);

/// Loads a P2/P5 graymap whose side must equal `grid_n`; values are sample/maxval.
ObjectMask load_mask_pgm(const std::filesystem::path& path, const OpticalConfig& config);

/// Quantizes a [0,1] grid to `maxval` levels.
void save_grid_pgm(const std::filesystem::path& path, const Grid& values, int maxval = 255);

}  // namespace ghost
