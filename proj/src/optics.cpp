#include "ghostbench/optics.hpp"

#include "ghostbench/keyvalue.hpp"
#include "ghostbench/pgm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ghost {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be a positive finite length");
}

}  // namespace

void OpticalConfig::validate() const {
  require_positive(wavelength, "wavelength");
  require_positive(z_source_to_object, "z_source_to_object");
  require_positive(z_source_to_reference, "z_source_to_reference");
  require_positive(source_width, "source_width");
  require_positive(pixel_pitch, "pixel_pitch");
  if (grid_n < 8) throw ConfigError("grid_n must be at least 8");
  if (source_samples_min < 8) throw ConfigError("source_samples_min must be at least 8");
  const double lc = wavelength * z_source_to_object / source_width;
  if (lc < 2.0 * pixel_pitch)
    throw ConfigError("coherence length " + format_double(lc) + " m is below two pixels (" +
                      format_double(2.0 * pixel_pitch) + " m); speckle would be unresolved");
}

OpticalConfig OpticalConfig::for_coherence_length(double lc, double wavelength, double z, double z1,
                                                  int grid_n, double pixel_pitch) {
  require_positive(lc, "coherence length");
  OpticalConfig c;
  c.wavelength = wavelength;
  c.z_source_to_object = z;
  c.z_source_to_reference = z1;
  c.source_width = wavelength * z / lc;
  c.grid_n = grid_n;
  c.pixel_pitch = pixel_pitch;
  c.validate();
  return c;
}

OpticalConfig OpticalConfig::from_key_values(const KeyValueFile& kv) {
  kv.require_known({"wavelength_m", "z_m", "z1_m", "source_width_m", "grid_n", "pixel_pitch_m"});
  OpticalConfig c;
  c.wavelength = kv.number("wavelength_m");
  c.z_source_to_object = kv.number("z_m");
  c.z_source_to_reference = kv.number("z1_m");
  c.source_width = kv.number("source_width_m");
  c.grid_n = static_cast<int>(kv.integer("grid_n"));
  c.pixel_pitch = kv.number("pixel_pitch_m");
  c.validate();
  return c;
}

OpticalConfig OpticalConfig::load(const std::filesystem::path& path) {
  return from_key_values(KeyValueFile::load(path));
}

std::string OpticalConfig::to_key_values() const {
  std::ostringstream out;
  out << "wavelength_m=" << format_double(wavelength) << "\n"
      << "z_m=" << format_double(z_source_to_object) << "\n"
      << "z1_m=" << format_double(z_source_to_reference) << "\n"
      << "source_width_m=" << format_double(source_width) << "\n"
      << "grid_n=" << grid_n << "\n"
      << "pixel_pitch_m=" << format_double(pixel_pitch) << "\n";
  return out.str();
}

double coherence_length(const OpticalConfig& config) {
  return config.wavelength * config.z_source_to_object / config.source_width;
}

ObjectMask::ObjectMask(Grid values, double pitch) : values_(std::move(values)), pitch_(pitch) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) throw ConfigError("mask must be a non-empty square grid");
  if (!(pitch_ > 0.0)) throw ConfigError("mask pitch must be positive");
  if (!values_.isFinite().all() || values_.minCoeff() < 0.0 || values_.maxCoeff() > 1.0)
    throw ConfigError("mask values must lie in [0,1]");
  if (!(values_.maxCoeff() > 0.0)) throw ConfigError("mask is entirely opaque");
}

ObjectMask make_double_slit(const OpticalConfig& config, const DoubleSlit& slit) {
  config.validate();
  if (!(slit.width > 0.0) || !(slit.height > 0.0)) throw ConfigError("slit width and height must be positive");
  if (slit.separation <= slit.width) throw ConfigError("slits overlap: separation must exceed slit width");
  const double half_fov = 0.5 * config.field_of_view();
  const double x_extent = std::abs(slit.center_x) + 0.5 * (slit.separation + slit.width);
  const double y_extent = std::abs(slit.center_y) + 0.5 * slit.height;
  if (x_extent > half_fov || y_extent > half_fov) throw ConfigError("double slit does not fit inside the grid");

  const int n = config.grid_n;
  const double p = config.pixel_pitch;
  const std::array<double, 2> slit_x{slit.center_x - 0.5 * slit.separation, slit.center_x + 0.5 * slit.separation};
  Grid g = Grid::Zero(n, n);
  for (int iy = 0; iy < n; ++iy) {
    const double y = pixel_center(iy, n, p);
    if (!(std::abs(y - slit.center_y) < 0.5 * slit.height)) continue;
    for (int ix = 0; ix < n; ++ix) {
      const double x = pixel_center(ix, n, p);
      for (double sx : slit_x) {
        if (std::abs(x - sx) < 0.5 * slit.width) g(iy, ix) = 1.0;
      }
    }
  }
  return ObjectMask(std::move(g), p);
}

namespace {

// 5 columns x 7 rows, MSB = leftmost column.
const std::array<unsigned char, 7>* glyph(char c) {
  static const std::array<unsigned char, 7> S{0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110};
  static const std::array<unsigned char, 7> I{0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b11111};
  static const std::array<unsigned char, 7> O{0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110};
  static const std::array<unsigned char, 7> M{0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001};
  static const std::array<unsigned char, 7> space{0, 0, 0, 0, 0, 0, 0};
  switch (c) {
    case 'S': return &S;
    case 'I': return &I;
    case 'O': return &O;
    case 'M': return &M;
    case ' ': return &space;
    default: return nullptr;
  }
}

}  // namespace

ObjectMask make_block_text(const OpticalConfig& config, std::string_view text, double letter_height) {
  config.validate();
  if (text.empty()) throw ConfigError("empty text");
  if (!(letter_height > 0.0)) throw ConfigError("letter height must be positive");
  const double cell = letter_height / 7.0;
  const int columns = static_cast<int>(text.size()) * 6 - 1;  // one blank column between glyphs
  const double width = columns * cell;
  const double half_fov = 0.5 * config.field_of_view();
  if (0.5 * width > half_fov || 0.5 * letter_height > half_fov) throw ConfigError("text does not fit inside the grid");

  const int n = config.grid_n;
  const double p = config.pixel_pitch;
  Grid g = Grid::Zero(n, n);
  for (int iy = 0; iy < n; ++iy) {
    const double y = pixel_center(iy, n, p) + 0.5 * letter_height;
    if (y < 0.0 || y >= letter_height) continue;
    const int row = static_cast<int>(y / cell);
    for (int ix = 0; ix < n; ++ix) {
      const double x = pixel_center(ix, n, p) + 0.5 * width;
      if (x < 0.0 || x >= width) continue;
      const int col = static_cast<int>(x / cell);
      const int letter = col / 6;
      const int gx = col % 6;
      if (gx == 5) continue;
      const auto* gl = glyph(text[static_cast<std::size_t>(letter)]);
      if (!gl) throw ConfigError(std::string("unsupported glyph '") + text[static_cast<std::size_t>(letter)] + "'");
      if (((*gl)[static_cast<std::size_t>(row)] >> (4 - gx)) & 1u) g(iy, ix) = 1.0;
    }
  }
  return ObjectMask(std::move(g), p);
}

ObjectMask load_mask_pgm(const std::filesystem::path& path, const OpticalConfig& config) {
  const Graymap img = read_pgm(path);
  if (img.width != img.height) throw ConfigError("graymap mask must be square");
  if (img.width != config.grid_n)
    throw ConfigError("graymap mask is " + std::to_string(img.width) + " pixels wide but grid_n is " +
                      std::to_string(config.grid_n));
  Grid g(img.height, img.width);
  bool any = false;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const auto v = img.samples[static_cast<std::size_t>(y) * img.width + x];
      any = any || v != 0;
      g(y, x) = static_cast<double>(v) / img.maxval;
    }
  }
  if (!any) throw ConfigError("graymap mask is entirely opaque");
  return ObjectMask(std::move(g), config.pixel_pitch);
}

void save_grid_pgm(const std::filesystem::path& path, const Grid& values, int maxval) {
  if (maxval < 1 || maxval > 65535) throw std::invalid_argument("maxval out of range");
  Graymap img;
  img.width = static_cast<int>(values.cols());
  img.height = static_cast<int>(values.rows());
  img.maxval = maxval;
  img.samples.resize(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = std::clamp(values.data()[i], 0.0, 1.0);
    img.samples[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(std::lround(v * maxval));
  }
  write_pgm(path, img, PgmEncoding::Binary);
}

}  // namespace ghost
