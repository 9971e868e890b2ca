#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ghost {

/// Portable graymap raster. Samples are stored row by row.
struct Graymap {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> samples;
};

enum class PgmEncoding { Plain, Binary };  // P2, P5

Graymap parse_pgm(const std::string& bytes);
Graymap read_pgm(const std::filesystem::path& path);

std::string encode_pgm(const Graymap& img, PgmEncoding enc);
void write_pgm(const std::filesystem::path& path, const Graymap& img, PgmEncoding enc);

}  // namespace ghost
