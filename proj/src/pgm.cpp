#include "ghostbench/pgm.hpp"

#include "ghostbench/grid.hpp"
#include "ghostbench/keyvalue.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ghost {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const unsigned char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > 1'000'000'000) throw ParseError(std::string("graymap: ") + what + " too large");
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("graymap: expected ") + what);
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_space() const {
    return pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]));
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

Graymap parse_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
    throw ParseError("graymap: bad magic (expected P2 or P5)");
  const bool binary = bytes[1] == '5';
  HeaderReader hdr(bytes);
  if (!hdr.at_space()) throw ParseError("graymap: missing whitespace after magic");

  Graymap img;
  img.width = static_cast<int>(hdr.number("width"));
  img.height = static_cast<int>(hdr.number("height"));
  const long maxval = hdr.number("maxval");
  if (img.width <= 0 || img.height <= 0) throw ParseError("graymap: zero dimension");
  if (maxval < 1 || maxval > 65535) throw ParseError("graymap: maxval out of range");
  img.maxval = static_cast<int>(maxval);

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.samples.resize(count);

  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (!hdr.at_space()) throw ParseError("graymap: missing whitespace before raster");
    hdr.advance();
    const std::size_t bps = img.maxval > 255 ? 2 : 1;
    if (bytes.size() - hdr.pos() < count * bps) throw ParseError("graymap: truncated raster");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + hdr.pos());
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned v = bps == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
      if (v > static_cast<unsigned>(img.maxval)) throw ParseError("graymap: sample exceeds maxval");
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = hdr.number("sample");
      if (v > img.maxval) throw ParseError("graymap: sample exceeds maxval");
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

Graymap read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open graymap '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_pgm(ss.str());
}

std::string encode_pgm(const Graymap& img, PgmEncoding enc) {
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  if (img.samples.size() != count) throw std::invalid_argument("graymap: sample count mismatch");
  std::string out = (enc == PgmEncoding::Binary ? "P5\n" : "P2\n") + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n" + std::to_string(img.maxval) + "\n";
  if (enc == PgmEncoding::Binary) {
    const bool wide = img.maxval > 255;
    out.reserve(out.size() + count * (wide ? 2 : 1));
    for (auto v : img.samples) {
      if (wide) out.push_back(static_cast<char>(v >> 8));
      out.push_back(static_cast<char>(v & 0xff));
    }
  } else {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        if (x) out.push_back(' ');
        out += std::to_string(img.samples[static_cast<std::size_t>(y) * img.width + x]);
      }
      out.push_back('\n');
    }
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const Graymap& img, PgmEncoding enc) {
  write_file_atomic(path, encode_pgm(img, enc));
}

}  // namespace ghost
