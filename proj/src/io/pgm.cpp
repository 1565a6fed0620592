#include "oaknee/io/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

#include "oaknee/error.hpp"

namespace oaknee::io {

namespace {

class HeaderReader {
 public:
  HeaderReader(const std::vector<std::uint8_t>& bytes, const std::string& source) : b_(bytes), source_(source) {}

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(b_[pos_])) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1u << 30) throw ParseError(source_, start, std::string(what) + " is too large");
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(source_, start, pos_ >= b_.size() ? std::string("truncated header, expected ") + what
                                                         : std::string("expected ") + what);
    }
    return v;
  }

  std::size_t& pos() { return pos_; }

 private:
  const std::vector<std::uint8_t>& b_;
  const std::string& source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

imaging::RasterImage decode_pgm(const std::vector<std::uint8_t>& bytes, double spacing_mm, const std::string& source) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ParseError(source, 0, "not a binary PGM (magic 'P5')");
  HeaderReader h(bytes, source);
  h.pos() = 2;
  if (h.pos() >= bytes.size() || !std::isspace(bytes[h.pos()])) throw ParseError(source, 2, "expected whitespace after magic");
  const std::size_t width = h.number("width");
  const std::size_t height = h.number("height");
  const std::size_t maxval_pos = h.pos();
  const std::size_t maxval = h.number("maxval");
  if (width == 0 || height == 0) throw ParseError(source, maxval_pos, "image dimensions must be positive");
  if (maxval == 0 || maxval > 65535) throw ParseError(source, maxval_pos, "maxval must be in 1..65535");
  if (maxval != 255 && maxval != 65535) {
    throw Unsupported(source + ": maxval " + std::to_string(maxval) + " (only 255 and 65535 are supported)");
  }
  if (h.pos() >= bytes.size() || !std::isspace(bytes[h.pos()])) {
    throw ParseError(source, h.pos(), "expected a single whitespace byte before the raster");
  }
  const std::size_t data = h.pos() + 1;
  const std::size_t bpp = maxval == 255 ? 1 : 2;
  const std::size_t need = width * height * bpp;
  if (bytes.size() - data < need) {
    throw ParseError(source, bytes.size(), "truncated raster: expected " + std::to_string(need) + " bytes, found " +
                                               std::to_string(bytes.size() - data));
  }
  if (bytes.size() - data > need) {
    throw ParseError(source, data + need, "trailing bytes after the raster");
  }
  if (!(spacing_mm > 0.0) || !std::isfinite(spacing_mm)) throw InvalidArgument("pixel spacing must be positive");
  std::vector<double> px(width * height);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = bpp == 1 ? bytes[data + i] : static_cast<double>((bytes[data + 2 * i] << 8) | bytes[data + 2 * i + 1]);
  }
  return imaging::RasterImage(width, height, spacing_mm, bpp == 1 ? imaging::BitDepth::k8 : imaging::BitDepth::k16,
                              std::move(px));
}

imaging::RasterImage read_pgm(const std::filesystem::path& path, double spacing_mm) {
  return decode_pgm(read_file_bytes(path), spacing_mm, path.string());
}

std::vector<std::uint8_t> encode_pgm(const imaging::RasterImage& img) {
  const double maxv = imaging::max_value(img.depth());
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
                             std::to_string(static_cast<int>(maxv)) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = img.depth() == imaging::BitDepth::k16;
  out.reserve(out.size() + img.pixels().size() * (wide ? 2 : 1));
  for (double v : img.pixels()) {
    const auto q = static_cast<unsigned>(std::clamp(std::floor(v + 0.5), 0.0, maxv));
    if (wide) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  return out;
}

void write_pgm(const std::filesystem::path& path, const imaging::RasterImage& img) {
  write_file_bytes(path, encode_pgm(img));
}

}  // namespace oaknee::io
