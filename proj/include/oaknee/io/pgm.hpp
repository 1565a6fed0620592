#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oaknee/imaging/imaging.hpp"

namespace oaknee::io {

/// Binary P5 PGM. maxval 255 gives an 8-bit image, 65535 a 16-bit image
/// (big-endian samples); any other valid maxval is Unsupported. PGM has no
/// spacing field, so the caller supplies it.
imaging::RasterImage read_pgm(const std::filesystem::path& path, double spacing_mm);
imaging::RasterImage decode_pgm(const std::vector<std::uint8_t>& bytes, double spacing_mm, const std::string& source);

/// Pixels are rounded half-up and clamped to the depth range.
void write_pgm(const std::filesystem::path& path, const imaging::RasterImage& img);
std::vector<std::uint8_t> encode_pgm(const imaging::RasterImage& img);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace oaknee::io
