#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "oaknee/geometry/geometry.hpp"

namespace oaknee::io {

/// Reads a landmark file:
///   version: 1
///   n_points: N
///   {
///   x y        (N lines, millimeters)
///   }
/// Trailing blank lines are allowed; anything else is a ParseError with the
/// offending line number.
std::vector<geometry::Point2D> read_points(const std::filesystem::path& path);
std::vector<geometry::Point2D> parse_points(std::istream& in, const std::string& source);

/// Writes with round-trip precision.
void write_points(const std::filesystem::path& path, const std::vector<geometry::Point2D>& points);

/// Role-index JSON: {"femur_indices": [...], "tibia_indices": [...],
/// "plateau_pair": [a, b], "tibia_extent_pair": [medial, lateral]}.
geometry::LandmarkRoles read_roles(const std::filesystem::path& path);
geometry::LandmarkRoles parse_roles(const std::string& text, const std::string& source);
void write_roles(const std::filesystem::path& path, const geometry::LandmarkRoles& roles);

}  // namespace oaknee::io
