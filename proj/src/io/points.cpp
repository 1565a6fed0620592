#include "oaknee/io/points.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "oaknee/error.hpp"

namespace oaknee::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

std::string header_value(const std::string& line, const std::string& key, const std::string& source,
                         std::size_t line_no) {
  const std::string prefix = key + ":";
  if (line.rfind(prefix, 0) != 0) throw ParseError(source, line_no, "expected '" + prefix + " ...'");
  const std::string v = trim(line.substr(prefix.size()));
  if (v.empty()) throw ParseError(source, line_no, "missing value for '" + key + "'");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

std::vector<std::size_t> index_array(const nlohmann::json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw ParseError(source, 0, std::string("missing key '") + key + "'");
  const auto& a = j.at(key);
  if (!a.is_array()) throw ParseError(source, 0, std::string("'") + key + "' must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : a) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ParseError(source, 0, std::string("'") + key + "' must hold non-negative integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::array<std::size_t, 2> index_pair(const nlohmann::json& j, const char* key, const std::string& source) {
  const auto v = index_array(j, key, source);
  if (v.size() != 2) throw ParseError(source, 0, std::string("'") + key + "' must have exactly two entries");
  return {v[0], v[1]};
}

}  // namespace

std::vector<geometry::Point2D> parse_points(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(source, line_no + 1, std::string("unexpected end of file, ") + what);
    ++line_no;
    line = trim(line);
  };

  next("expected version header");
  if (header_value(line, "version", source, line_no) != "1") {
    throw ParseError(source, line_no, "unsupported version '" + header_value(line, "version", source, line_no) + "'");
  }
  next("expected n_points header");
  const std::string count_text = header_value(line, "n_points", source, line_no);
  std::size_t count = 0;
  {
    const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc() || ptr != count_text.data() + count_text.size()) {
      throw ParseError(source, line_no, "n_points is not a non-negative integer: '" + count_text + "'");
    }
  }
  next("expected '{'");
  if (line != "{") throw ParseError(source, line_no, "expected '{'");

  std::vector<geometry::Point2D> points;
  while (true) {
    if (!std::getline(in, line)) {
      throw ParseError(source, line_no + 1, "missing closing '}' (read " + std::to_string(points.size()) + " of " +
                                                std::to_string(count) + " points)");
    }
    ++line_no;
    line = trim(line);
    if (line == "}") break;
    const auto tokens = split_ws(line);
    geometry::Point2D p;
    if (tokens.size() != 2 || !parse_number(tokens[0], p.x) || !parse_number(tokens[1], p.y)) {
      throw ParseError(source, line_no, "expected two finite numbers, got '" + line + "'");
    }
    if (points.size() == count) {
      throw ParseError(source, line_no, "count mismatch: header says " + std::to_string(count) + " points, found more");
    }
    points.push_back(p);
  }
  if (points.size() != count) {
    throw ParseError(source, line_no, "count mismatch: header says " + std::to_string(count) + " points, found " +
                                          std::to_string(points.size()));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) throw ParseError(source, line_no, "unexpected content after '}'");
  }
  return points;
}

std::vector<geometry::Point2D> read_points(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_points(in, path.string());
}

void write_points(const std::filesystem::path& path, const std::vector<geometry::Point2D>& points) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "version: 1\nn_points: " << points.size() << "\n{\n" << std::setprecision(17);
  for (const auto& p : points) out << p.x << ' ' << p.y << '\n';
  out << "}\n";
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

geometry::LandmarkRoles parse_roles(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, e.byte, "invalid JSON");
  }
  if (!j.is_object()) throw ParseError(source, 0, "roles must be a JSON object");
  geometry::LandmarkRoles r;
  r.femur_indices = index_array(j, "femur_indices", source);
  r.tibia_indices = index_array(j, "tibia_indices", source);
  r.plateau_pair = index_pair(j, "plateau_pair", source);
  r.tibia_extent_pair = index_pair(j, "tibia_extent_pair", source);
  return r;
}

geometry::LandmarkRoles read_roles(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_roles(ss.str(), path.string());
}

void write_roles(const std::filesystem::path& path, const geometry::LandmarkRoles& roles) {
  nlohmann::json j;
  j["femur_indices"] = roles.femur_indices;
  j["tibia_indices"] = roles.tibia_indices;
  j["plateau_pair"] = roles.plateau_pair;
  j["tibia_extent_pair"] = roles.tibia_extent_pair;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace oaknee::io
