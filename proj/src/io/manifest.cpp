#include "oaknee/io/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "oaknee/error.hpp"
#include "oaknee/rng.hpp"

namespace oaknee::io {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string csv_path(const std::filesystem::path& p, const std::filesystem::path& base) {
  std::error_code ec;
  const auto rel = std::filesystem::relative(p, base, ec);
  return (ec || rel.empty()) ? p.generic_string() : rel.generic_string();
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::string& source,
                                          const std::filesystem::path& base_dir) {
  std::string line;
  std::size_t line_no = 0;
  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };
  if (!std::getline(in, line)) throw ParseError(source, 1, "empty manifest (missing header row)");
  ++line_no;
  strip_cr(line);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kManifestHeader) throw ParseError(source, 1, std::string("header must be '") + kManifestHeader + "'");

  std::vector<ManifestEntry> entries;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw ParseError(source, line_no, "expected 7 columns, found " + std::to_string(f.size()));
    }
    ManifestEntry e;
    if (f[0].empty() || f[1].empty()) throw ParseError(source, line_no, "empty file path");
    e.image_path = base_dir / f[0];
    e.points_path = base_dir / f[1];
    e.knee_id = f[2];
    e.subject_id = f[3];
    if (e.knee_id.empty() || e.subject_id.empty()) throw ParseError(source, line_no, "empty knee or subject id");
    if (f[4] != "L" && f[4] != "R") throw ParseError(source, line_no, "side must be L or R, got '" + f[4] + "'");
    e.side = f[4][0];
    {
      const auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), e.kl_grade);
      if (ec != std::errc() || p != f[5].data() + f[5].size() || e.kl_grade < 0 || e.kl_grade > 4) {
        throw ParseError(source, line_no, "kl_grade must be an integer 0..4, got '" + f[5] + "'");
      }
    }
    {
      const auto [p, ec] = std::from_chars(f[6].data(), f[6].data() + f[6].size(), e.spacing_mm);
      if (ec != std::errc() || p != f[6].data() + f[6].size() || !(e.spacing_mm > 0) || !std::isfinite(e.spacing_mm)) {
        throw ParseError(source, line_no, "spacing_mm must be a positive number, got '" + f[6] + "'");
      }
    }
    if (!seen.insert(e.knee_id).second) {
      throw ManifestError(source + ":" + std::to_string(line_no) + ": duplicate knee_id '" + e.knee_id + "'");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in, path.string(), path.parent_path());
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const auto base = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
  out << kManifestHeader << '\n' << std::setprecision(17);
  for (const auto& e : entries) {
    out << csv_path(e.image_path, base) << ',' << csv_path(e.points_path, base) << ',' << e.knee_id << ','
        << e.subject_id << ',' << e.side << ',' << e.kl_grade << ',' << e.spacing_mm << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw InvalidArgument("unknown split '" + name + "' (expected train, val, test)");
}

bool is_validation_subject(const std::string& subject_id, std::uint64_t split_seed, double val_fraction) {
  return unit_interval(derive_seed({fnv1a64(subject_id), split_seed})) < val_fraction;
}

std::vector<ManifestEntry> select_split(const std::vector<ManifestEntry>& entries, Split split,
                                        std::uint64_t split_seed, double val_fraction) {
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw InvalidArgument("val_fraction must lie in [0, 1)");
  if (split == Split::kTest) return entries;
  std::vector<ManifestEntry> out;
  for (const auto& e : entries) {
    if (is_validation_subject(e.subject_id, split_seed, val_fraction) == (split == Split::kVal)) out.push_back(e);
  }
  return out;
}

std::vector<ManifestEntry> load_dataset(const std::filesystem::path& manifest_path, Split split,
                                        std::uint64_t split_seed, double val_fraction) {
  auto entries = select_split(read_manifest(manifest_path), split, split_seed, val_fraction);
  for (const auto& e : entries) {
    for (const auto& p : {e.image_path, e.points_path}) {
      if (!std::filesystem::is_regular_file(p)) {
        throw IoError("knee " + e.knee_id + ": missing file '" + p.string() + "'");
      }
    }
  }
  return entries;
}

}  // namespace oaknee::io
