#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace oaknee::io {

inline constexpr const char* kManifestHeader = "image_path,points_path,knee_id,subject_id,side,kl_grade,spacing_mm";

struct ManifestEntry {
  std::filesystem::path image_path;  // resolved against the manifest's directory
  std::filesystem::path points_path;
  std::string knee_id;
  std::string subject_id;
  char side = 'L';
  int kl_grade = 0;
  double spacing_mm = 0.2;

  /// Radiographic OA: KL >= 2.
  int label() const noexcept { return kl_grade >= 2 ? 1 : 0; }
};

/// Parses a manifest CSV (mandatory header row, LF or CRLF line ends).
/// Relative paths are resolved against `base_dir`. Duplicate knee ids raise
/// ManifestError; malformed rows raise ParseError with the line number.
std::vector<ManifestEntry> parse_manifest(std::istream& in, const std::string& source,
                                          const std::filesystem::path& base_dir);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Writes paths relative to the manifest's directory when possible.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

enum class Split { kTrain, kVal, kTest };

Split parse_split(const std::string& name);

/// True when a subject is held out for validation: a hash of (subject id,
/// seed) mapped to [0, 1) falls below `val_fraction`.
bool is_validation_subject(const std::string& subject_id, std::uint64_t split_seed, double val_fraction);

/// Entries of one split. Train and val partition the manifest by subject;
/// test returns the whole (separate) manifest.
std::vector<ManifestEntry> select_split(const std::vector<ManifestEntry>& entries, Split split,
                                        std::uint64_t split_seed, double val_fraction);

/// read_manifest + select_split, then checks that every referenced file
/// exists (IoError naming the knee otherwise).
std::vector<ManifestEntry> load_dataset(const std::filesystem::path& manifest_path, Split split,
                                        std::uint64_t split_seed, double val_fraction);

}  // namespace oaknee::io
