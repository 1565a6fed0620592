#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "oaknee/models/trained_model.hpp"

namespace oaknee::io {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout (little-endian):
///   "OAKN" | u32 version | str arch | str feature_tag
///   | u32 n_tensors | { str name | u8 dtype | u32 rank | u64 dims[rank] | data }
///   | u32 n_meta | { str key | str value }
///   | u32 crc32 of all preceding bytes
/// where str = u32 length + bytes.
std::vector<std::uint8_t> encode_checkpoint(const models::TrainedModel& model);
/// Throws CheckpointError on bad magic, unknown version, checksum mismatch
/// or any structural inconsistency.
models::TrainedModel decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const models::TrainedModel& model);
models::TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace oaknee::io
