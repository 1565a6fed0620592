#include "oaknee/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <zlib.h>

#include "oaknee/error.hpp"
#include "oaknee/io/pgm.hpp"

namespace oaknee::io {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& b, std::size_t end) : b_(b), end_(end) {}

  template <typename T>
  T pod(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(const char* what) {
    const auto n = pod<std::uint32_t>(what);
    need(n, what);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void need(std::size_t n, const char* what) const {
    if (n > end_ - pos_) {
      throw CheckpointError(std::string("truncated checkpoint while reading ") + what + " at byte " +
                            std::to_string(pos_));
    }
  }
  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::vector<std::uint8_t>& b_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (n > 0) {
    const auto piece = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, piece);
    data += piece;
    n -= piece;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const models::TrainedModel& model) {
  Writer w;
  w.bytes = {'O', 'A', 'K', 'N'};
  w.pod(kCheckpointVersion);
  w.str(models::arch_tag(model.arch));
  w.str(model.feature_tag);
  w.pod(static_cast<std::uint32_t>(model.tensors.size()));
  for (const auto& t : model.tensors) {
    if (nn::shape_size(t.shape) != t.values.size()) throw CheckpointError("tensor '" + t.name + "' shape/data mismatch");
    w.str(t.name);
    w.pod(static_cast<std::uint8_t>(t.dtype));
    w.pod(static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) w.pod(static_cast<std::uint64_t>(d));
    for (double v : t.values) {
      if (t.dtype == models::DType::kF32) {
        w.pod(static_cast<float>(v));
      } else {
        w.pod(v);
      }
    }
  }
  w.pod(static_cast<std::uint32_t>(model.metadata.size()));
  for (const auto& [k, v] : model.metadata) {
    w.str(k);
    w.str(v);
  }
  w.pod(crc_of(w.bytes.data(), w.bytes.size()));
  return std::move(w.bytes);
}

models::TrainedModel decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "OAKN", 4) != 0) {
    throw CheckpointError("bad magic (not an OAKN checkpoint)");
  }
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 4, 4);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (crc_of(bytes.data(), body) != stored) throw CheckpointError("checksum mismatch");

  Reader r(bytes, body);
  r.skip(8);
  models::TrainedModel m;
  try {
    m.arch = models::parse_arch(r.str("architecture tag"));
  } catch (const InvalidArgument& e) {
    throw CheckpointError(e.what());
  }
  m.feature_tag = r.str("feature tag");
  const auto n_tensors = r.pod<std::uint32_t>("tensor count");
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    models::TensorRecord t;
    t.name = r.str("tensor name");
    const auto dtype = r.pod<std::uint8_t>("dtype");
    if (dtype != 1 && dtype != 2) throw CheckpointError("tensor '" + t.name + "' has unknown dtype " + std::to_string(dtype));
    t.dtype = static_cast<models::DType>(dtype);
    const auto rank = r.pod<std::uint32_t>("rank");
    if (rank > 8) throw CheckpointError("tensor '" + t.name + "' has implausible rank " + std::to_string(rank));
    std::size_t count = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      const auto d = r.pod<std::uint64_t>("dimension");
      if (d > body) throw CheckpointError("tensor '" + t.name + "' dimension exceeds file size");
      t.shape.push_back(static_cast<std::size_t>(d));
      count *= static_cast<std::size_t>(d);
      if (count > body) throw CheckpointError("tensor '" + t.name + "' exceeds file size");
    }
    const std::size_t width = dtype == 1 ? 4 : 8;
    r.need(count * width, "tensor data");
    t.values.resize(count);
    for (auto& v : t.values) v = dtype == 1 ? static_cast<double>(r.pod<float>("tensor data")) : r.pod<double>("tensor data");
    m.tensors.push_back(std::move(t));
  }
  const auto n_meta = r.pod<std::uint32_t>("metadata count");
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    auto k = r.str("metadata key");
    m.metadata[k] = r.str("metadata value");
  }
  if (r.pos() != body) throw CheckpointError("unexpected bytes before the checksum");
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const models::TrainedModel& model) {
  write_file_bytes(path, encode_checkpoint(model));
}

models::TrainedModel load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("checkpoint '" + path.string() + "' does not exist");
  return decode_checkpoint(read_file_bytes(path));
}

}  // namespace oaknee::io
