// SPDX-License-Identifier: Apache-2.0
#include "thermolion/idx.hpp"

#include <zlib.h>

#include <fstream>
#include <stdexcept>

namespace thermolion {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

bool has_gz_suffix(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  if (has_gz_suffix(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr)
      throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes;
    std::uint8_t chunk[1 << 16];
    int got;
    while ((got = gzread(f, chunk, sizeof(chunk))) > 0)
      bytes.insert(bytes.end(), chunk, chunk + got);
    const bool bad = got < 0;
    gzclose(f);
    if (bad) throw std::runtime_error("gzip decompression failed for '" + path + "'");
    return bytes;
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class BigEndianReader {
 public:
  BigEndianReader(std::vector<std::uint8_t> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint32_t read_u32() {
    if (pos_ + 4 > bytes_.size())
      throw std::runtime_error("'" + path_ + "': truncated header (need " +
                               std::to_string(pos_ + 4) + " bytes, have " +
                               std::to_string(bytes_.size()) + ")");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::span<const std::uint8_t> read_payload(std::size_t n) {
    if (pos_ + n != bytes_.size())
      throw std::runtime_error("'" + path_ + "': payload length mismatch (expected " +
                               std::to_string(pos_ + n) + " bytes total, have " +
                               std::to_string(bytes_.size()) + ")");
    return {bytes_.data() + pos_, n};
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

void check_magic(std::uint32_t found, std::uint32_t expected,
                 const std::string& path) {
  if (found != expected) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "'%s': bad IDX magic (expected 0x%08x, found 0x%08x)",
                  path.c_str(), expected, found);
    throw std::runtime_error(buf);
  }
}

void write_u32_be(std::ofstream& f, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
  f.write(bytes, 4);
}

}  // namespace

double normalize_pixel(std::uint8_t p) {
  return static_cast<double>(p) / 127.5 - 1.0;
}

IdxImageData load_idx_images(const std::string& path) {
  BigEndianReader r(read_file_bytes(path), path);
  check_magic(r.read_u32(), kImageMagic, path);

  IdxImageData out;
  out.count = r.read_u32();
  out.rows = r.read_u32();
  out.cols = r.read_u32();
  const auto payload = r.read_payload(out.count * out.rows * out.cols);

  out.values.resize(payload.size());
  for (std::size_t i = 0; i < payload.size(); ++i)
    out.values[i] = normalize_pixel(payload[i]);
  return out;
}

std::vector<int> load_idx_labels(const std::string& path, int num_classes) {
  BigEndianReader r(read_file_bytes(path), path);
  check_magic(r.read_u32(), kLabelMagic, path);

  const std::size_t count = r.read_u32();
  const auto payload = r.read_payload(count);

  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (payload[i] >= num_classes)
      throw std::runtime_error("'" + path + "': label byte " +
                               std::to_string(payload[i]) + " >= " +
                               std::to_string(num_classes));
    labels[i] = payload[i];
  }
  return labels;
}

void write_idx_images(const std::string& path, std::size_t count,
                      std::size_t rows, std::size_t cols,
                      std::span<const std::uint8_t> pixels) {
  if (pixels.size() != count * rows * cols)
    throw std::invalid_argument("write_idx_images: pixel count mismatch");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  write_u32_be(f, kImageMagic);
  write_u32_be(f, static_cast<std::uint32_t>(count));
  write_u32_be(f, static_cast<std::uint32_t>(rows));
  write_u32_be(f, static_cast<std::uint32_t>(cols));
  f.write(reinterpret_cast<const char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_idx_labels(const std::string& path,
                      std::span<const std::uint8_t> labels) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  write_u32_be(f, kLabelMagic);
  write_u32_be(f, static_cast<std::uint32_t>(labels.size()));
  f.write(reinterpret_cast<const char*>(labels.data()),
          static_cast<std::streamsize>(labels.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace thermolion
