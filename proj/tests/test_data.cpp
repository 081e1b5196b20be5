// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "thermolion/dataset.hpp"
#include "thermolion/idx.hpp"

using namespace thermolion;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const char* name) {
  return fs::temp_directory_path() / name;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

void push_u32(std::vector<std::uint8_t>& v, std::uint32_t x) {
  v.push_back(x >> 24);
  v.push_back((x >> 16) & 0xff);
  v.push_back((x >> 8) & 0xff);
  v.push_back(x & 0xff);
}

}  // namespace

TEST_CASE("pixel normalization endpoints") {
  CHECK(normalize_pixel(0) == -1.0);
  CHECK(normalize_pixel(255) == 1.0);
  CHECK(normalize_pixel(128) == doctest::Approx(0.0039216).epsilon(1e-4));
  CHECK(normalize_pixel(128) == 128.0 / 127.5 - 1.0);
}

TEST_CASE("hand-built 2-image 2x2 fixture round-trips") {
  const std::vector<std::uint8_t> pixels = {0, 255, 128, 64, 1, 2, 3, 254};
  std::vector<std::uint8_t> bytes;
  push_u32(bytes, 0x00000803);
  push_u32(bytes, 2);  // count
  push_u32(bytes, 2);  // rows
  push_u32(bytes, 2);  // cols
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());

  const fs::path path = temp_path("tl_fixture_images.idx");
  write_bytes(path, bytes);

  const IdxImageData imgs = load_idx_images(path.string());
  CHECK(imgs.count == 2);
  CHECK(imgs.rows == 2);
  CHECK(imgs.cols == 2);
  REQUIRE(imgs.values.size() == 8);
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(imgs.values[i] == normalize_pixel(pixels[i]));
}

TEST_CASE("label fixture, empty payload, count mismatch") {
  std::vector<std::uint8_t> bytes;
  push_u32(bytes, 0x00000801);
  push_u32(bytes, 2);
  bytes.push_back(7);
  bytes.push_back(2);
  const fs::path lpath = temp_path("tl_fixture_labels.idx");
  write_bytes(lpath, bytes);
  CHECK(load_idx_labels(lpath.string()) == std::vector<int>{7, 2});

  std::vector<std::uint8_t> empty;
  push_u32(empty, 0x00000801);
  push_u32(empty, 0);
  const fs::path epath = temp_path("tl_fixture_empty.idx");
  write_bytes(epath, empty);
  CHECK(load_idx_labels(epath.string()).empty());

  // paired loader rejects count mismatch, reporting both counts
  std::vector<std::uint8_t> img;
  push_u32(img, 0x00000803);
  push_u32(img, 1);
  push_u32(img, 2);
  push_u32(img, 2);
  for (int i = 0; i < 4; ++i) img.push_back(10);
  const fs::path ipath = temp_path("tl_fixture_one.idx");
  write_bytes(ipath, img);
  try {
    load_mnist(ipath.string(), lpath.string());
    FAIL("expected mismatch rejection");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
}

TEST_CASE("corrupted magic and truncated payloads are rejected") {
  std::vector<std::uint8_t> bad;
  push_u32(bad, 0x00000804);  // wrong magic
  push_u32(bad, 1);
  push_u32(bad, 1);
  push_u32(bad, 1);
  bad.push_back(0);
  const fs::path bpath = temp_path("tl_bad_magic.idx");
  write_bytes(bpath, bad);
  try {
    load_idx_images(bpath.string());
    FAIL("expected magic rejection");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0x00000803") != std::string::npos);  // expected
    CHECK(msg.find("0x00000804") != std::string::npos);  // found
  }

  std::vector<std::uint8_t> trunc;
  push_u32(trunc, 0x00000803);
  push_u32(trunc, 2);
  push_u32(trunc, 2);
  push_u32(trunc, 2);
  trunc.push_back(0);  // 1 byte instead of 8
  const fs::path tpath = temp_path("tl_truncated.idx");
  write_bytes(tpath, trunc);
  try {
    load_idx_images(tpath.string());
    FAIL("expected truncation rejection");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("24") != std::string::npos);  // 16+8 bytes
  }

  // label bytes out of range
  std::vector<std::uint8_t> hot;
  push_u32(hot, 0x00000801);
  push_u32(hot, 1);
  hot.push_back(10);
  const fs::path hpath = temp_path("tl_hot_label.idx");
  write_bytes(hpath, hot);
  CHECK_THROWS_AS(load_idx_labels(hpath.string()), std::runtime_error);
}

TEST_CASE("IDX writer round-trips random bytes bit-exactly") {
  RngStream rng(51, 0);
  const std::size_t count = 7, rows = 3, cols = 5;
  std::vector<std::uint8_t> pixels(count * rows * cols);
  for (auto& p : pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
  std::vector<std::uint8_t> labels(count);
  for (auto& l : labels) l = static_cast<std::uint8_t>(rng.next_below(10));

  const fs::path ipath = temp_path("tl_rt_images.idx");
  const fs::path lpath = temp_path("tl_rt_labels.idx");
  write_idx_images(ipath.string(), count, rows, cols, pixels);
  write_idx_labels(lpath.string(), labels);

  const Dataset ds = load_mnist(ipath.string(), lpath.string());
  CHECK(ds.n == count);
  CHECK(ds.dim == rows * cols);
  for (std::size_t i = 0; i < pixels.size(); ++i)
    CHECK(ds.images[i] == normalize_pixel(pixels[i]));
  for (std::size_t i = 0; i < count; ++i) CHECK(ds.labels[i] == labels[i]);
}

TEST_CASE("gzip-suffixed IDX files decompress transparently") {
  const std::vector<std::uint8_t> pixels = {9, 18, 27, 36};
  std::vector<std::uint8_t> bytes;
  push_u32(bytes, 0x00000803);
  push_u32(bytes, 1);
  push_u32(bytes, 2);
  push_u32(bytes, 2);
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());

  const fs::path gzpath = temp_path("tl_images.idx.gz");
  gzFile f = gzopen(gzpath.string().c_str(), "wb");
  REQUIRE(f != nullptr);
  gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
  gzclose(f);

  const IdxImageData imgs = load_idx_images(gzpath.string());
  CHECK(imgs.count == 1);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(imgs.values[i] == normalize_pixel(pixels[i]));
}

TEST_CASE("take_first") {
  RngStream rng(3, 2);
  Dataset ds = synth_blobs(rng, 600, 10, 8, 2.0);  // 6000 samples
  CHECK(take_first(ds, 5000).n == 5000);
  CHECK(take_first(ds, 10000).n == ds.n);
  const Dataset one = take_first(ds, 1);
  CHECK(one.n == 1);
  CHECK(one.labels[0] == ds.labels[0]);
  CHECK(std::equal(one.images.begin(), one.images.end(), ds.images.begin()));
  CHECK_THROWS_AS(take_first(ds, 0), std::invalid_argument);
}

TEST_CASE("epoch_batches covers every index exactly once") {
  RngStream rng(12, 1);
  const auto batches = epoch_batches(5000, BatchPlan{1024, false}, rng);
  std::vector<std::size_t> sizes;
  for (const auto& b : batches) sizes.push_back(b.size());
  CHECK(sizes == std::vector<std::size_t>{1024, 1024, 1024, 1024, 904});

  std::map<std::size_t, int> seen;
  for (const auto& b : batches)
    for (std::size_t i : b) seen[i]++;
  CHECK(seen.size() == 5000);
  for (const auto& [idx, n] : seen) {
    CHECK(idx < 5000);
    CHECK(n == 1);
  }

  // single batch when batch_size >= n
  const auto whole = epoch_batches(10, BatchPlan{64, false}, rng);
  CHECK(whole.size() == 1);
  CHECK(whole[0].size() == 10);

  // same stream, two epochs: same index set, different order
  RngStream s(9, 1);
  const auto e1 = epoch_batches(256, BatchPlan{64, false}, s);
  const auto e2 = epoch_batches(256, BatchPlan{64, false}, s);
  CHECK(e1 != e2);
  std::set<std::size_t> s1, s2;
  for (const auto& b : e1) s1.insert(b.begin(), b.end());
  for (const auto& b : e2) s2.insert(b.begin(), b.end());
  CHECK(s1 == s2);

  // drop_last removes the short tail
  RngStream d(9, 1);
  const auto dropped = epoch_batches(5000, BatchPlan{1024, true}, d);
  CHECK(dropped.size() == 4);
}

TEST_CASE("synth_blobs separability and determinism") {
  RngStream r1(4, 2), r2(4, 2);
  const Dataset a = synth_blobs(r1, 50, 10, 16, 3.0);
  const Dataset b = synth_blobs(r2, 50, 10, 16, 3.0);
  CHECK(a.images == b.images);
  CHECK(a.labels == b.labels);
  CHECK(a.n == 500);
  CHECK_NOTHROW(a.validate());
  for (double p : a.images) {
    CHECK(p >= -1.0);
    CHECK(p <= 1.0);
  }

  // nearest-centroid accuracy: ~chance at separation 0, >99% at 10
  const auto centroid_accuracy = [](const Dataset& ds) {
    std::vector<std::vector<double>> centroids(
        ds.num_classes, std::vector<double>(ds.dim, 0.0));
    std::vector<int> counts(ds.num_classes, 0);
    for (std::size_t i = 0; i < ds.n; ++i) {
      counts[ds.labels[i]]++;
      for (std::size_t d = 0; d < ds.dim; ++d)
        centroids[ds.labels[i]][d] += ds.images[i * ds.dim + d];
    }
    for (int c = 0; c < ds.num_classes; ++c)
      for (std::size_t d = 0; d < ds.dim; ++d) centroids[c][d] /= counts[c];
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.n; ++i) {
      int best = 0;
      double best_d = 1e300;
      for (int c = 0; c < ds.num_classes; ++c) {
        double dist = 0.0;
        for (std::size_t d = 0; d < ds.dim; ++d) {
          const double diff = ds.images[i * ds.dim + d] - centroids[c][d];
          dist += diff * diff;
        }
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (best == ds.labels[i]) ++hits;
    }
    return double(hits) / double(ds.n);
  };

  RngStream r3(6, 2);
  const Dataset indistinct = synth_blobs(r3, 100, 10, 16, 0.0);
  const double chance = centroid_accuracy(indistinct);
  CHECK(chance > 0.03);
  CHECK(chance < 0.25);

  RngStream r4(6, 2);
  const Dataset separated = synth_blobs(r4, 100, 10, 16, 10.0);
  CHECK(centroid_accuracy(separated) > 0.99);
}

TEST_CASE("Dataset::validate rejects broken stores") {
  Dataset ds;
  ds.n = 2;
  ds.dim = 2;
  ds.num_classes = 2;
  ds.images = {0.0, 0.5, -0.5, 1.0};
  ds.labels = {0, 1};
  CHECK_NOTHROW(ds.validate());

  Dataset bad = ds;
  bad.images[1] = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ds;
  bad.labels[0] = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ds;
  bad.labels.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gather materializes the selected rows") {
  RngStream rng(8, 2);
  const Dataset ds = synth_blobs(rng, 10, 3, 4, 1.0);
  std::vector<double> imgs;
  std::vector<int> labels;
  const std::vector<std::size_t> idx = {5, 0, 17};
  const Batch b = gather(ds, idx, imgs, labels);
  CHECK(b.n == 3);
  CHECK(b.dim == 4);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(b.labels[r] == ds.labels[idx[r]]);
    for (std::size_t d = 0; d < 4; ++d)
      CHECK(b.images[r * 4 + d] == ds.images[idx[r] * 4 + d]);
  }
}
