#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lgn/dataset.hpp"

using namespace lgn;

namespace {

std::vector<uint8_t> idx_fixture_2x2x2() {
  // magic 0x00000803, dims 2,2,2, payload 0,11,22,...
  std::vector<uint8_t> b{0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2};
  for (int i = 0; i < 8; ++i) b.push_back(uint8_t(i * 11));
  return b;
}

ByteTensor tiny_images(std::size_t n, std::size_t pixels, uint64_t seed) {
  ByteTensor t;
  t.dims = {n, pixels};
  t.data.resize(n * pixels);
  SplitMix64 rng(seed);
  for (auto& v : t.data) v = uint8_t(rng.bounded(256));
  return t;
}

}  // namespace

TEST_CASE("IDX parser round-trips a hand-built fixture") {
  const auto bytes = idx_fixture_2x2x2();
  const ByteTensor t = parse_idx(bytes);
  REQUIRE(t.dims == std::vector<std::size_t>{2, 2, 2});
  REQUIRE(t.data.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(t.data[i] == uint8_t(i * 11));
}

TEST_CASE("IDX parser fails loudly with positions") {
  CHECK_THROWS_AS(parse_idx({}), ParseError);
  CHECK_THROWS_AS(parse_idx({1, 0, 8, 1}), ParseError);      // bad magic
  CHECK_THROWS_AS(parse_idx({0, 0, 9, 1}), ParseError);      // bad dtype
  auto truncated = idx_fixture_2x2x2();
  truncated.pop_back();
  try {
    parse_idx(truncated);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
  }
}

TEST_CASE("CIFAR-10 grayscale conversion") {
  // single record, R=G=B=100 everywhere
  std::vector<uint8_t> rec(3073, 100);
  rec[0] = 3;
  const auto gray = load_cifar10_grayscale(rec);
  REQUIRE(gray.count == 1);
  CHECK(gray.labels[0] == 3);
  for (auto v : gray.pixels) CHECK(v == 100);

  CHECK(luma_rec601(255, 0, 0) == uint8_t(std::lround(0.299 * 255)));
  CHECK(luma_rec601(255, 0, 0) == 76);
  CHECK(luma_rec601(0, 255, 0) == uint8_t(std::lround(0.587 * 255)));

  std::vector<uint8_t> bad(3072, 0);
  CHECK_THROWS_AS(load_cifar10_grayscale(bad), ParseError);

  // synthetic 5-record batch parses with labels in range
  SplitMix64 rng(3);
  std::vector<uint8_t> batch;
  for (int r = 0; r < 5; ++r) {
    batch.push_back(uint8_t(rng.bounded(10)));
    for (int i = 0; i < 3072; ++i) batch.push_back(uint8_t(rng.bounded(256)));
  }
  const auto parsed = load_cifar10_grayscale(batch);
  CHECK(parsed.count == 5);
  for (auto l : parsed.labels) CHECK(l <= 9);
}

TEST_CASE("thermometer encoding follows the threshold rule") {
  uint8_t out[8];

  thermometer_encode(128, 1, out);
  CHECK(out[0] == 0);  // 128 > 128 is false

  thermometer_encode(255, 8, out);
  for (int k = 0; k < 8; ++k) CHECK(out[k] == 1);
  for (int b = 1; b <= 8; ++b) {
    thermometer_encode(0, b, out);
    for (int k = 0; k < b; ++k) CHECK(out[k] == 0);
  }

  // direct evaluation of the rule for pixel=100, b=2
  thermometer_encode(100, 2, out);
  CHECK(out[0] == (100.0 > 256.0 / 3.0 ? 1 : 0));
  CHECK(out[1] == (100.0 > 2.0 * 256.0 / 3.0 ? 1 : 0));
  CHECK(out[0] == 1);
  CHECK(out[1] == 0);

  CHECK_THROWS_AS(thermometer_encode(10, 0, out), std::domain_error);
  CHECK_THROWS_AS(thermometer_encode(10, 9, out), std::domain_error);

  // monotone non-increasing code; ones count a non-decreasing step in pixel
  for (int b = 1; b <= 8; ++b) {
    int prev_ones = 0;
    for (int px = 0; px < 256; ++px) {
      thermometer_encode(uint8_t(px), b, out);
      int ones = 0;
      for (int k = 0; k < b; ++k) {
        ones += out[k];
        if (k > 0) CHECK(out[k] <= out[k - 1]);
      }
      if (px > 0) CHECK(ones >= prev_ones);
      prev_ones = ones;
    }
    CHECK(prev_ones == b);  // pixel 255 saturates every threshold
  }
}

TEST_CASE("encoding width is pixel_count * b") {
  for (int b : {1, 3, 8}) {
    const auto images = tiny_images(12, 49, 5);
    std::vector<uint8_t> labels(12);
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = uint8_t(i % 10);
    const auto ds = encode_dataset(DatasetKind::synthetic, images, labels, b);
    CHECK(ds.bits() == std::size_t(49 * b));
    CHECK(ds.size() == 12);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (std::size_t c = 0; c < ds.bits(); ++c) {
        const int v = ds.inputs.get(i, c);
        CHECK((v == 0 || v == 1));
      }
    }
  }
}

TEST_CASE("splits: 80/20, stratified folds, deterministic") {
  const auto images = tiny_images(100, 8, 17);
  std::vector<uint8_t> labels(100);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = uint8_t(i % 10);
  const auto ds = encode_dataset(DatasetKind::synthetic, images, labels, 1);

  const SplitPlan plan = make_splits(ds, 7);
  CHECK(plan.train.size() == 80);
  CHECK(plan.test.size() == 20);
  for (int f = 0; f < 5; ++f) CHECK(plan.fold_val(f).size() == 16);

  const SplitPlan again = make_splits(ds, 7);
  CHECK(plan.train == again.train);
  CHECK(plan.test == again.test);
  CHECK(plan.fold_of == again.fold_of);

  const SplitPlan other = make_splits(ds, 8);
  CHECK(plan.train != other.train);

  // no index lost or duplicated
  std::vector<int> seen(100, 0);
  for (auto i : plan.train) ++seen[i];
  for (auto i : plan.test) ++seen[i];
  for (int s : seen) CHECK(s == 1);

  // stratification: each fold has balanced classes for this uniform set
  for (int f = 0; f < 5; ++f) {
    std::vector<int> per_class(10, 0);
    for (auto i : plan.fold_val(f)) ++per_class[ds.labels[i]];
    for (int c = 0; c < 10; ++c) CHECK(std::abs(per_class[c] - 2) <= 1);
  }
}

TEST_CASE("splits: fold sizes differ by at most one for N=83") {
  const auto images = tiny_images(83, 8, 21);
  std::vector<uint8_t> labels(83);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = uint8_t(i % 10);
  const auto ds = encode_dataset(DatasetKind::synthetic, images, labels, 1);
  const SplitPlan plan = make_splits(ds, 3);
  CHECK(plan.train.size() == 66);  // floor(0.8 * 83)
  CHECK(plan.test.size() == 17);
  std::size_t lo = SIZE_MAX, hi = 0;
  for (int f = 0; f < 5; ++f) {
    const auto sz = plan.fold_val(f).size();
    lo = std::min(lo, sz);
    hi = std::max(hi, sz);
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("cache files round-trip bit-exactly") {
  const auto images = tiny_images(23, 13, 31);
  std::vector<uint8_t> labels(23);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = uint8_t(i % 7);
  const auto ds = encode_dataset(DatasetKind::synthetic, images, labels, 3, 7);

  const std::string path =
      (std::filesystem::temp_directory_path() / "lgn_cache_test.lgnb").string();
  write_cache(path, ds);
  const auto back = read_cache(path);
  CHECK(back.kind == ds.kind);
  CHECK(back.bit_depth == ds.bit_depth);
  CHECK(back.class_count == ds.class_count);
  CHECK(back.labels == ds.labels);
  REQUIRE(back.bits() == ds.bits());
  REQUIRE(back.size() == ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < ds.bits(); ++c) {
      CHECK(back.inputs.get(r, c) == ds.inputs.get(r, c));
    }
  }
  std::filesystem::remove(path);
}
