#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgn/common.hpp"

namespace lgn {

// Dense unsigned-byte tensor as stored in IDX files.
struct ByteTensor {
  std::vector<std::size_t> dims;
  std::vector<uint8_t> data;

  std::size_t count() const { return dims.empty() ? 0 : dims[0]; }
  std::size_t item_size() const {
    std::size_t s = 1;
    for (std::size_t i = 1; i < dims.size(); ++i) s *= dims[i];
    return s;
  }
};

// IDX container (big-endian dims, magic 0x0000'08'<ndims>).
ByteTensor parse_idx(const std::vector<uint8_t>& bytes);
ByteTensor parse_idx_file(const std::string& path);

// CIFAR-10 binary batch (3073-byte records); images converted to 32x32
// grayscale with Rec.601 luma, so one image is 1024 bytes.
struct Cifar10Gray {
  std::vector<uint8_t> labels;
  std::vector<uint8_t> pixels;  // count * 1024
  std::size_t count = 0;
};
Cifar10Gray load_cifar10_grayscale(const std::vector<uint8_t>& bytes);

uint8_t luma_rec601(uint8_t r, uint8_t g, uint8_t b);

// Thermometer code: bit k (k = 1..b) is 1 iff pixel > k*256/(b+1).
// The result is monotone non-increasing.
void thermometer_encode(uint8_t pixel, int b, uint8_t* out);

// Packed row-major bit matrix.
struct BitMatrix {
  std::size_t rows = 0, cols = 0, words_per_row = 0;
  std::vector<uint64_t> words;

  BitMatrix() = default;
  BitMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), words_per_row((c + 63) / 64), words(r * words_per_row, 0) {}

  int get(std::size_t r, std::size_t c) const {
    return int((words[r * words_per_row + (c >> 6)] >> (c & 63)) & 1u);
  }
  void set(std::size_t r, std::size_t c, int v) {
    uint64_t& w = words[r * words_per_row + (c >> 6)];
    const uint64_t m = uint64_t(1) << (c & 63);
    w = v ? (w | m) : (w & ~m);
  }
  const uint64_t* row(std::size_t r) const { return words.data() + r * words_per_row; }
};

enum class DatasetKind { mnist, fashion_mnist, cifar10, synthetic };

std::string dataset_kind_name(DatasetKind k);
DatasetKind dataset_kind_from_name(const std::string& s);

struct EncodedDataset {
  DatasetKind kind = DatasetKind::synthetic;
  int bit_depth = 1;
  int class_count = 10;
  BitMatrix inputs;              // N x (pixel_count * b)
  std::vector<uint8_t> labels;   // N

  std::size_t size() const { return labels.size(); }
  std::size_t bits() const { return inputs.cols; }
};

// Pixel tensor (N x pixel_count) + labels -> thermometer-encoded dataset.
EncodedDataset encode_dataset(DatasetKind kind, const ByteTensor& images,
                              const std::vector<uint8_t>& labels, int bit_depth,
                              int class_count = 10);

// 80/20 train/test split plus a k-fold partition of the training portion,
// stratified by label.  Deterministic given the seed.
struct SplitPlan {
  std::vector<uint32_t> train;
  std::vector<uint32_t> test;
  std::vector<uint8_t> fold_of;  // parallel to `train`
  int folds = 5;

  std::vector<uint32_t> fold_val(int f) const;
  std::vector<uint32_t> fold_train(int f) const;
};
SplitPlan make_splits(const EncodedDataset& ds, uint64_t seed, int folds = 5);

// Packed cache file, header documented in the README (magic "LGNB").
void write_cache(const std::string& path, const EncodedDataset& ds);
EncodedDataset read_cache(const std::string& path);

std::vector<uint8_t> read_file_bytes(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace lgn
