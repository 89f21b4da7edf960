#include "lgn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace lgn {

namespace {

uint32_t be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& s, uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

ByteTensor parse_idx(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 4) throw ParseError("IDX stream too short for magic", bytes.size());
  if (bytes[0] != 0 || bytes[1] != 0) throw ParseError("bad IDX magic", 0);
  if (bytes[2] != 0x08) throw ParseError("unsupported IDX element type (want unsigned byte 0x08)", 2);
  const int ndims = bytes[3];
  if (ndims < 1 || ndims > 4) throw ParseError("unsupported IDX dimension count", 3);
  const std::size_t header = 4 + 4 * std::size_t(ndims);
  if (bytes.size() < header) throw ParseError("IDX stream truncated in dimension table", bytes.size());

  ByteTensor t;
  std::size_t total = 1;
  for (int d = 0; d < ndims; ++d) {
    const uint32_t n = be32(bytes.data() + 4 + 4 * d);
    t.dims.push_back(n);
    total *= n;
  }
  if (bytes.size() != header + total) {
    throw ParseError("IDX payload length mismatch: declared " + std::to_string(total) +
                         " bytes, found " + std::to_string(bytes.size() - header),
                     bytes.size());
  }
  t.data.assign(bytes.begin() + header, bytes.end());
  return t;
}

ByteTensor parse_idx_file(const std::string& path) { return parse_idx(read_file_bytes(path)); }

uint8_t luma_rec601(uint8_t r, uint8_t g, uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  const long v = std::lround(y);
  return uint8_t(std::clamp(v, 0L, 255L));
}

Cifar10Gray load_cifar10_grayscale(const std::vector<uint8_t>& bytes) {
  constexpr std::size_t kRecord = 3073;  // 1 label + 3 * 1024 channel planes
  constexpr std::size_t kPlane = 1024;
  if (bytes.empty() || bytes.size() % kRecord != 0) {
    throw ParseError("CIFAR-10 batch length is not a multiple of 3073", bytes.size());
  }
  Cifar10Gray out;
  out.count = bytes.size() / kRecord;
  out.labels.reserve(out.count);
  out.pixels.resize(out.count * kPlane);
  for (std::size_t i = 0; i < out.count; ++i) {
    const uint8_t* rec = bytes.data() + i * kRecord;
    if (rec[0] > 9) throw ParseError("CIFAR-10 label out of range", i * kRecord);
    out.labels.push_back(rec[0]);
    const uint8_t* r = rec + 1;
    const uint8_t* g = r + kPlane;
    const uint8_t* b = g + kPlane;
    uint8_t* dst = out.pixels.data() + i * kPlane;
    for (std::size_t p = 0; p < kPlane; ++p) dst[p] = luma_rec601(r[p], g[p], b[p]);
  }
  return out;
}

void thermometer_encode(uint8_t pixel, int b, uint8_t* out) {
  if (b < 1 || b > 8) throw std::domain_error("bit depth must be in [1,8]");
  // pixel > k*256/(b+1)  <=>  pixel*(b+1) > k*256, kept in exact integers.
  const int lhs = int(pixel) * (b + 1);
  for (int k = 1; k <= b; ++k) out[k - 1] = lhs > 256 * k ? 1 : 0;
}

std::string dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::mnist: return "mnist";
    case DatasetKind::fashion_mnist: return "fashion_mnist";
    case DatasetKind::cifar10: return "cifar10";
    case DatasetKind::synthetic: return "synthetic";
  }
  return "synthetic";
}

DatasetKind dataset_kind_from_name(const std::string& s) {
  if (s == "mnist") return DatasetKind::mnist;
  if (s == "fashion_mnist") return DatasetKind::fashion_mnist;
  if (s == "cifar10") return DatasetKind::cifar10;
  if (s == "synthetic") return DatasetKind::synthetic;
  throw std::domain_error("unknown dataset kind: " + s);
}

EncodedDataset encode_dataset(DatasetKind kind, const ByteTensor& images,
                              const std::vector<uint8_t>& labels, int bit_depth,
                              int class_count) {
  if (bit_depth < 1 || bit_depth > 8) throw std::domain_error("bit depth must be in [1,8]");
  const std::size_t n = images.count();
  if (labels.size() != n) throw std::domain_error("image/label count mismatch");
  const std::size_t pixels = images.item_size();

  EncodedDataset ds;
  ds.kind = kind;
  ds.bit_depth = bit_depth;
  ds.class_count = class_count;
  ds.labels = labels;
  ds.inputs = BitMatrix(n, pixels * std::size_t(bit_depth));

  uint8_t code[8];
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= class_count) throw std::domain_error("label out of range");
    const uint8_t* px = images.data.data() + i * pixels;
    for (std::size_t p = 0; p < pixels; ++p) {
      thermometer_encode(px[p], bit_depth, code);
      for (int k = 0; k < bit_depth; ++k) {
        if (code[k]) ds.inputs.set(i, p * bit_depth + k, 1);
      }
    }
  }
  return ds;
}

std::vector<uint32_t> SplitPlan::fold_val(int f) const {
  std::vector<uint32_t> out;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (fold_of[i] == f) out.push_back(train[i]);
  }
  return out;
}

std::vector<uint32_t> SplitPlan::fold_train(int f) const {
  std::vector<uint32_t> out;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (fold_of[i] != f) out.push_back(train[i]);
  }
  return out;
}

SplitPlan make_splits(const EncodedDataset& ds, uint64_t seed, int folds) {
  const std::size_t n = ds.size();
  if (n < std::size_t(ds.class_count)) throw std::domain_error("dataset smaller than class count");
  if (folds < 1) throw std::domain_error("folds must be >= 1");

  // Shuffle indices within each class so both the 80/20 cut and the folds
  // are stratified.
  std::vector<std::vector<uint32_t>> per_class(ds.class_count);
  for (std::size_t i = 0; i < n; ++i) per_class[ds.labels[i]].push_back(uint32_t(i));
  SplitMix64 rng(seed ^ 0x5e11aa5e11aa5e1ULL);
  for (auto& cls : per_class) {
    for (std::size_t i = cls.size(); i > 1; --i) {
      std::swap(cls[i - 1], cls[rng.bounded(i)]);
    }
  }

  // Largest-remainder allocation so the train side has exactly floor(0.8 n).
  const std::size_t train_total = n * 4 / 5;
  std::vector<std::size_t> take(per_class.size());
  std::vector<std::pair<double, std::size_t>> frac;
  std::size_t allocated = 0;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const double quota = 0.8 * double(per_class[c].size());
    take[c] = std::size_t(quota);
    allocated += take[c];
    frac.push_back({quota - double(take[c]), c});
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t i = 0; allocated < train_total && i < frac.size(); ++i) {
    const std::size_t c = frac[i].second;
    if (take[c] < per_class[c].size()) {
      ++take[c];
      ++allocated;
    }
  }

  SplitPlan plan;
  plan.folds = folds;
  int fold_cursor = 0;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    for (std::size_t i = 0; i < per_class[c].size(); ++i) {
      if (i < take[c]) {
        plan.train.push_back(per_class[c][i]);
        plan.fold_of.push_back(uint8_t(fold_cursor));
        fold_cursor = (fold_cursor + 1) % folds;
      } else {
        plan.test.push_back(per_class[c][i]);
      }
    }
  }
  return plan;
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  f.seekg(0, std::ios::end);
  const std::streamoff len = f.tellg();
  f.seekg(0);
  std::vector<uint8_t> bytes(static_cast<std::size_t>(len), 0);
  if (len > 0) f.read(reinterpret_cast<char*>(bytes.data()), len);
  if (!f) throw std::runtime_error("failed reading file: " + path);
  return bytes;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open file for writing: " + tmp);
    f.write(contents.data(), std::streamsize(contents.size()));
    if (!f) throw std::runtime_error("failed writing file: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_cache(const std::string& path, const EncodedDataset& ds) {
  std::string out;
  out += "LGNB";
  put_u32(out, 1);  // version
  put_u32(out, 0);  // flags
  put_u64(out, ds.size());
  put_u64(out, ds.bits());
  put_u32(out, uint32_t(ds.class_count));
  put_u32(out, uint32_t(ds.bit_depth));
  const std::string name = dataset_kind_name(ds.kind);
  put_u32(out, uint32_t(name.size()));
  out += name;
  out.append(reinterpret_cast<const char*>(ds.labels.data()), ds.labels.size());
  const std::size_t row_bytes = (ds.bits() + 7) / 8;
  std::string row(row_bytes, '\0');
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::fill(row.begin(), row.end(), '\0');
    for (std::size_t c = 0; c < ds.bits(); ++c) {
      if (ds.inputs.get(r, c)) row[c >> 3] = char(uint8_t(row[c >> 3]) | (1u << (c & 7)));
    }
    out += row;
  }
  write_file_atomic(path, out);
}

EncodedDataset read_cache(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  std::size_t off = 0;
  auto need = [&](std::size_t k) {
    if (bytes.size() - off < k) throw ParseError("cache file truncated", off);
  };
  need(4);
  if (std::memcmp(bytes.data(), "LGNB", 4) != 0) throw ParseError("bad cache magic", 0);
  off = 4;
  need(8);
  const uint32_t version = get_u32(bytes.data() + off);
  off += 8;  // version + flags
  if (version != 1) throw ParseError("unsupported cache version", 4);
  need(16);
  const uint64_t n = get_u64(bytes.data() + off);
  off += 8;
  const uint64_t bits = get_u64(bytes.data() + off);
  off += 8;
  need(12);
  const uint32_t classes = get_u32(bytes.data() + off);
  off += 4;
  const uint32_t depth = get_u32(bytes.data() + off);
  off += 4;
  const uint32_t name_len = get_u32(bytes.data() + off);
  off += 4;
  need(name_len);
  const std::string name(reinterpret_cast<const char*>(bytes.data() + off), name_len);
  off += name_len;

  EncodedDataset ds;
  ds.kind = dataset_kind_from_name(name);
  ds.class_count = int(classes);
  ds.bit_depth = int(depth);
  need(n);
  ds.labels.assign(bytes.begin() + off, bytes.begin() + off + n);
  off += n;
  ds.inputs = BitMatrix(n, bits);
  const std::size_t row_bytes = (bits + 7) / 8;
  need(n * row_bytes);
  for (std::size_t r = 0; r < n; ++r) {
    const uint8_t* row = bytes.data() + off + r * row_bytes;
    for (std::size_t c = 0; c < bits; ++c) {
      if ((row[c >> 3] >> (c & 7)) & 1) ds.inputs.set(r, c, 1);
    }
  }
  return ds;
}

}  // namespace lgn
