#include "dam/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "dam/rng.hpp"

namespace dam {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset,
                        const char* what) {
  if (offset + 4 > bytes.size())
    throw IdxParseError(std::string("truncated IDX header while reading ") + what,
                        offset);
  return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
         (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

void append_be32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  out.push_back(std::uint8_t(value >> 24));
  out.push_back(std::uint8_t(value >> 16));
  out.push_back(std::uint8_t(value >> 8));
  out.push_back(std::uint8_t(value));
}

std::vector<std::uint8_t> gzip_inflate(std::span<const std::uint8_t> bytes) {
  z_stream stream{};
  // 16 + MAX_WBITS: gzip container only.
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK)
    throw std::runtime_error("gzip: inflateInit2 failed");
  std::vector<std::uint8_t> out;
  out.reserve(bytes.size() * 4);
  std::uint8_t buffer[1 << 16];
  stream.next_in = const_cast<Bytef*>(bytes.data());
  stream.avail_in = uInt(bytes.size());
  int rc = Z_OK;
  do {
    stream.next_out = buffer;
    stream.avail_out = sizeof buffer;
    rc = inflate(&stream, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&stream);
      throw std::runtime_error("gzip: corrupt stream (zlib rc " + std::to_string(rc) + ")");
    }
    out.insert(out.end(), buffer, buffer + (sizeof buffer - stream.avail_out));
  } while (rc != Z_STREAM_END);
  inflateEnd(&stream);
  return out;
}

}  // namespace

RawImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0, "magic");
  if (magic == kLabelsMagic)
    throw IdxParseError("labels magic in image parser", 0);
  if (magic != kImagesMagic)
    throw IdxParseError("bad IDX image magic " + std::to_string(magic), 0);
  RawImages out;
  out.count = int(read_be32(bytes, 4, "count"));
  out.rows = int(read_be32(bytes, 8, "rows"));
  out.cols = int(read_be32(bytes, 12, "cols"));
  if (out.count < 0 || out.rows <= 0 || out.cols <= 0)
    throw IdxParseError("bad IDX image dimensions", 4);
  const std::size_t payload = std::size_t(out.count) * std::size_t(out.rows) *
                              std::size_t(out.cols);
  if (bytes.size() < 16 + payload)
    throw IdxParseError("truncated IDX image payload", bytes.size());
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + std::ptrdiff_t(payload));
  return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
  const std::uint32_t magic = read_be32(bytes, 0, "magic");
  if (magic == kImagesMagic)
    throw IdxParseError("images magic in label parser", 0);
  if (magic != kLabelsMagic)
    throw IdxParseError("bad IDX label magic " + std::to_string(magic), 0);
  const std::size_t count = read_be32(bytes, 4, "count");
  if (bytes.size() < 8 + count)
    throw IdxParseError("truncated IDX label payload", bytes.size());
  std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.begin() + 8 + std::ptrdiff_t(count));
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] > 9)
      throw IdxParseError("label byte " + std::to_string(int(labels[i])) + " out of range",
                          8 + i);
  return labels;
}

std::vector<std::uint8_t> encode_idx_images(const RawImages& images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.pixels.size());
  append_be32(out, kImagesMagic);
  append_be32(out, std::uint32_t(images.count));
  append_be32(out, std::uint32_t(images.rows));
  append_be32(out, std::uint32_t(images.cols));
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  append_be32(out, kLabelsMagic);
  append_be32(out, std::uint32_t(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> read_file_maybe_gzip(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
    return gzip_inflate(bytes);
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw std::runtime_error("short write: " + path);
}

double map_pixel(std::uint8_t raw) { return 2.0 * (double(raw) / 255.0) - 1.0; }

std::uint8_t unmap_pixel(double value) {
  const double raw = (value + 1.0) * 255.0 / 2.0;
  return std::uint8_t(std::lround(std::clamp(raw, 0.0, 255.0)));
}

Eigen::MatrixXd map_pixels(const RawImages& raw) {
  const int pixels = raw.rows * raw.cols;
  Eigen::MatrixXd out(pixels, raw.count);
  for (int ex = 0; ex < raw.count; ++ex)
    for (int p = 0; p < pixels; ++p)
      out(p, ex) = map_pixel(raw.pixels[std::size_t(ex) * std::size_t(pixels) +
                                        std::size_t(p)]);
  return out;
}

LabeledImageSet make_labeled_set(const RawImages& raw,
                                 const std::vector<std::uint8_t>& labels, int classes) {
  if (std::size_t(raw.count) != labels.size())
    throw std::invalid_argument("make_labeled_set: image/label count mismatch");
  LabeledImageSet set;
  set.images = map_pixels(raw);
  set.labels.assign(labels.begin(), labels.end());
  set.classes = classes;
  set.image_rows = raw.rows;
  set.image_cols = raw.cols;
  return set;
}

LabeledImageSet load_idx_dataset(const std::string& images_path,
                                 const std::string& labels_path, int classes) {
  const auto image_bytes = read_file_maybe_gzip(images_path);
  const auto label_bytes = read_file_maybe_gzip(labels_path);
  return make_labeled_set(parse_idx_images(image_bytes), parse_idx_labels(label_bytes),
                          classes);
}

LabeledImageSet LabeledImageSet::subset(const std::vector<int>& indices) const {
  LabeledImageSet out;
  out.classes = classes;
  out.image_rows = image_rows;
  out.image_cols = image_cols;
  out.images.resize(images.rows(), Eigen::Index(indices.size()));
  out.labels.resize(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.images.col(Eigen::Index(k)) = images.col(indices[k]);
    out.labels[k] = labels[std::size_t(indices[k])];
  }
  return out;
}

std::vector<std::vector<int>> LabeledImageSet::indices_by_class() const {
  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(classes));
  for (int ex = 0; ex < count(); ++ex) by_class[std::size_t(labels[std::size_t(ex)])].push_back(ex);
  return by_class;
}

std::pair<LabeledImageSet, LabeledImageSet> split_dataset(const LabeledImageSet& data,
                                                          const SplitSpec& spec) {
  if (spec.train_count < 0 || spec.validation_count < 0 ||
      spec.train_count + spec.validation_count != data.count())
    throw std::invalid_argument("split: counts must sum to the dataset size");

  auto by_class = data.indices_by_class();
  // Largest-remainder allocation of the validation quota across classes.
  std::vector<int> quota(by_class.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const double exact = double(spec.validation_count) * double(by_class[c].size()) /
                         double(std::max(1, data.count()));
    quota[c] = int(exact);
    assigned += quota[c];
    remainders.push_back({exact - double(quota[c]), c});
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int extra = 0; extra < spec.validation_count - assigned; ++extra)
    ++quota[remainders[std::size_t(extra)].second];

  std::vector<int> train_idx, val_idx;
  train_idx.reserve(std::size_t(spec.train_count));
  val_idx.reserve(std::size_t(spec.validation_count));
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& pool = by_class[c];
    Rng rng = make_stream(spec.seed, streams::kSplit, std::uint64_t(c));
    const auto perm = rng.permutation(int(pool.size()));
    if (quota[c] > int(pool.size()))
      throw std::invalid_argument("split: class smaller than its validation quota");
    for (std::size_t k = 0; k < pool.size(); ++k) {
      const int idx = pool[std::size_t(perm[k])];
      (int(k) < quota[c] ? val_idx : train_idx).push_back(idx);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {data.subset(train_idx), data.subset(val_idx)};
}

std::vector<std::vector<int>> minibatch_indices(const LabeledImageSet& data,
                                                int per_class, std::uint64_t seed,
                                                int epoch) {
  if (per_class < 1) throw std::invalid_argument("minibatch_indices: per_class < 1");
  auto by_class = data.indices_by_class();
  std::size_t max_batches = std::size_t(-1);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    Rng rng = make_stream(seed, streams::kMinibatch, std::uint64_t(epoch), std::uint64_t(c));
    const auto perm = rng.permutation(int(by_class[c].size()));
    std::vector<int> shuffled(by_class[c].size());
    for (std::size_t k = 0; k < shuffled.size(); ++k)
      shuffled[k] = by_class[c][std::size_t(perm[k])];
    by_class[c] = std::move(shuffled);
    max_batches = std::min(max_batches, by_class[c].size() / std::size_t(per_class));
  }
  std::vector<std::vector<int>> batches(max_batches);
  for (std::size_t b = 0; b < max_batches; ++b) {
    auto& batch = batches[b];
    batch.reserve(std::size_t(per_class) * by_class.size());
    for (const auto& pool : by_class)
      for (int k = 0; k < per_class; ++k)
        batch.push_back(pool[b * std::size_t(per_class) + std::size_t(k)]);
  }
  return batches;
}

std::array<XorRow, 4> xor_dataset() {
  return {XorRow{-1, -1, -1}, XorRow{-1, 1, 1}, XorRow{1, -1, 1}, XorRow{1, 1, -1}};
}

}  // namespace dam
