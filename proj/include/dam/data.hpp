#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dam {

// Labelled images mapped to [-1, 1], one column per image.
struct LabeledImageSet {
  Eigen::MatrixXd images;  // pixels x count
  std::vector<int> labels;
  int classes = 10;
  int image_rows = 28;
  int image_cols = 28;

  int count() const { return int(images.cols()); }
  int pixels() const { return int(images.rows()); }
  bool empty() const { return count() == 0; }

  LabeledImageSet subset(const std::vector<int>& indices) const;
  std::vector<std::vector<int>> indices_by_class() const;
};

struct SplitSpec {
  int train_count = 0;
  int validation_count = 0;
  std::uint64_t seed = 0;
};

struct RawImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, image-major
};

class IdxParseError : public std::runtime_error {
 public:
  IdxParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_ = 0;
};

// IDX containers, big-endian: magic 0x00000803 (images) / 0x00000801 (labels).
RawImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_idx_images(const RawImages& images);
std::vector<std::uint8_t> encode_idx_labels(const std::vector<std::uint8_t>& labels);

// Reads a file, transparently inflating it when it starts with the gzip magic.
std::vector<std::uint8_t> read_file_maybe_gzip(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

// v = 2 raw/255 - 1 and its exact inverse.
double map_pixel(std::uint8_t raw);
std::uint8_t unmap_pixel(double value);
Eigen::MatrixXd map_pixels(const RawImages& raw);

LabeledImageSet make_labeled_set(const RawImages& raw,
                                 const std::vector<std::uint8_t>& labels,
                                 int classes = 10);
LabeledImageSet load_idx_dataset(const std::string& images_path,
                                 const std::string& labels_path, int classes = 10);

// Disjoint label-stratified split with exact part sizes (largest remainder);
// deterministic in the seed. Throws if the counts do not sum to the source.
std::pair<LabeledImageSet, LabeledImageSet> split_dataset(const LabeledImageSet& data,
                                                          const SplitSpec& spec);

// Index lists for one epoch of exactly class-balanced minibatches, reshuffled
// per (seed, epoch). Emission stops once any class runs short; the ragged
// tail is dropped.
std::vector<std::vector<int>> minibatch_indices(const LabeledImageSet& data,
                                                int per_class, std::uint64_t seed,
                                                int epoch);

struct XorRow {
  int x, y, z;
};

// The four truth-table rows used as stored triplets.
std::array<XorRow, 4> xor_dataset();

}  // namespace dam
