#pragma once

#include <cstdint>
#include <vector>

#include "dam/data.hpp"

namespace dam {

// Deterministic procedural digit corpus: per-class stroke skeletons rendered
// at 28x28 under random affine jitter, stroke-width variation and pixel
// noise. Classes cycle 0..9 through the index, so any prefix is balanced.
// Stands in for handwritten-digit data when no IDX files are available.
struct SynthDigits {
  RawImages images;
  std::vector<std::uint8_t> labels;
};

SynthDigits make_synthetic_digits(int count, std::uint64_t seed);

LabeledImageSet make_synthetic_dataset(int count, std::uint64_t seed);

}  // namespace dam
