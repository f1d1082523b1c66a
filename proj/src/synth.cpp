#include "dam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dam/rng.hpp"

namespace dam {

namespace {

constexpr int kSide = 28;

struct Point {
  double x, y;
};

using Stroke = std::vector<Point>;  // polyline in [0,1]^2, y grows downward

Stroke arc(Point center, double rx, double ry, double from_deg, double to_deg,
           int segments = 14) {
  Stroke s;
  s.reserve(std::size_t(segments) + 1);
  for (int k = 0; k <= segments; ++k) {
    const double t = from_deg + (to_deg - from_deg) * double(k) / double(segments);
    const double rad = t * std::numbers::pi / 180.0;
    s.push_back({center.x + rx * std::cos(rad), center.y + ry * std::sin(rad)});
  }
  return s;
}

// Angles follow image coordinates: 0 deg points right, 90 deg points down.
std::vector<Stroke> digit_skeleton(int digit) {
  switch (digit) {
    case 0:
      return {arc({0.50, 0.50}, 0.26, 0.38, 0.0, 360.0, 20)};
    case 1:
      return {{{0.34, 0.28}, {0.52, 0.13}, {0.52, 0.87}},
              {{0.36, 0.87}, {0.68, 0.87}}};
    case 2:
      return {arc({0.50, 0.34}, 0.22, 0.21, 180.0, 360.0),
              {{0.72, 0.34}, {0.66, 0.55}, {0.30, 0.84}},
              {{0.30, 0.84}, {0.76, 0.84}}};
    case 3:
      return {arc({0.48, 0.32}, 0.21, 0.19, 150.0, 380.0),
              arc({0.48, 0.67}, 0.23, 0.21, 340.0, 570.0)};
    case 4:
      return {{{0.62, 0.12}, {0.24, 0.62}, {0.80, 0.62}},
              {{0.62, 0.12}, {0.62, 0.88}}};
    case 5:
      return {{{0.72, 0.14}, {0.32, 0.14}, {0.30, 0.47}},
              arc({0.49, 0.65}, 0.24, 0.21, 250.0, 480.0)};
    case 6:
      return {{{0.64, 0.12}, {0.44, 0.32}, {0.32, 0.58}},
              arc({0.50, 0.66}, 0.20, 0.19, 0.0, 360.0, 18)};
    case 7:
      return {{{0.26, 0.15}, {0.76, 0.15}, {0.44, 0.88}}};
    case 8:
      return {arc({0.50, 0.31}, 0.18, 0.17, 0.0, 360.0, 16),
              arc({0.50, 0.68}, 0.22, 0.20, 0.0, 360.0, 18)};
    case 9:
      return {arc({0.48, 0.34}, 0.20, 0.19, 0.0, 360.0, 16),
              {{0.68, 0.36}, {0.64, 0.62}, {0.52, 0.88}}};
    default:
      return {};
  }
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double px = a.x + t * dx - p.x;
  const double py = a.y + t * dy - p.y;
  return std::sqrt(px * px + py * py);
}

}  // namespace

SynthDigits make_synthetic_digits(int count, std::uint64_t seed) {
  SynthDigits out;
  out.images.count = count;
  out.images.rows = kSide;
  out.images.cols = kSide;
  out.images.pixels.assign(std::size_t(count) * kSide * kSide, 0);
  out.labels.resize(std::size_t(count));

  for (int idx = 0; idx < count; ++idx) {
    const int digit = idx % 10;
    out.labels[std::size_t(idx)] = std::uint8_t(digit);
    Rng rng = make_stream(seed, streams::kSynth, std::uint64_t(idx));

    const double angle = (rng.next_double() * 2.0 - 1.0) * 0.24;
    const double scale_x = 0.82 + rng.next_double() * 0.33;
    const double scale_y = 0.82 + rng.next_double() * 0.33;
    const double shear = (rng.next_double() * 2.0 - 1.0) * 0.18;
    const double shift_x = (rng.next_double() * 2.0 - 1.0) * 2.2;
    const double shift_y = (rng.next_double() * 2.0 - 1.0) * 2.2;
    const double half_width = 0.65 + rng.next_double() * 0.65;
    const double ca = std::cos(angle), sa = std::sin(angle);

    auto place = [&](Point p) -> Point {
      // jitter in template space, then shear/scale/rotate about the centre
      double x = (p.x - 0.5 + (rng.next_double() * 2.0 - 1.0) * 0.012) * 20.0;
      double y = (p.y - 0.5 + (rng.next_double() * 2.0 - 1.0) * 0.012) * 20.0;
      x += shear * y;
      x *= scale_x;
      y *= scale_y;
      return {14.0 + ca * x - sa * y + shift_x, 14.0 + sa * x + ca * y + shift_y};
    };

    std::vector<Stroke> strokes = digit_skeleton(digit);
    for (Stroke& s : strokes)
      for (Point& p : s) p = place(p);

    std::uint8_t* pixels = out.images.pixels.data() + std::size_t(idx) * kSide * kSide;
    for (int row = 0; row < kSide; ++row) {
      for (int col = 0; col < kSide; ++col) {
        const Point p{double(col), double(row)};
        double dist = 1e9;
        for (const Stroke& s : strokes)
          for (std::size_t k = 0; k + 1 < s.size(); ++k)
            dist = std::min(dist, segment_distance(p, s[k], s[k + 1]));
        const double coverage = std::clamp(half_width - dist + 0.5, 0.0, 1.0);
        pixels[row * kSide + col] = std::uint8_t(std::lround(coverage * 255.0));
      }
    }
    for (int p = 0; p < kSide * kSide; ++p) {
      const double noisy =
          double(pixels[p]) + (rng.next_double() * 2.0 - 1.0) * 16.0;
      pixels[p] = std::uint8_t(std::lround(std::clamp(noisy, 0.0, 255.0)));
    }
  }
  return out;
}

LabeledImageSet make_synthetic_dataset(int count, std::uint64_t seed) {
  const SynthDigits synth = make_synthetic_digits(count, seed);
  return make_labeled_set(synth.images, synth.labels);
}

}  // namespace dam
