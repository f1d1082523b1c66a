#include "dam/capacity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dam {

namespace {

void require_odd_ge_minus1(int k) {
  if (k < -1 || (k >= 0 && k % 2 == 0))
    throw std::invalid_argument("double_factorial: k must be odd or -1");
}

double log_error_probability(int sites, double memory_count, int power) {
  const double log_dfact = log_double_factorial(2 * power - 3);
  const double log_nnm1 = double(power - 1) * std::log(double(sites));
  const double amplitude =
      0.5 * (log_dfact - std::log(2.0 * std::numbers::pi) +
             std::log(memory_count) - log_nnm1);
  const double exponent =
      std::exp(log_nnm1 - std::log(2.0 * memory_count) - log_dfact);
  return amplitude - exponent;
}

}  // namespace

std::int64_t double_factorial(int k) {
  require_odd_ge_minus1(k);
  if (k > 33) throw std::invalid_argument("double_factorial: k > 33 overflows int64");
  std::int64_t acc = 1;
  for (int j = k; j >= 3; j -= 2) acc *= j;
  return acc;
}

double log_double_factorial(int k) {
  require_odd_ge_minus1(k);
  double acc = 0.0;
  for (int j = k; j >= 3; j -= 2) acc += std::log(double(j));
  return acc;
}

double error_probability(int sites, std::int64_t memory_count, int power) {
  if (sites < 2 || memory_count < 1 || power < 2)
    throw std::invalid_argument("error_probability: need N >= 2, K >= 1, n >= 2");
  return std::exp(log_error_probability(sites, double(memory_count), power));
}

std::int64_t k_max_at_error(int sites, int power, double threshold) {
  if (threshold <= 0) return 0;
  if (error_probability(sites, 1, power) > threshold) return 0;
  // P is strictly increasing in K, so grow an upper bracket then bisect.
  std::int64_t lo = 1, hi = 2;
  constexpr std::int64_t kCap = std::int64_t(1) << 60;
  while (hi < kCap && error_probability(sites, hi, power) <= threshold) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= kCap) return lo;  // threshold unreachable within the bracket cap
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (error_probability(sites, mid, power) <= threshold ? lo : hi) = mid;
  }
  return lo;
}

double k_max_no_errors_real(int sites, int power) {
  if (sites < 3 || power < 2)
    throw std::invalid_argument("k_max_no_errors: need N >= 3, n >= 2");
  const double log_value = double(power - 1) * std::log(double(sites)) -
                           std::log(2.0) - log_double_factorial(2 * power - 3) -
                           std::log(std::log(double(sites)));
  return std::exp(log_value);
}

std::int64_t k_max_no_errors(int sites, int power) {
  return std::llround(k_max_no_errors_real(sites, power));
}

double alpha_n(int power, double threshold) {
  if (power < 2 || threshold <= 0 || threshold >= 1)
    throw std::invalid_argument("alpha_n: need n >= 2, threshold in (0,1)");
  // With K = alpha N^(n-1) the probability collapses to
  //   sqrt(d!! alpha / 2 pi) exp(-1 / (2 alpha d!!)),
  // independent of N; solve for alpha by bisection (monotone in alpha).
  const double log_dfact = log_double_factorial(2 * power - 3);
  auto probability = [&](double alpha) {
    return std::exp(0.5 * (log_dfact + std::log(alpha) -
                           std::log(2.0 * std::numbers::pi)) -
                    std::exp(-std::log(2.0 * alpha) - log_dfact));
  };
  double lo = 1e-12, hi = 1.0;
  while (probability(hi) < threshold) hi *= 2;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (probability(mid) < threshold ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dam
