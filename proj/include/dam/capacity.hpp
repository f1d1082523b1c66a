#pragma once

#include <cstdint>

namespace dam {

// k!! for odd k >= -1, with (-1)!! = 1. Exact up to k = 33 (int64 limit).
std::int64_t double_factorial(int k);

// ln(k!!) for odd k >= -1; valid far beyond the exact-integer range.
double log_double_factorial(int k);

// Closed-form asymptotic single-spin instability probability for K random
// patterns on N sites under the degree-n polynomial energy:
//   P = sqrt((2n-3)!!/(2 pi) * K/N^(n-1)) * exp(-N^(n-1) / (2 K (2n-3)!!)).
// An asymptotic estimate, not an exact probability; it exceeds 1 deep in the
// overloaded regime.
double error_probability(int sites, std::int64_t memory_count, int power);

// Largest K with error_probability(N, K, n) <= threshold (monotone bisection).
std::int64_t k_max_at_error(int sites, int power, double threshold);

// Perfect-recovery bound K ~ N^(n-1) / (2 (2n-3)!! ln N), unrounded.
double k_max_no_errors_real(int sites, int power);

// Same, rounded to the nearest integer.
std::int64_t k_max_no_errors(int sites, int power);

// The prefactor alpha_n in K_max = alpha_n N^(n-1) implied by the threshold;
// independent of N in this approximation, recovered numerically.
double alpha_n(int power, double threshold);

// Capacity theory for one (N, n) pair at a retrieval-error threshold.
struct CapacityTheory {
  int sites = 0;
  int power = 2;
  double error_threshold = 0.005;

  bool valid() const {
    return sites >= 2 && power >= 2 && error_threshold > 0 && error_threshold < 1;
  }
  std::int64_t k_max() const { return k_max_at_error(sites, power, error_threshold); }
  std::int64_t k_perfect() const { return k_max_no_errors(sites, power); }
  double alpha() const { return alpha_n(power, error_threshold); }
};

}  // namespace dam
