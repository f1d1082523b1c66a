#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dam/dynamics.hpp"
#include "dam/energy.hpp"

namespace dam {

// Monte-Carlo recovery experiment grid.
struct TrialGrid {
  std::vector<int> sites_values;
  std::vector<int> memory_counts;
  std::vector<int> powers;
  int trials_per_cell = 1000;
  std::uint64_t seed = 0;
  EnergyKind kind = EnergyKind::Polynomial;

  bool valid() const { return trials_per_cell >= 1; }
};

// Distribution of best final overlaps over trials for one (N, K, n, kind) cell.
struct OverlapHistogram {
  int sites = 0;
  int memory_count = 0;
  int power = 0;
  EnergyKind kind = EnergyKind::Polynomial;
  std::uint64_t seed = 0;
  std::int64_t total = 0;
  std::int64_t nonconverged = 0;
  std::vector<std::int64_t> counts;      // signed best overlap, index o + sites
  std::vector<std::int64_t> abs_counts;  // max_mu |overlap|, index 0..sites

  std::int64_t count_at(int overlap) const { return counts[std::size_t(overlap + sites)]; }
  // Fraction of trials whose best signed overlap equals N.
  double perfect_fraction_signed() const;
  // Fraction of trials that land exactly on a stored pattern or its mirror.
  double perfect_fraction() const;
};

struct RecoveryOptions {
  int max_sweeps = 100;
  int threads = 0;  // 0 = hardware concurrency
  UpdateOrder order = UpdateOrder::RandomPermutationPerSweep;
};

// Fresh random patterns keyed by `seed`; per-trial start states and update
// orders keyed by (seed, trial). Deterministic for any thread count.
OverlapHistogram run_recovery_trials(int sites, int memory_count, int power,
                                     EnergyKind kind, int trials, std::uint64_t seed,
                                     const RecoveryOptions& options = {});

// One cell per (N, K, n) in the grid, each with its own derived seed.
std::vector<OverlapHistogram> run_grid(const TrialGrid& grid,
                                       const RecoveryOptions& options = {});

struct KHalfPoint {
  int memory_count = 0;
  double fraction = 0.0;
};

struct KHalfResult {
  int sites = 0;
  int power = 0;
  EnergyKind kind = EnergyKind::Polynomial;
  int trials = 0;
  std::uint64_t seed = 0;
  int k_half = 0;
  double fraction_at_khalf = 0.0;
  bool saturated = false;             // fraction never fell below 1/2 in the bracket
  std::vector<KHalfPoint> probes;     // every (K, fraction) evaluated, in probe order
};

struct KHalfOptions {
  int max_sweeps = 100;
  int threads = 0;
  int k_limit = 1 << 20;  // bracket growth cap
};

// Largest K whose perfect-recovery fraction is still >= 1/2, found by
// bisection under common random numbers: start states and update orders are
// shared across K, and pattern row mu is drawn from its own stream so that
// the K-pattern set is a prefix of every larger set. This keeps the measured
// fraction monotone along the search path.
KHalfResult find_k_half(int sites, int power, EnergyKind kind, int trials,
                        std::uint64_t seed, const KHalfOptions& options = {});

// CSV writers; fixed schemas `overlap,count` and
// `N,n,kind,k_half,fraction_at_khalf`.
void write_histogram_csv(std::ostream& out, const OverlapHistogram& histogram);
void write_histogram_abs_csv(std::ostream& out, const OverlapHistogram& histogram);
void write_khalf_csv(std::ostream& out, const std::vector<KHalfResult>& results);

std::string kind_name(EnergyKind kind);

}  // namespace dam
