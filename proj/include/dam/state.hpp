#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dam/energy.hpp"
#include "dam/rng.hpp"

namespace dam {

using SpinVec = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;
// K x N, one row per stored pattern. Column-major so that the update kernel,
// which walks all patterns at a fixed site, streams contiguous memory.
using PatternMat = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Binary neuron configuration, entries in {-1, +1}.
struct SpinState {
  SpinVec values;

  int size() const { return int(values.size()); }
};

// The K stored binary patterns.
struct MemorySet {
  PatternMat patterns;

  int count() const { return int(patterns.rows()); }
  int sites() const { return int(patterns.cols()); }
};

bool all_pm1(const SpinVec& v);
bool all_pm1(const PatternMat& m);

SpinState random_spin_state(int sites, Rng& rng);
MemorySet random_memory_set(int count, int sites, Rng& rng);

// Per-pattern overlaps m_mu = sum_j xi_mu_j sigma_j, kept in exact integer
// arithmetic and updated in O(K) per spin flip. Also carries the tabulated
// per-site energy differences F(s+1) - F(s-1), which is the only form the
// update kernel ever needs F in.
struct OverlapCache {
  Eigen::VectorXi overlaps;
  std::vector<double> gap_table;  // index s + sites + 1, s in [-sites-1, sites+1]
  int sites = 0;
  EnergyModel model;

  static OverlapCache build(const MemorySet& memories, const SpinState& state,
                            const EnergyModel& model);

  double gap_at(int s) const { return gap_table[std::size_t(s + sites + 1)]; }

  // Call after flipping spin i away from old_value: m_mu += -2 xi_mu_i old_value.
  void apply_flip(const MemorySet& memories, int i, std::int8_t old_value);

  bool consistent_with(const MemorySet& memories, const SpinState& state) const;
};

Eigen::VectorXi compute_overlaps(const MemorySet& memories, const SpinState& state);

// E = -sum_mu F(m_mu).
double total_energy(const MemorySet& memories, const SpinState& state,
                    const EnergyModel& model);

// Energy of the configuration with sigma_i = -1 minus the one with
// sigma_i = +1, everything else clamped. O(K) via the cache.
double energy_gap(const MemorySet& memories, const SpinState& state, int i,
                  const EnergyModel& model, const OverlapCache& cache);

}  // namespace dam
