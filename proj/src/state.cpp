#include "dam/state.hpp"

#include <cassert>
#include <stdexcept>

namespace dam {

bool all_pm1(const SpinVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 1 && v[i] != -1) return false;
  return true;
}

bool all_pm1(const PatternMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 1 && m(i, j) != -1) return false;
  return true;
}

SpinState random_spin_state(int sites, Rng& rng) {
  SpinState s;
  s.values.resize(sites);
  for (int i = 0; i < sites; ++i) s.values[i] = rng.next_sign();
  return s;
}

MemorySet random_memory_set(int count, int sites, Rng& rng) {
  MemorySet m;
  m.patterns.resize(count, sites);
  // Row-by-row draw order: MemorySet(K) is a prefix of MemorySet(K') for
  // K < K' when the caller feeds per-row streams instead; here one stream
  // fills the whole matrix.
  for (int mu = 0; mu < count; ++mu)
    for (int i = 0; i < sites; ++i) m.patterns(mu, i) = rng.next_sign();
  return m;
}

Eigen::VectorXi compute_overlaps(const MemorySet& memories, const SpinState& state) {
  if (memories.sites() != state.size())
    throw std::invalid_argument("compute_overlaps: memory/state size mismatch");
  return memories.patterns.cast<int>() * state.values.cast<int>();
}

OverlapCache OverlapCache::build(const MemorySet& memories, const SpinState& state,
                                 const EnergyModel& model) {
  OverlapCache cache;
  cache.sites = memories.sites();
  cache.model = model;
  cache.overlaps = compute_overlaps(memories, state);
  cache.gap_table.resize(std::size_t(2 * cache.sites + 3));
  for (int s = -cache.sites - 1; s <= cache.sites + 1; ++s)
    cache.gap_table[std::size_t(s + cache.sites + 1)] =
        eval_F(double(s + 1), model) - eval_F(double(s - 1), model);
  return cache;
}

void OverlapCache::apply_flip(const MemorySet& memories, int i, std::int8_t old_value) {
  const std::int8_t* col = memories.patterns.col(i).data();
  const int delta = -2 * int(old_value);
  int* m = overlaps.data();
  const int count = int(overlaps.size());
  for (int mu = 0; mu < count; ++mu) m[mu] += delta * int(col[mu]);
}

bool OverlapCache::consistent_with(const MemorySet& memories, const SpinState& state) const {
  if (sites != state.size() || overlaps.size() != memories.count()) return false;
  return overlaps == compute_overlaps(memories, state);
}

double total_energy(const MemorySet& memories, const SpinState& state,
                    const EnergyModel& model) {
  const Eigen::VectorXi m = compute_overlaps(memories, state);
  double e = 0.0;
  for (Eigen::Index mu = 0; mu < m.size(); ++mu) e -= eval_F(double(m[mu]), model);
  return e;
}

double energy_gap(const MemorySet& memories, const SpinState& state, int i,
                  const EnergyModel& model, const OverlapCache& cache) {
  assert(i >= 0 && i < state.size());
  assert(cache.model.power == model.power && cache.model.kind == model.kind);
#ifndef NDEBUG
  assert(cache.consistent_with(memories, state) && "stale overlap cache");
#endif
  const std::int8_t* col = memories.patterns.col(i).data();
  const int* m = cache.overlaps.data();
  const int sigma = int(state.values[i]);
  const int count = memories.count();
  const double* table = cache.gap_table.data() + cache.sites + 1;
  double acc = 0.0;
  for (int mu = 0; mu < count; ++mu) {
    const int xi = int(col[mu]);
    acc += xi * table[m[mu] - xi * sigma];
  }
  return acc;
}

}  // namespace dam
