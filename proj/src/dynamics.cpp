#include "dam/dynamics.hpp"

#include <stdexcept>

namespace dam {

bool update_spin(SpinState& state, int i, const MemorySet& memories,
                 const EnergyModel& model, OverlapCache& cache) {
  const double gap = energy_gap(memories, state, i, model, cache);
  if (gap == 0.0) return false;  // tie keeps the current spin
  const std::int8_t target = gap > 0.0 ? std::int8_t(1) : std::int8_t(-1);
  const std::int8_t old = state.values[i];
  if (target == old) return false;
  state.values[i] = target;
  cache.apply_flip(memories, i, old);
  return true;
}

ConvergenceReport evolve(SpinState initial, const MemorySet& memories,
                         const EnergyModel& model, const DynamicsConfig& config,
                         const UpdateObserver* observer) {
  if (memories.sites() != initial.size())
    throw std::invalid_argument("evolve: memory/state size mismatch");
  if (config.max_sweeps < 1) throw std::invalid_argument("evolve: max_sweeps < 1");

  ConvergenceReport report;
  report.final_state = std::move(initial);
  SpinState& state = report.final_state;
  const int sites = state.size();

  OverlapCache cache = OverlapCache::build(memories, state, model);
  Rng order_rng = make_stream(config.seed, streams::kTrialOrder);
  std::vector<int> order;

  for (int sweep = 0; sweep < config.max_sweeps; ++sweep) {
    int flips = 0;
    if (config.order == UpdateOrder::RandomPermutationPerSweep) {
      order = order_rng.permutation(sites);
      for (int i : order) {
        const bool flipped = update_spin(state, i, memories, model, cache);
        flips += flipped;
        if (observer) (*observer)(i, flipped);
      }
    } else {
      for (int i = 0; i < sites; ++i) {
        const bool flipped = update_spin(state, i, memories, model, cache);
        flips += flipped;
        if (observer) (*observer)(i, flipped);
      }
    }
    ++report.sweeps_used;
    if (flips == 0) {
      report.converged = true;
      break;
    }
  }

  report.best_overlap = cache.overlaps.maxCoeff(&report.best_memory_index);
  report.best_abs_overlap =
      cache.overlaps.cwiseAbs().maxCoeff(&report.best_abs_memory_index);
  return report;
}

std::optional<int> xor_solve(int x, int y, const EnergyModel& model) {
  const double diff = xor_energy(double(x), double(y), -1.0, model) -
                      xor_energy(double(x), double(y), 1.0, model);
  if (diff == 0.0) return std::nullopt;
  return diff > 0.0 ? 1 : -1;
}

}  // namespace dam
