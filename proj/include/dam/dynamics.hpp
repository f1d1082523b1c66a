#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "dam/energy.hpp"
#include "dam/state.hpp"

namespace dam {

enum class UpdateOrder { RandomPermutationPerSweep, FixedScan };

struct DynamicsConfig {
  int max_sweeps = 100;
  UpdateOrder order = UpdateOrder::RandomPermutationPerSweep;
  std::uint64_t seed = 0;
};

struct ConvergenceReport {
  SpinState final_state;
  int sweeps_used = 0;
  bool converged = false;          // a full sweep produced zero flips
  int best_overlap = 0;            // max_mu sum_i xi_mu_i sigma_i
  int best_memory_index = -1;
  int best_abs_overlap = 0;        // max_mu |overlap|; mirror-tolerant statistic
  int best_abs_memory_index = -1;
};

// Called after every visited spin; `flipped` reports whether it moved.
using UpdateObserver = std::function<void(int spin, bool flipped)>;

// One Eq.-style asynchronous update: sigma_i <- sign(energy gap), keeping the
// current value on an exact tie so the energy never increases. Returns whether
// the spin flipped; the cache is updated iff it did.
bool update_spin(SpinState& state, int i, const MemorySet& memories,
                 const EnergyModel& model, OverlapCache& cache);

// Sweeps all spins until a zero-flip sweep or max_sweeps. Total energy is
// non-increasing across every single update.
ConvergenceReport evolve(SpinState initial, const MemorySet& memories,
                         const EnergyModel& model, const DynamicsConfig& config,
                         const UpdateObserver* observer = nullptr);

// Three-unit energy with the four XOR truth-table rows embedded as memories.
// Accepts real arguments so the cube-corner identities can be probed off-corner.
template <class Scalar>
Scalar xor_energy(Scalar x, Scalar y, Scalar z, const EnergyModel& model) {
  return -eval_F(-x - y - z, model) - eval_F(-x + y + z, model) -
         eval_F(x - y + z, model) - eval_F(x + y - z, model);
}

// Output spin minimizing the XOR energy with inputs clamped; nullopt when the
// two candidate energies tie (the n=1 and n=2 polynomial cases).
std::optional<int> xor_solve(int x, int y, const EnergyModel& model);

}  // namespace dam
