#include "dam/capacity_lab.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dam/capacity.hpp"
#include "dam/parallel.hpp"
#include "dam/rng.hpp"

namespace dam {

namespace {

struct TrialOutcome {
  int best_overlap = 0;
  int best_abs_overlap = 0;
  bool converged = false;
};

OverlapHistogram reduce_outcomes(int sites, int memory_count, int power,
                                 EnergyKind kind, std::uint64_t seed,
                                 const std::vector<TrialOutcome>& outcomes) {
  OverlapHistogram h;
  h.sites = sites;
  h.memory_count = memory_count;
  h.power = power;
  h.kind = kind;
  h.seed = seed;
  h.counts.assign(std::size_t(2 * sites + 1), 0);
  h.abs_counts.assign(std::size_t(sites + 1), 0);
  for (const TrialOutcome& t : outcomes) {
    ++h.total;
    ++h.counts[std::size_t(t.best_overlap + sites)];
    ++h.abs_counts[std::size_t(t.best_abs_overlap)];
    h.nonconverged += !t.converged;
  }
  return h;
}

// Pattern row mu drawn from its own (seed, row) stream: the K-row set is a
// prefix of every larger one, which the K-half search relies on.
MemorySet prefix_memory_set(int memory_count, int sites, std::uint64_t seed) {
  MemorySet m;
  m.patterns.resize(memory_count, sites);
  for (int mu = 0; mu < memory_count; ++mu) {
    Rng row = make_stream(seed, streams::kKHalfMemoryRow, std::uint64_t(mu));
    for (int i = 0; i < sites; ++i) m.patterns(mu, i) = row.next_sign();
  }
  return m;
}

std::vector<TrialOutcome> run_cell(const MemorySet& memories, const EnergyModel& model,
                                   int trials, std::uint64_t seed,
                                   std::uint64_t start_tag, std::uint64_t order_tag,
                                   const RecoveryOptions& options) {
  const int sites = memories.sites();
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  parallel_for(trials, options.threads, [&](std::int64_t t) {
    Rng start_rng = make_stream(seed, start_tag, std::uint64_t(t));
    SpinState start = random_spin_state(sites, start_rng);
    DynamicsConfig config;
    config.max_sweeps = options.max_sweeps;
    config.order = options.order;
    config.seed = derive_seed(seed, order_tag, std::uint64_t(t));
    const ConvergenceReport report = evolve(std::move(start), memories, model, config);
    outcomes[std::size_t(t)] = {report.best_overlap, report.best_abs_overlap,
                                report.converged};
  });
  return outcomes;
}

}  // namespace

double OverlapHistogram::perfect_fraction_signed() const {
  if (total == 0) return 0.0;
  return double(counts[std::size_t(2 * sites)]) / double(total);
}

double OverlapHistogram::perfect_fraction() const {
  if (total == 0) return 0.0;
  return double(abs_counts[std::size_t(sites)]) / double(total);
}

OverlapHistogram run_recovery_trials(int sites, int memory_count, int power,
                                     EnergyKind kind, int trials, std::uint64_t seed,
                                     const RecoveryOptions& options) {
  if (sites < 1 || memory_count < 1 || trials < 1)
    throw std::invalid_argument("run_recovery_trials: bad dimensions");
  const EnergyModel model{power, kind};
  Rng memory_rng = make_stream(seed, streams::kMemories);
  const MemorySet memories = random_memory_set(memory_count, sites, memory_rng);
  const auto outcomes = run_cell(memories, model, trials, seed, streams::kTrialStart,
                                 streams::kTrialOrder, options);
  return reduce_outcomes(sites, memory_count, power, kind, seed, outcomes);
}

std::vector<OverlapHistogram> run_grid(const TrialGrid& grid,
                                       const RecoveryOptions& options) {
  if (!grid.valid()) throw std::invalid_argument("run_grid: invalid grid");
  std::vector<OverlapHistogram> out;
  for (int n : grid.powers)
    for (int sites : grid.sites_values)
      for (int k : grid.memory_counts) {
        const std::uint64_t cell_seed =
            derive_seed(grid.seed, streams::kCell, std::uint64_t(sites),
                        std::uint64_t(k), std::uint64_t(n),
                        std::uint64_t(grid.kind == EnergyKind::Polynomial ? 0 : 1));
        out.push_back(run_recovery_trials(sites, k, n, grid.kind,
                                          grid.trials_per_cell, cell_seed, options));
      }
  return out;
}

KHalfResult find_k_half(int sites, int power, EnergyKind kind, int trials,
                        std::uint64_t seed, const KHalfOptions& options) {
  if (sites < 2 || trials < 1) throw std::invalid_argument("find_k_half: bad arguments");
  const EnergyModel model{power, kind};

  KHalfResult result;
  result.sites = sites;
  result.power = power;
  result.kind = kind;
  result.trials = trials;
  result.seed = seed;

  RecoveryOptions recovery;
  recovery.max_sweeps = options.max_sweeps;
  recovery.threads = options.threads;

  auto fraction_at = [&](int k) {
    const MemorySet memories = prefix_memory_set(k, sites, seed);
    const auto outcomes = run_cell(memories, model, trials, seed, streams::kKHalfStart,
                                   streams::kKHalfOrder, recovery);
    std::int64_t perfect = 0;
    for (const TrialOutcome& t : outcomes) perfect += (t.best_abs_overlap == sites);
    const double fraction = double(perfect) / double(trials);
    result.probes.push_back({k, fraction});
    return fraction;
  };

  // Bracket: grow K from the theory estimate until the fraction drops below 1/2.
  int lo = 1;
  double lo_fraction = fraction_at(lo);
  if (lo_fraction < 0.5) {
    result.k_half = 0;
    result.fraction_at_khalf = lo_fraction;
    return result;
  }
  int hi = std::max(2, int(std::min<double>(k_max_no_errors_real(std::max(sites, 3), power),
                                            double(options.k_limit))));
  double hi_fraction = fraction_at(hi);
  while (hi_fraction >= 0.5) {
    if (hi >= options.k_limit) {
      result.saturated = true;
      result.k_half = hi;
      result.fraction_at_khalf = hi_fraction;
      return result;
    }
    lo = hi;
    lo_fraction = hi_fraction;
    hi = std::min(options.k_limit, hi * 2);
    hi_fraction = fraction_at(hi);
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double mid_fraction = fraction_at(mid);
    if (mid_fraction >= 0.5) {
      lo = mid;
      lo_fraction = mid_fraction;
    } else {
      hi = mid;
    }
  }
  result.k_half = lo;
  result.fraction_at_khalf = lo_fraction;
  return result;
}

std::string kind_name(EnergyKind kind) {
  return kind == EnergyKind::Polynomial ? "poly" : "rect";
}

void write_histogram_csv(std::ostream& out, const OverlapHistogram& histogram) {
  out << "overlap,count\n";
  for (int o = -histogram.sites; o <= histogram.sites; ++o)
    out << o << ',' << histogram.count_at(o) << '\n';
}

void write_histogram_abs_csv(std::ostream& out, const OverlapHistogram& histogram) {
  out << "overlap,count\n";
  for (int o = 0; o <= histogram.sites; ++o)
    out << o << ',' << histogram.abs_counts[std::size_t(o)] << '\n';
}

void write_khalf_csv(std::ostream& out, const std::vector<KHalfResult>& results) {
  out << "N,n,kind,k_half,fraction_at_khalf\n";
  char buffer[64];
  for (const KHalfResult& r : results) {
    std::snprintf(buffer, sizeof buffer, "%.17g", r.fraction_at_khalf);
    out << r.sites << ',' << r.power << ',' << kind_name(r.kind) << ',' << r.k_half
        << ',' << buffer << '\n';
  }
}

}  // namespace dam
