#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dam/energy.hpp"
#include "dam/rng.hpp"
#include "dam/state.hpp"

using namespace dam;

TEST_CASE("eval_F polynomial and rectified branches") {
  CHECK(eval_F(-2.0, polynomial(3)) == -8.0);
  CHECK(eval_F(-2.0, rectified(3)) == 0.0);
  CHECK(eval_F(2.0, rectified(3)) == 8.0);
  CHECK(eval_F(0.0, rectified(4)) == 0.0);
  CHECK(eval_F(0.0, polynomial(4)) == 0.0);
  CHECK(eval_F(3.0, polynomial(1)) == 3.0);
}

TEST_CASE("eval_f derivative values and the rectified zero branch") {
  CHECK(eval_f(2.0, rectified(3)) == 12.0);
  CHECK(eval_f(-5.0, rectified(2)) == 0.0);
  CHECK(eval_f(3.0, polynomial(1)) == 1.0);
  // subgradient convention at the kink
  CHECK(eval_f(0.0, rectified(1)) == 0.0);
  CHECK(eval_f(0.0, rectified(7)) == 0.0);
  CHECK(eval_f(0.0, polynomial(1)) == 1.0);
}

TEST_CASE("rep rectified powers") {
  CHECK(rep(3.0, 2) == 9.0);
  CHECK(rep(-1.0, 2) == 0.0);
  CHECK(rep(2.0, 1) == 2.0);
  CHECK(rep(2.0, 0) == 1.0);
  CHECK(rep(0.0, 0) == 0.0);
  CHECK(rep(-3.0, 0) == 0.0);
}

TEST_CASE("pow_int matches exact integer powers") {
  CHECK(pow_int(3.0, 0) == 1.0);
  CHECK(pow_int(0.0, 0) == 1.0);
  CHECK(pow_int(-2.0, 5) == -32.0);
  CHECK(pow_int(7.0, 3) == 343.0);
  CHECK(pow_int(2.0, 30) == 1073741824.0);
}

TEST_CASE("polynomial decomposes into rectified halves") {
  Rng rng = make_stream(11, 1);
  for (int n = 1; n <= 7; ++n) {
    for (int rep_count = 0; rep_count < 200; ++rep_count) {
      const double x = (rng.next_double() * 2.0 - 1.0) * 20.0;
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const double lhs = eval_F(x, polynomial(n));
      const double rhs = eval_F(x, rectified(n)) + sign * eval_F(-x, rectified(n));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("eval_f agrees with central differences of eval_F") {
  Rng rng = make_stream(12, 1);
  for (EnergyKind kind : {EnergyKind::Polynomial, EnergyKind::RectifiedPolynomial}) {
    for (int n : {1, 2, 3, 5, 8}) {
      const EnergyModel model{n, kind};
      for (int rep_count = 0; rep_count < 300; ++rep_count) {
        double x = (rng.next_double() * 2.0 - 1.0) * 5.0;
        if (std::abs(x) < 0.1) x = x < 0 ? x - 0.1 : x + 0.1;
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        const double numeric =
            (eval_F(x + h, model) - eval_F(x - h, model)) / (2.0 * h);
        const double analytic = eval_f(x, model);
        const double scale = std::max({1e-12, std::abs(numeric), std::abs(analytic)});
        CHECK(std::abs(numeric - analytic) / scale <= 1e-6);
      }
    }
  }
}

TEST_CASE("total_energy on pinned instances") {
  MemorySet ones;
  ones.patterns.resize(1, 3);
  ones.patterns.setConstant(1);
  SpinState aligned{SpinVec::Constant(3, 1)};
  CHECK(total_energy(ones, aligned, polynomial(2)) == -9.0);

  SpinState flipped{SpinVec::Constant(3, -1)};
  CHECK(total_energy(ones, flipped, rectified(3)) == 0.0);

  MemorySet two;
  two.patterns.resize(2, 2);
  two.patterns << 1, 1, 1, -1;
  SpinState up{SpinVec::Constant(2, 1)};
  CHECK(total_energy(two, up, polynomial(2)) == -4.0);
}

TEST_CASE("total_energy rejects mismatched dimensions") {
  MemorySet m;
  m.patterns.resize(2, 4);
  m.patterns.setConstant(1);
  SpinState s{SpinVec::Constant(3, 1)};
  CHECK_THROWS_AS(total_energy(m, s, polynomial(2)), std::invalid_argument);
}

TEST_CASE("energy_gap on pinned instances") {
  {
    MemorySet m;
    m.patterns.resize(1, 3);
    m.patterns.setConstant(1);
    SpinState s{SpinVec::Constant(3, 1)};
    const EnergyModel model = polynomial(2);
    const OverlapCache cache = OverlapCache::build(m, s, model);
    CHECK(energy_gap(m, s, 0, model, cache) == 8.0);  // F(3)-F(1)
  }
  {
    // sign symmetry for even powers: the fully anti-aligned state carries the
    // negated gap of the aligned one, F(0)-F(-2) against F(2)-F(0)
    MemorySet m;
    m.patterns.resize(1, 2);
    m.patterns.setConstant(1);
    const EnergyModel model = polynomial(2);
    SpinState down{SpinVec::Constant(2, -1)};
    const OverlapCache down_cache = OverlapCache::build(m, down, model);
    const double down_gap = energy_gap(m, down, 0, model, down_cache);
    CHECK(down_gap == -4.0);
    SpinState up{SpinVec::Constant(2, 1)};
    const OverlapCache up_cache = OverlapCache::build(m, up, model);
    CHECK(energy_gap(m, up, 0, model, up_cache) == -down_gap);
    // agrees with the explicit two-energy difference
    SpinState plus = down;
    plus.values[0] = 1;
    CHECK(down_gap == total_energy(m, down, model) - total_energy(m, plus, model));
  }
}

TEST_CASE("linear polynomial gap telescopes to 2 sum_mu xi_mu_i") {
  Rng rng = make_stream(13, 1);
  const EnergyModel model = polynomial(1);
  for (int rep_count = 0; rep_count < 50; ++rep_count) {
    const int sites = 3 + int(rng.next_below(8));
    const int k = 1 + int(rng.next_below(6));
    const MemorySet memories = random_memory_set(k, sites, rng);
    const SpinState state = random_spin_state(sites, rng);
    const OverlapCache cache = OverlapCache::build(memories, state, model);
    for (int i = 0; i < sites; ++i) {
      const double expected = 2.0 * memories.patterns.col(i).cast<double>().sum();
      CHECK(energy_gap(memories, state, i, model, cache) == expected);
    }
  }
}

TEST_CASE("energy_gap equals the explicit two-energy difference exactly") {
  Rng rng = make_stream(14, 1);
  for (EnergyKind kind : {EnergyKind::Polynomial, EnergyKind::RectifiedPolynomial}) {
    for (int n : {1, 2, 3, 5}) {
      const EnergyModel model{n, kind};
      for (int rep_count = 0; rep_count < 100; ++rep_count) {
        const int sites = 2 + int(rng.next_below(11));  // N <= 12
        const int k = 1 + int(rng.next_below(8));       // K <= 8
        const MemorySet memories = random_memory_set(k, sites, rng);
        SpinState state = random_spin_state(sites, rng);
        const OverlapCache cache = OverlapCache::build(memories, state, model);
        const int i = int(rng.next_below(std::uint64_t(sites)));
        SpinState minus = state, plus = state;
        minus.values[i] = -1;
        plus.values[i] = 1;
        const double explicit_difference =
            total_energy(memories, minus, model) - total_energy(memories, plus, model);
        CHECK(energy_gap(memories, state, i, model, cache) == explicit_difference);
      }
    }
  }
}

TEST_CASE("overlap cache flip updates stay exact") {
  Rng rng = make_stream(15, 1);
  const EnergyModel model = polynomial(3);
  const MemorySet memories = random_memory_set(6, 10, rng);
  SpinState state = random_spin_state(10, rng);
  OverlapCache cache = OverlapCache::build(memories, state, model);
  for (int step = 0; step < 200; ++step) {
    const int i = int(rng.next_below(10));
    const std::int8_t old = state.values[i];
    state.values[i] = std::int8_t(-old);
    cache.apply_flip(memories, i, old);
    REQUIRE(cache.consistent_with(memories, state));
  }
  SpinState other = random_spin_state(10, rng);
  if (other.values != state.values) CHECK_FALSE(cache.consistent_with(memories, other));
}
