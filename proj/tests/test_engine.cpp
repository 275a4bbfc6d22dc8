#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "credsim/error.hpp"
#include "credsim/event_queue.hpp"
#include "credsim/rng.hpp"
#include "credsim/samplers.hpp"

using namespace credsim;

TEST_CASE("single event pops at its time") {
  EventQueue q;
  q.schedule(VirtualTime{10'000}, EventKind::kDebitTick);
  auto ev = q.pop_until(VirtualTime{20'000});
  REQUIRE(ev.has_value());
  CHECK(ev->at.us == 10'000);
  CHECK(ev->kind == EventKind::kDebitTick);
  CHECK(!q.pop_until(VirtualTime{20'000}).has_value());
  CHECK(q.now().us == 20'000);
}

TEST_CASE("equal-time events dispatch in insertion order") {
  EventQueue q;
  q.schedule(VirtualTime{500}, EventKind::kVcpuWake, 7);
  q.schedule(VirtualTime{500}, EventKind::kVcpuWake, 8);
  auto a = q.pop_until(VirtualTime{500});
  auto b = q.pop_until(VirtualTime{500});
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->arg == 7);
  CHECK(b->arg == 8);
  CHECK(a->seq < b->seq);
}

TEST_CASE("scheduling into the past is rejected") {
  EventQueue q;
  q.schedule(VirtualTime{10}, EventKind::kDebitTick);
  (void)q.pop_until(VirtualTime{10});
  CHECK_THROWS_AS(q.schedule(VirtualTime{5}, EventKind::kDebitTick), SimError);
}

TEST_CASE("cancelled events never dispatch") {
  EventQueue q;
  EventHandle h = q.schedule(VirtualTime{100}, EventKind::kVcpuYield, 1);
  q.schedule(VirtualTime{200}, EventKind::kVcpuYield, 2);
  CHECK(q.cancel(h));
  CHECK_FALSE(q.cancel(h));  // handle invalidated
  auto ev = q.pop_until(VirtualTime{300});
  REQUIRE(ev.has_value());
  CHECK(ev->arg == 2);
}

TEST_CASE("empty queue run advances the clock with zero dispatches") {
  EventQueue q;
  CHECK(!q.pop_until(VirtualTime{1'000'000}).has_value());
  CHECK(q.now().us == 1'000'000);
  CHECK(q.pending() == 0);
}

TEST_CASE("self-rearming periodic tick fires once per period") {
  EventQueue q;
  q.schedule(VirtualTime{10'000}, EventKind::kDebitTick);
  int dispatches = 0;
  while (auto ev = q.pop_until(VirtualTime{100'000})) {
    ++dispatches;
    if (ev->at.us + 10'000 <= 100'000) {
      q.schedule(ev->at + 10'000, EventKind::kDebitTick);
    }
  }
  CHECK(dispatches == 10);
}

TEST_CASE("dispatch order is total over random schedules") {
  EventQueue q;
  Rng rng(99);
  for (int i = 0; i < 5'000; ++i) {
    q.schedule(VirtualTime{rng.next_below(1'000)}, EventKind::kWorkloadTimer,
               i);
  }
  std::pair<Micros, std::uint64_t> prev{-1, 0};
  while (auto ev = q.pop_until(VirtualTime{1'000})) {
    std::pair<Micros, std::uint64_t> cur{ev->at.us, ev->seq};
    CHECK(prev < cur);
    prev = cur;
  }
}

TEST_CASE("rng streams are reproducible and substreams differ") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s0 = Rng::substream(42, 0);
  Rng s1 = Rng::substream(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (s0.next_u64() == s1.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("unit draws stay in the open interval") {
  Rng rng(7);
  for (int i = 0; i < 100'000; ++i) {
    const double u = rng.next_unit_open();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("next_below respects bounds and is roughly uniform") {
  Rng rng(5);
  std::vector<int> counts(10, 0);
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const auto x = rng.next_below(10);
    REQUIRE(x >= 0);
    REQUIRE(x < 10);
    ++counts[x];
  }
  for (int c : counts) {
    CHECK(c > n / 10 - 600);
    CHECK(c < n / 10 + 600);
  }
}

TEST_CASE("truncated exponential inversion hits analytic points") {
  // u = e^-1 with mean 10ms is exactly 10ms.
  CHECK(trunc_exp_from_unit(std::exp(-1.0), 10'000.0, 30'000) == 10'000);
  // u = e^-5 would give 50ms; truncation caps it at 30ms.
  CHECK(trunc_exp_from_unit(std::exp(-5.0), 10'000.0, 30'000) == 30'000);
  // Draws near u=1 floor to the 1us clock granularity.
  CHECK(trunc_exp_from_unit(0.9999999, 10'000.0, 30'000) == 1);
}

TEST_CASE("truncated exponential empirical mean matches E[min(X,30ms)]") {
  // Oracle: E[min(Exp(10ms), 30ms)] = 10ms * (1 - e^-3).
  const double oracle_us = 10'000.0 * (1.0 - std::exp(-3.0));
  CHECK(oracle_us == doctest::Approx(9502.129).epsilon(1e-6));

  Rng rng(2024);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) {
    sum += static_cast<double>(sample_trunc_exp(rng, 10'000.0, 30'000));
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - oracle_us) < 20.0);
}

TEST_CASE("truncated exponential passes a KS test against the analytic CDF") {
  const double mean = 10'000.0;
  const Micros max = 30'000;
  const int n = 100'000;
  Rng rng(31337);
  std::vector<double> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) {
    draws.push_back(static_cast<double>(sample_trunc_exp(rng, mean, max)));
  }
  std::sort(draws.begin(), draws.end());
  // CDF of min(X, max): continuous below max, atom at max. Ties (notably
  // the atom) are handled by comparing per distinct value.
  auto cdf = [&](double x) {
    if (x >= static_cast<double>(max)) return 1.0;
    return 1.0 - std::exp(-x / mean);
  };
  auto cdf_left = [&](double x) { return 1.0 - std::exp(-x / mean); };
  double d = 0.0;
  std::size_t i = 0;
  while (i < draws.size()) {
    std::size_t j = i;
    while (j < draws.size() && draws[j] == draws[i]) ++j;
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    d = std::max({d, std::abs(upto - cdf(draws[i])),
                  std::abs(below - cdf_left(draws[i]))});
    i = j;
  }
  CHECK(d < 0.01);
}

TEST_CASE("geometric sampler with p=1 always returns one slot") {
  Rng rng(1);
  for (int i = 0; i < 1'000; ++i) {
    CHECK(sample_geometric_slots(rng, 1.0) == 1);
  }
}

TEST_CASE("geometric sampler mean and head probability match 1/p and p") {
  Rng rng(4242);
  const int n = 1'000'000;
  double sum = 0.0;
  int ones = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = sample_geometric_slots(rng, 0.1);
    REQUIRE(k >= 1);
    sum += static_cast<double>(k);
    if (k == 1) ++ones;
  }
  CHECK(std::abs(sum / n - 10.0) < 0.1);
  CHECK(std::abs(static_cast<double>(ones) / n - 0.100) < 0.003);
}

TEST_CASE("geometric sampler passes chi-square over k in 1..50") {
  const double p = 0.1;
  const int n = 100'000;
  Rng rng(777);
  std::vector<std::int64_t> counts(51, 0);  // [1..50] and a tail bucket
  std::int64_t tail = 0;
  for (int i = 0; i < n; ++i) {
    const auto k = sample_geometric_slots(rng, p);
    if (k <= 50) {
      ++counts[k];
    } else {
      ++tail;
    }
  }
  double chi2 = 0.0;
  for (int k = 1; k <= 50; ++k) {
    const double expected = n * p * std::pow(1.0 - p, k - 1);
    const double diff = static_cast<double>(counts[k]) - expected;
    chi2 += diff * diff / expected;
  }
  const double tail_expected = n * std::pow(1.0 - p, 50);
  const double tail_diff = static_cast<double>(tail) - tail_expected;
  chi2 += tail_diff * tail_diff / tail_expected;
  // 51 bins, 50 degrees of freedom; chi-square 0.99 quantile is 76.154.
  CHECK(chi2 < 76.154);
}

TEST_CASE("clamped draws mark exactly the truncation bound") {
  // The poisson variant relies on clamps being identifiable: a chained
  // bounded timeout that only charges on non-clamped arrivals implements
  // an exact exponential inter-charge time.
  Rng rng(55);
  int clamps = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    if (sample_trunc_exp(rng, 10'000.0, 30'000) == 30'000) ++clamps;
  }
  const double frac = static_cast<double>(clamps) / n;
  CHECK(std::abs(frac - std::exp(-3.0)) < 0.002);
}

TEST_CASE("trunc exp rejects bad parameters") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_trunc_exp(rng, 0.0, 1'000), SimError);
  CHECK_THROWS_AS(sample_geometric_slots(rng, 0.0), SimError);
  CHECK_THROWS_AS(sample_geometric_slots(rng, 1.5), SimError);
}
