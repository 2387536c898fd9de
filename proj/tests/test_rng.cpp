//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <set>

#include "roikit/rng.hpp"

using namespace roikit;

TEST_CASE("identical seeds give identical streams", "[rng]") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  CounterRng c(43);
  int differing = 0;
  CounterRng a2(42);
  for (int i = 0; i < 64; ++i) differing += (a2.next_u64() != c.next_u64());
  REQUIRE(differing == 64);
}

TEST_CASE("uniform stays in range with sane moments", "[rng]") {
  CounterRng rng(7);
  double sum = 0, sumsq = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  REQUIRE(sum / n == Catch::Approx(0.5).margin(0.01));
  REQUIRE(sumsq / n - (sum / n) * (sum / n) == Catch::Approx(1.0 / 12).margin(0.005));
}

TEST_CASE("gaussian moments", "[rng]") {
  CounterRng rng(8);
  double sum = 0, sumsq = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  REQUIRE(sum / n == Catch::Approx(0.0).margin(0.02));
  REQUIRE(sumsq / n == Catch::Approx(1.0).margin(0.03));
}

TEST_CASE("uniform_int covers its range and nothing more", "[rng]") {
  CounterRng rng(9);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(7);
    REQUIRE(v >= 0);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 7);
}

TEST_CASE("forked streams are reproducible and distinct", "[rng]") {
  CounterRng base(123);
  CounterRng f1 = base.fork(1);
  CounterRng f1b = CounterRng(123).fork(1);
  CounterRng f2 = base.fork(2);
  REQUIRE(f1.next_u64() == f1b.next_u64());
  CounterRng g1 = CounterRng(123).fork(1);
  int differing = 0;
  for (int i = 0; i < 64; ++i) differing += (g1.next_u64() != f2.next_u64());
  REQUIRE(differing == 64);
}
