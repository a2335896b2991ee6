#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "personas/error.hpp"
#include "personas/exact_tests.hpp"
#include "personas/parallel.hpp"

using namespace personas;

TEST_CASE("Fisher matches exact enumeration") {
  for (int n1 = 1; n1 <= 9; ++n1)
    for (int n2 = 1; n2 <= 9; ++n2)
      for (int x1 = 0; x1 <= n1; ++x1)
        for (int x2 = 0; x2 <= n2; ++x2) {
          const Table2x2 t{x1, n1, x2, n2};
          CHECK(fisher_exact(t) == doctest::Approx(oracle::fisher_two_sided(x1, n1, x2, n2)).epsilon(1e-12));
          CHECK(fisher_exact(t, Alternative::greater) ==
                doctest::Approx(oracle::fisher_greater(x1, n1, x2, n2)).epsilon(1e-12));
          CHECK(fisher_exact(t, Alternative::less) ==
                doctest::Approx(oracle::fisher_greater(n1 - x1, n1, n2 - x2, n2)).epsilon(1e-12));
        }
}

TEST_CASE("reference values") {
  // Published values for these tables (two-sided Fisher; one-sided Boschloo).
  CHECK(fisher_exact({8, 9, 2, 7}) == doctest::Approx(0.034965034965034975).epsilon(1e-12));
  CHECK(fisher_exact({3, 6, 3, 6}) == 1.0);
  CHECK(boschloo({3, 6, 3, 6}).p_boschloo == 1.0);
  BoschlooOptions greater;
  greater.alternative = Alternative::greater;
  CHECK(boschloo({8, 9, 2, 7}, greater).p_boschloo == doctest::Approx(0.012192436131964303).epsilon(1e-9));
  CHECK(boschloo({7, 9, 5, 17}, greater).p_boschloo == doctest::Approx(0.013020365072817239).epsilon(1e-9));
  CHECK(boschloo({12, 15, 11, 31}, greater).p_boschloo == doctest::Approx(0.0025122385835529212).epsilon(1e-9));
  BoschlooOptions less;
  less.alternative = Alternative::less;
  CHECK(boschloo({8, 9, 2, 7}, less).p_boschloo == doctest::Approx(0.987056591017033).epsilon(1e-9));
}

TEST_CASE("Boschloo grid matches brute force") {
  BoschlooOptions o;
  o.grid = 50;
  o.refine = false;
  for (int n1 = 1; n1 <= 6; ++n1)
    for (int n2 = 1; n2 <= 6; ++n2)
      for (int x1 = 0; x1 <= n1; ++x1)
        for (int x2 = 0; x2 <= n2; ++x2)
          CHECK(boschloo({x1, n1, x2, n2}, o).p_boschloo ==
                doctest::Approx(oracle::boschloo(x1, n1, x2, n2, 50)).epsilon(1e-10));
}

TEST_CASE("battery agrees with the serial reference") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 25);
    const int n2 = 1 + static_cast<int>(rng() % 25);
    const Table2x2 t{static_cast<int>(rng() % (n1 + 1)), n1, static_cast<int>(rng() % (n2 + 1)), n2};
    for (bool refine : {false, true}) {
      BoschlooOptions o;
      o.grid = 100;
      o.refine = refine;
      const TestResult a = boschloo(t, o);
      const TestResult b = boschloo_serial(t, o);
      CHECK(a.p_boschloo == doctest::Approx(b.p_boschloo).epsilon(1e-12));
      CHECK(a.p_fisher == b.p_fisher);
    }
  }
}

TEST_CASE("Boschloo properties") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 30);
    const int n2 = 1 + static_cast<int>(rng() % 30);
    const Table2x2 t{static_cast<int>(rng() % (n1 + 1)), n1, static_cast<int>(rng() % (n2 + 1)), n2};
    BoschlooOptions coarse, fine;
    coarse.grid = 63;  // points i/64 are a subset of i/128
    fine.grid = 127;
    coarse.refine = fine.refine = false;
    const double pc = boschloo(t, coarse).p_boschloo;
    const double pf = boschloo(t, fine).p_boschloo;
    CHECK(pf >= pc);
    BoschlooOptions refined = fine;
    refined.refine = true;
    const TestResult r = boschloo(t, refined);
    CHECK(r.p_boschloo >= pf);
    CHECK(r.p_boschloo <= r.p_fisher + 1e-12);
    CHECK(r.p_boschloo >= 0.0);
    CHECK(r.p_boschloo <= 1.0);
    // Swapping the rows leaves the two-sided test unchanged.
    const TestResult s = boschloo({t.x2, t.n2, t.x1, t.n1}, refined);
    CHECK(s.p_boschloo == doctest::Approx(r.p_boschloo).epsilon(1e-12));
  }
}

TEST_CASE("engine memoizes and is thread-count independent") {
  std::vector<Table2x2> tables;
  for (int x = 0; x <= 10; ++x) tables.push_back({x, 10, 10 - x, 14});
  tables.push_back({3, 14, 7, 10});  // swapped duplicate of an earlier table
  set_thread_count(1);
  BoschlooEngine one;
  const auto a = one.run(tables);
  set_thread_count(3);
  BoschlooEngine three;
  const auto b = three.run(tables);
  set_thread_count(1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].p_boschloo == b[i].p_boschloo);
  CHECK(one.cache_size() == 11);
  CHECK(a.back().p_boschloo == a[7].p_boschloo);
  CHECK(one.run(tables[4]).p_boschloo == a[4].p_boschloo);
}

TEST_CASE("an empty row gives no evidence") {
  CHECK(fisher_exact({0, 0, 2, 5}) == 1.0);
  CHECK(fisher_exact({0, 0, 0, 0}, Alternative::greater) == 1.0);
  CHECK(boschloo({0, 0, 5, 5}).p_boschloo == 1.0);
  CHECK(boschloo_serial({3, 4, 0, 0}).p_boschloo == 1.0);
}

TEST_CASE("invalid tables and grids are rejected") {
  CHECK_THROWS_AS(fisher_exact({3, 2, 0, 2}), Error);
  CHECK_THROWS_AS(fisher_exact({-1, 0, 0, 2}), Error);
  BoschlooOptions o;
  o.grid = 1;
  CHECK_THROWS_AS(boschloo({1, 2, 1, 2}, o), Error);
}

TEST_CASE("Holm step-down") {
  const std::vector<double> p = {0.001, 0.02, 0.03};
  const HolmDecision h = holm(p, 0.05, 3);
  CHECK(h.rejected == std::vector<bool>{true, true, true});

  // Stops at the first failure even if later p-values would pass alone.
  const std::vector<double> q = {0.04, 0.001, 0.03};
  CHECK(holm(q, 0.05, 3).rejected == std::vector<bool>{false, true, false});
  // A larger family makes every threshold stricter.
  CHECK(holm(p, 0.05, 10).rejected_count() == 1);
  // Ties at the threshold reject.
  const std::vector<double> edge = {0.025, 0.05};
  CHECK(holm(edge, 0.05, 2).rejected_count() == 2);
  CHECK_THROWS_AS(holm(p, 0.05, 2), Error);
  const std::vector<double> bad = {1.5};
  CHECK_THROWS_AS(holm(bad, 0.05, 1), Error);
  CHECK(holm(std::vector<double>{}, 0.05, 0).rejected.empty());
}

TEST_CASE("Agresti interval") {
  const double z = 1.959964;
  const double n = 10 + z * z;
  const double c = (5 + z * z / 2) / n;
  const double h = z * std::sqrt(c * (1 - c) / n);
  const Interval i = agresti_interval(5, 10);
  CHECK(i.lo == doctest::Approx(c - h).epsilon(1e-6));
  CHECK(i.hi == doctest::Approx(c + h).epsilon(1e-6));
  CHECK(agresti_interval(0, 10).lo == 0.0);
  CHECK(agresti_interval(10, 10).hi == 1.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-9));
  CHECK_THROWS_AS(agresti_interval(3, 2), Error);
}
