#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fixtures.hpp"
#include "ovsafe/mc.hpp"

using namespace ovsafe;

namespace {

const BarrierTable& table() {
  static const BarrierTable t = build_barrier(fixture::canonical_model());
  return t;
}

SweepSpec small_spec() {
  SweepSpec s;
  s.epsilons = {0.0, 0.05, 1.0};
  s.horizons = {1.0, 4.0};
  s.trials_per_cell = 200;
  s.base_seed = 2024;
  s.dt = 1e-3;
  s.params = fixture::canonical();
  s.z0 = {1.0, 0.0};
  return s;
}

// Wilson interval by solving (p - phat)^2 = z^2 p (1 - p) / n for p.
std::pair<double, double> wilson_roots(double k, double n, double z) {
  const double phat = k / n;
  const double a = 1.0 + z * z / n;
  const double b = -(2.0 * phat + z * z / n);
  const double c = phat * phat;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  return {(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)};
}

}  // namespace

TEST_CASE("Wilson interval matches the quadratic-root oracle") {
  const double z = 1.959963984540054;
  for (auto [k, n] : {std::pair{0, 100}, {3, 100}, {50, 100}, {100, 100}, {17, 10000}}) {
    const WilsonInterval w = wilson_interval(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    const auto [lo, hi] = wilson_roots(k, n, z);
    CHECK(std::abs(w.lower - std::max(0.0, lo)) < 1e-12);
    CHECK(std::abs(w.upper - std::min(1.0, hi)) < 1e-12);
    CHECK(std::abs(w.halfwidth - 0.5 * (hi - lo)) < 1e-12);
  }
  // Zero successes still give a nonzero half-width: 1.96^2 / (2 (n + 1.96^2)) for n = 10^4.
  CHECK(wilson_interval(0, 10000).halfwidth == doctest::Approx(z * z / (2.0 * (10000 + z * z))));
}

TEST_CASE("sweep spec validation") {
  SweepSpec s = small_spec();
  CHECK_NOTHROW(validate(s));
  s.trials_per_cell = 99;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_spec();
  s.epsilons.push_back(-0.1);
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_spec();
  s.horizons = {0.0};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = small_spec();
  s.epsilons.clear();
  CHECK_THROWS_AS(run_sweep(s, table()), std::invalid_argument);
}

TEST_CASE("sweep aggregation") {
  const SweepSpec spec = small_spec();
  const SweepResult r = run_sweep(spec, table(), 1);
  REQUIRE(r.cells.size() == 6);
  const double y_bar = fixture::canonical_model().derived().y_bar;
  std::size_t idx = 0;
  for (double e : spec.epsilons) {
    for (double l : spec.horizons) {
      const CellResult& c = r.cells[idx++];
      CHECK(c.epsilon == e);
      CHECK(c.horizon == l);
      CHECK(c.eps_sqrtL == e * std::sqrt(l));
      CHECK(c.n_trials + c.n_faults == spec.trials_per_cell);
      CHECK(c.paper_bound == doctest::Approx(std::min(1.0, 4.0 * e * e * y_bar * y_bar * l)));
      for (double f : {c.freq_tauH, c.freq_collision, c.freq_tauD}) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
      }
      CHECK(c.freq_tauH <= c.paper_bound + c.ci_halfwidth_95);
      if (e == 0.0) {
        CHECK(c.freq_tauH == 0.0);
        CHECK(c.freq_collision == 0.0);
      }
    }
  }
  // Heavy noise escapes the energy level within L = 4 in some trials.
  CHECK(r.cells[5].count_tauH > 0);
}

TEST_CASE("sweep is independent of the worker count and repeatable") {
  const SweepSpec spec = small_spec();
  const SweepResult one = run_sweep(spec, table(), 1);
  const SweepResult three = run_sweep(spec, table(), 3);
  const SweepResult again = run_sweep(spec, table(), 1);
  CHECK(one.cells == three.cells);
  CHECK(one.cells == again.cells);
  SweepSpec shifted = spec;
  shifted.base_seed += 1;
  CHECK(!(run_sweep(shifted, table(), 2).cells == one.cells));
}

TEST_CASE("summary sorting and failure flags") {
  SweepResult r;
  CHECK_THROWS_AS(summarize(r), std::invalid_argument);
  CellResult a;
  a.eps_sqrtL = 0.5;
  a.freq_tauH = 0.2;
  a.paper_bound = 0.1;
  a.ci_halfwidth_95 = 0.05;
  CellResult b;
  b.eps_sqrtL = 0.1;
  b.freq_tauH = 0.0;
  b.paper_bound = 0.1;
  b.ci_halfwidth_95 = 0.01;
  b.invalid = true;
  r.cells = {a, b};
  const Summary s = summarize(r);
  CHECK(s.rows[0].cell.eps_sqrtL == 0.1);
  CHECK(s.rows[1].cell.eps_sqrtL == 0.5);
  CHECK(!s.rows[0].failure);
  CHECK(s.rows[1].failure);
  CHECK(s.failures == 1);
  CHECK(s.invalid_cells == 1);

  const Summary real = summarize(run_sweep(small_spec(), table(), 1));
  CHECK(real.failures == 0);
  for (std::size_t i = 1; i < real.rows.size(); ++i) {
    CHECK(real.rows[i - 1].cell.eps_sqrtL <= real.rows[i].cell.eps_sqrtL);
  }
}
