#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ovsafe/barrier.hpp"
#include "ovsafe/validation.hpp"

using namespace ovsafe;

namespace {

const BarrierTable& canonical_table() {
  static const BarrierTable t = build_barrier(fixture::canonical_model());
  return t;
}

// Smooth step from the exp(-1/u) bump, written out independently.
double rho_oracle(double u) {
  auto g = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  return g(1.0 - u) / (g(1.0 - u) + g(u));
}

}  // namespace

TEST_CASE("mollifier") {
  CHECK(mollifier(-1.0) == 1.0);
  CHECK(mollifier(0.0) == 1.0);
  CHECK(mollifier(1.0) == 0.0);
  CHECK(mollifier(2.0) == 0.0);
  CHECK(mollifier(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 1.0;
  for (int i = 1; i < 1000; ++i) {
    const double u = i / 1000.0;
    CHECK(std::abs(mollifier(u) - rho_oracle(u)) < 1e-15);
    CHECK(mollifier(u) <= prev);
    prev = mollifier(u);
    const double h = 1e-6;
    const double fd1 = (mollifier(u + h) - mollifier(u - h)) / (2 * h);
    const double fd2 = (mollifier(u + h) - 2 * mollifier(u) + mollifier(u - h)) / (h * h);
    CHECK(std::abs(mollifier_d1(u) - fd1) < 1e-6);
    CHECK(std::abs(mollifier_d2(u) - fd2) < 1e-3 * std::max(1.0, std::abs(mollifier_d2(u))));
  }
  for (double u : {0.0, 1.0}) {
    const double h = 1e-3;
    CHECK(std::abs((mollifier(u + h) - mollifier(u - h)) / (2 * h)) < 1e-6);
    CHECK(std::abs((mollifier(u + h) - 2 * mollifier(u) + mollifier(u - h)) / (h * h)) < 1e-6);
    CHECK(mollifier_d1(u) == 0.0);
    CHECK(mollifier_d2(u) == 0.0);
  }
  const MollifierBounds& mb = mollifier_bounds();
  CHECK(mb.d1 >= std::abs(mollifier_d1(0.5)));
  CHECK(mb.d1 < 3.0);
  CHECK(mb.d2 > 0.0);
}

TEST_CASE("barrier dagger against closed form and RK4") {
  const Model& m = fixture::canonical_model();
  const auto& dc = m.derived();
  const oracle::Params op;
  const BarrierDagger dag = solve_barrier_dagger(m, -dc.y_bar, dc.y_bar);
  CHECK(dag(-dc.y_bar) == dc.x_dagger);

  auto f = [](double, double phi) { return -phi * phi / (phi * phi + 1.0); };
  const long n = std::lround(2.0 * dc.y_bar / 1e-6);
  const double rk_end = oracle::rk4_scalar(f, -dc.y_bar, dc.x_dagger, dc.y_bar, n);
  CHECK(std::abs(dag(dc.y_bar) - rk_end) < 1e-9);
  CHECK(rk_end >= dc.phi_lower);
  CHECK(rk_end >= 1.0 / (1.0 / dc.x_dagger + 2.0 * dc.y_bar / 1.0));

  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i) {
    const double y = -dc.y_bar + 2.0 * dc.y_bar * i / 2000.0;
    const double exact = oracle::phi_dagger(op, y, -dc.y_bar, dc.x_dagger);
    CHECK(std::abs(dag(y) - exact) < 1e-10);
    CHECK(dag(y) < prev);
    prev = dag(y);
    CHECK(dag(y) > 1.0 / (1.0 / dc.x_dagger + (y + dc.y_bar) / 1.0) - 1e-15);
    CHECK(std::abs(dag.d1(y)) <= 1.0 / m.params().alpha);
  }
  CHECK_THROWS_AS(solve_barrier_dagger(m, -1.0, dc.y_bar), std::invalid_argument);
}

TEST_CASE("barrier dagger on a non-canonical parameter set") {
  const ModelParams mp{2.0, 0.5, 1.5, 1.2, 0.5, -0.3};
  const Model m(mp);
  const auto& dc = m.derived();
  const BarrierDagger dag = solve_barrier_dagger(m, -dc.y_bar - 0.5, dc.y_bar + 0.5);
  const oracle::Params op{mp.alpha, mp.beta, mp.d, mp.v_circ, mp.x_circ, mp.y_circ};
  for (int i = 0; i <= 200; ++i) {
    const double y = -dc.y_bar - 0.5 + (2.0 * dc.y_bar + 1.0) * i / 200.0;
    CHECK(std::abs(dag(y) - oracle::phi_dagger(op, y, -dc.y_bar, dc.x_dagger)) < 1e-10);
  }
}

TEST_CASE("barrier table invariants") {
  const Model& m = fixture::canonical_model();
  const auto& dc = m.derived();
  const BarrierTable& t = canonical_table();
  CHECK(t.y_grid.size() == 10000);
  CHECK(t.y_grid.front() == -dc.y_bar);
  CHECK(t.y_grid.back() == dc.y_bar);
  CHECK(t.phi_lower == dc.phi_lower);
  for (std::size_t i = 1; i < t.y_grid.size(); ++i) {
    CHECK(t.y_grid[i] > t.y_grid[i - 1]);
    CHECK(t.phi_vals[i] <= t.phi_vals[i - 1]);
  }
  CHECK(*std::min_element(t.phi_vals.begin(), t.phi_vals.end()) >= dc.phi_lower);

  const double flat = t.dagger(dc.varpi_dagger);
  for (std::size_t i = 0; i < t.y_grid.size(); ++i) {
    const double y = t.y_grid[i];
    if (y <= 0.0) {
      CHECK(t.phi_vals[i] == t.dagger(y));
      CHECK(std::abs(t.dphi_vals[i] + 1.0 / (1.0 + 1.0 / (t.phi_vals[i] * t.phi_vals[i]))) <= 1e-7);
    } else if (y >= dc.varpi_dagger) {
      CHECK(t.phi_vals[i] == flat);
      CHECK(std::abs(t.dphi_vals[i]) <= 1e-12);
    }
  }
  CHECK(t.max_abs_d1 <= 10.0 * t.analytic_deriv_bound);
  CHECK(t.max_abs_d2 <= 10.0 * t.analytic_deriv_bound);
  CHECK(std::isfinite(t.deriv_bound));
  CHECK(t.deriv_bound >= std::max(t.max_abs_d1, t.max_abs_d2) - 1e-12);

  // phi' and phi'' agree with finite differences inside the mollified band.
  for (int i = 1; i < 20; ++i) {
    const double y = dc.varpi_dagger * i / 20.0;
    const double h = 1e-7;
    CHECK(std::abs((t.phi(y + h) - t.phi(y - h)) / (2 * h) - t.dphi(y)) < 1e-6);
    CHECK(std::abs((t.dphi(y + h) - t.dphi(y - h)) / (2 * h) - t.d2phi(y)) <
          1e-5 * std::max(1.0, std::abs(t.d2phi(y))));
  }
  CHECK_THROWS_AS(build_barrier(m, 999), std::invalid_argument);
}

TEST_CASE("barrier self-convergence under grid doubling") {
  const Model& m = fixture::canonical_model();
  const BarrierTable fine = build_barrier(m, 20000);
  CHECK(barrier_self_convergence(canonical_table(), fine) < 1e-9);
}

TEST_CASE("danger and its square") {
  const Model& m = fixture::canonical_model();
  const auto& dc = m.derived();
  const BarrierTable& t = canonical_table();
  for (double y : {-dc.y_bar, -1.0, 0.0, 0.5 * dc.varpi_dagger, 1.0, dc.y_bar}) {
    CHECK(danger({t.phi(y), y}, t) == 0.0);
    for (double x : {0.01, 0.5 * dc.phi_lower}) CHECK(danger({x, y}, t) >= 0.5 * dc.phi_lower);
  }
  CHECK(danger({0.0, -dc.y_bar}, t) == dc.x_dagger);
  CHECK(danger_squared({t.phi(0.3) + 0.1, 0.3}, t) == 0.0);
  CHECK(danger_squared({t.phi(0.3) - 3.0, 0.3}, t) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK_THROWS_AS(danger({1.0, dc.y_bar + 1e-9}, t), std::domain_error);
  CHECK_THROWS_AS(danger_squared({1.0, -dc.y_bar - 1.0}, t), std::domain_error);

  // C^1 across the graph: one-sided centred differences agree, and match the gradient.
  const double h = 1e-6;
  for (double y : {-1.5, -0.4, 0.002, 0.9}) {
    const double xg = t.phi(y);
    for (double side : {-1.0, 1.0}) {
      const State z{xg + side * 2e-6, y};
      const double gx = (danger_squared({z.x + h, y}, t) - danger_squared({z.x - h, y}, t)) / (2 * h);
      const double gy = (danger_squared({z.x, y + h}, t) - danger_squared({z.x, y - h}, t)) / (2 * h);
      const Tangent g = danger_squared_gradient(z, t);
      CHECK(std::abs(gx - g.dx) < 1e-6);
      CHECK(std::abs(gy - g.dy) < 1e-6);
      CHECK(std::abs(gx) < 1e-5);
    }
  }
}

TEST_CASE("drift sign functional") {
  const Model& m = fixture::canonical_model();
  const auto& dc = m.derived();
  const BarrierTable& t = canonical_table();
  for (double y : {dc.varpi_dagger, 0.5, dc.y_bar}) {
    for (double x : {0.1, 1.0, 3.0}) CHECK(drift_sign_functional({x, y}, t, m) == -y);
  }
  CHECK(dc.x_inf > t.phi(0.0));
  CHECK(std::isfinite(drift_sign_functional({dc.x_inf, 0.0}, t, m)));
  CHECK(std::abs(drift_sign_functional({dc.x_inf, 0.0}, t, m)) < 1e-15);
  CHECK(drift_sign_grid_max(t, m, 500) <= 1e-9);
  CHECK_THROWS_AS(drift_sign_functional({0.0, 0.0}, t, m), std::domain_error);
  CHECK_THROWS_AS(drift_sign_functional({1.0, 5.0}, t, m), std::domain_error);
}
