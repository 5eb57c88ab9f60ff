#include "ovsafe/barrier.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace ovsafe {

namespace odeint = boost::numeric::odeint;

namespace {

// g(s) = exp(-1/s) on s > 0 and its first two derivatives.
double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double bump_d1(double s) {
  const double g = bump(s);
  return g > 0.0 ? g / (s * s) : 0.0;
}

double bump_d2(double s) {
  const double g = bump(s);
  if (g == 0.0) return 0.0;
  const double inv = 1.0 / s;
  return g * (inv * inv * inv * inv - 2.0 * inv * inv * inv);
}

}  // namespace

double mollifier(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double a = bump(1.0 - u);
  return a / (a + bump(u));
}

double mollifier_d1(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = bump(1.0 - u);
  const double b = bump(u);
  const double da = -bump_d1(1.0 - u);
  const double db = bump_d1(u);
  const double s = a + b;
  return (da * b - a * db) / (s * s);
}

double mollifier_d2(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double a = bump(1.0 - u);
  const double b = bump(u);
  const double da = -bump_d1(1.0 - u);
  const double db = bump_d1(u);
  const double dda = bump_d2(1.0 - u);
  const double ddb = bump_d2(u);
  const double s = a + b;
  const double n = da * b - a * db;
  const double dn = dda * b - a * ddb;
  return dn / (s * s) - 2.0 * n * (da + db) / (s * s * s);
}

const MollifierBounds& mollifier_bounds() {
  static const MollifierBounds bounds = [] {
    MollifierBounds out;
    constexpr int kSamples = 200000;
    for (int i = 0; i <= kSamples; ++i) {
      const double u = static_cast<double>(i) / kSamples;
      out.d1 = std::max(out.d1, std::abs(mollifier_d1(u)));
      out.d2 = std::max(out.d2, std::abs(mollifier_d2(u)));
    }
    // Sampling resolves the peaks to ~1e-10 relative; pad outward.
    out.d1 *= 1.0 + 1e-6;
    out.d2 *= 1.0 + 1e-6;
    return out;
  }();
  return bounds;
}

BarrierDagger::BarrierDagger(double alpha, double beta, double y_lo, double y_hi,
                             std::vector<double> values)
    : alpha_(alpha), beta_(beta), y_lo_(y_lo), y_hi_(y_hi), values_(std::move(values)) {
  if (values_.size() < 2 || !(y_hi > y_lo)) {
    throw std::invalid_argument("BarrierDagger: need >= 2 nodes on a nondegenerate interval");
  }
  h_ = (y_hi_ - y_lo_) / static_cast<double>(values_.size() - 1);
}

std::vector<double> BarrierDagger::grid() const {
  std::vector<double> ys(values_.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = y_lo_ + h_ * static_cast<double>(i);
  ys.back() = y_hi_;
  return ys;
}

double BarrierDagger::operator()(double y) const {
  if (!(y >= y_lo_ && y <= y_hi_)) {
    throw std::domain_error("BarrierDagger: y = " + std::to_string(y) + " outside table");
  }
  auto i = static_cast<std::size_t>((y - y_lo_) / h_);
  i = std::min(i, values_.size() - 2);
  const double y0 = y_lo_ + h_ * static_cast<double>(i);
  const double t = (y - y0) / h_;
  const double v0 = values_[i];
  const double v1 = values_[i + 1];
  double m0 = slope(v0);
  double m1 = slope(v1);

  // Fritsch-Carlson limiter keeps each cubic piece monotone.
  const double secant = (v1 - v0) / h_;
  if (secant == 0.0) {
    m0 = m1 = 0.0;
  } else {
    const double a = m0 / secant;
    const double b = m1 / secant;
    const double r2 = a * a + b * b;
    if (a < 0.0 || b < 0.0) {
      m0 = m1 = 0.0;
    } else if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m0 = tau * a * secant;
      m1 = tau * b * secant;
    }
  }

  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * h_ * m0 + (-2 * t3 + 3 * t2) * v1 +
         (t3 - t2) * h_ * m1;
}

double BarrierDagger::d2(double y) const {
  const double v = (*this)(y);
  return slope_derivative(v) * slope(v);
}

BarrierDagger solve_barrier_dagger(const Model& model, double y_lo, double y_hi,
                                   std::size_t points) {
  const auto& dc = model.derived();
  if (!(y_lo <= -dc.y_bar && y_hi >= dc.y_bar)) {
    throw std::invalid_argument("solve_barrier_dagger: span must contain [-y_bar, y_bar]");
  }
  if (points < 2) throw std::invalid_argument("solve_barrier_dagger: points >= 2");

  const double alpha = model.params().alpha;
  const double beta = model.params().beta;
  const double h = (y_hi - y_lo) / static_cast<double>(points - 1);
  std::vector<double> ys(points);
  for (std::size_t i = 0; i < points; ++i) ys[i] = y_lo + h * static_cast<double>(i);
  ys.back() = y_hi;

  // Anchored at -y_bar; when the span starts further left, integrate
  // backwards to y_lo first.
  using Vec1 = std::array<double, 1>;
  auto rhs = [alpha, beta](const Vec1& s, Vec1& ds, double) {
    ds[0] = -s[0] * s[0] / (alpha * s[0] * s[0] + beta);
  };
  Vec1 start{dc.x_dagger};
  if (y_lo < -dc.y_bar) {
    odeint::integrate_adaptive(odeint::make_controlled(1e-14, 1e-13, odeint::runge_kutta_dopri5<Vec1>()),
                               rhs, start, -dc.y_bar, y_lo, -1e-3);
  }

  std::vector<double> values;
  values.reserve(points);
  auto observer = [&values](const Vec1& s, double) { values.push_back(s[0]); };
  odeint::integrate_times(odeint::make_dense_output(1e-14, 1e-13, odeint::runge_kutta_dopri5<Vec1>()),
                          rhs, start, ys.begin(), ys.end(), h, observer);
  if (values.size() != points) {
    throw std::runtime_error("solve_barrier_dagger: integrator produced an incomplete table");
  }
  // Pin the anchor exactly when it is a node.
  if (y_lo == -dc.y_bar) values.front() = dc.x_dagger;
  return BarrierDagger(alpha, beta, y_lo, y_hi, std::move(values));
}

double BarrierTable::phi(double y) const {
  const double u = y / varpi_dagger;
  if (u <= 0.0) return dagger(y);
  const double flat = dagger(varpi_dagger);
  if (u >= 1.0) return flat;
  return mollifier(u) * (dagger(y) - flat) + flat;
}

double BarrierTable::dphi(double y) const {
  const double u = y / varpi_dagger;
  if (u <= 0.0) return dagger.d1(y);
  if (u >= 1.0) return 0.0;
  const double flat = dagger(varpi_dagger);
  return mollifier(u) * dagger.d1(y) + mollifier_d1(u) / varpi_dagger * (dagger(y) - flat);
}

double BarrierTable::d2phi(double y) const {
  const double u = y / varpi_dagger;
  if (u <= 0.0) return dagger.d2(y);
  if (u >= 1.0) return 0.0;
  const double flat = dagger(varpi_dagger);
  return mollifier(u) * dagger.d2(y) + 2.0 / varpi_dagger * mollifier_d1(u) * dagger.d1(y) +
         mollifier_d2(u) / (varpi_dagger * varpi_dagger) * (dagger(y) - flat);
}

BarrierTable build_barrier(const Model& model, std::size_t grid_resolution) {
  if (grid_resolution < 1000) {
    throw std::invalid_argument("build_barrier: grid_resolution must be >= 1000");
  }
  const auto& p = model.params();
  const auto& dc = model.derived();
  if (!(dc.varpi_dagger < dc.y_bar)) {
    throw std::invalid_argument("build_barrier: varpi_dagger must lie inside [-y_bar, y_bar]");
  }

  BarrierTable table;
  table.y_bar = dc.y_bar;
  table.x_dagger = dc.x_dagger;
  table.varpi_dagger = dc.varpi_dagger;
  table.phi_lower = dc.phi_lower;
  table.alpha = p.alpha;
  table.beta = p.beta;
  table.dagger = solve_barrier_dagger(model, -dc.y_bar, dc.y_bar, grid_resolution);

  table.y_grid = table.dagger.grid();
  const std::size_t n = table.y_grid.size();
  table.phi_vals.resize(n);
  table.dphi_vals.resize(n);
  table.d2phi_vals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = table.y_grid[i];
    table.phi_vals[i] = table.phi(y);
    table.dphi_vals[i] = table.dphi(y);
    table.d2phi_vals[i] = table.d2phi(y);
    table.max_abs_d1 = std::max(table.max_abs_d1, std::abs(table.dphi_vals[i]));
    table.max_abs_d2 = std::max(table.max_abs_d2, std::abs(table.d2phi_vals[i]));
  }
  // The transition band [0, varpi] is narrow; sample it densely.
  constexpr int kBand = 4000;
  for (int i = 0; i <= kBand; ++i) {
    const double y = dc.varpi_dagger * static_cast<double>(i) / kBand;
    table.max_abs_d1 = std::max(table.max_abs_d1, std::abs(table.dphi(y)));
    table.max_abs_d2 = std::max(table.max_abs_d2, std::abs(table.d2phi(y)));
  }
  table.deriv_bound = std::max(table.max_abs_d1, table.max_abs_d2);

  const auto& mb = mollifier_bounds();
  const double f_bound = 1.0 / p.alpha;
  const double fprime_bound = 1.0 / std::sqrt(p.alpha * p.beta) +
                              p.alpha / 8.0 * std::sqrt(27.0 / (p.alpha * p.alpha * p.alpha * p.beta));
  // |phi_dagger(y) - phi_dagger(varpi)| <= varpi / alpha on [0, varpi].
  const double k1 = f_bound * (1.0 + mb.d1);
  const double k2 = fprime_bound * f_bound + (2.0 * mb.d1 + mb.d2) * f_bound / dc.varpi_dagger;
  table.analytic_deriv_bound = std::max(k1, k2);
  return table;
}

namespace {

void require_in_table(State z, const BarrierTable& table, const char* who) {
  if (!table.covers(z.y)) {
    throw std::domain_error(std::string(who) + ": |y| must be <= y_bar, got y = " +
                            std::to_string(z.y));
  }
}

}  // namespace

double danger(State z, const BarrierTable& table) {
  require_in_table(z, table, "danger");
  return table.phi(z.y) - z.x;
}

double danger_squared(State z, const BarrierTable& table) {
  const double d = std::max(danger(z, table), 0.0);
  return d * d;
}

Tangent danger_squared_gradient(State z, const BarrierTable& table) {
  const double d = std::max(danger(z, table), 0.0);
  return {-2.0 * d, 2.0 * d * table.dphi(z.y)};
}

double drift_sign_functional(State z, const BarrierTable& table, const Model& model) {
  if (!(z.x > 0.0)) throw std::domain_error("drift_sign_functional: requires x > 0");
  require_in_table(z, table, "drift_sign_functional");
  const auto& p = model.params();
  const double dphi = table.dphi(z.y);
  return -dphi * (p.alpha * (optimal_velocity(z.x / p.d) - p.v_circ) +
                  (p.alpha + p.beta / (z.x * z.x)) * z.y) -
         z.y;
}

}  // namespace ovsafe
