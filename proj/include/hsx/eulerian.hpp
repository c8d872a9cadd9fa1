#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsx/measure.hpp"

// Eulerian states (u, mu): a bounded-on-compacts velocity u together with the
// energy measure mu whose absolutely continuous part is u_x^2 dx.

namespace hsx {

// Which limits of the initial quantile function are finite.
enum class BoundaryCase { both_finite, left_infinite, right_infinite, both_infinite };

struct EulerianState {
  PiecewiseLinear u;
  RadonMeasure mu;
  double energy = 0.0;  // C = mu(R)

  // Diagnostics for states standing in for unbounded closed forms.
  bool unbounded_u = false;
  // Set by the scenario layer when the represented (sampled) state stands for
  // data whose true quantile limits are infinite.
  std::optional<BoundaryCase> boundary_override;

  EulerianState() : u(PiecewiseLinear::constant(0.0)) {}
  EulerianState(PiecewiseLinear u_, RadonMeasure mu_)
      : u(std::move(u_)), mu(std::move(mu_)) {
    energy = mu.total_mass();
  }

  EulerianState translated(double h) const {
    EulerianState s = *this;
    std::vector<Node> nodes = u.nodes();
    for (auto& n : nodes) n.x += h;
    s.u = PiecewiseLinear(std::move(nodes), u.slope_lo(), u.slope_hi());
    s.mu = mu.translated(h);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  enum class Kind { negative_mass, compatibility, not_constant_on_gap, nonfinite };
  Kind kind;
  double a = 0.0, b = 0.0;  // offending interval (or point when a == b)
  double magnitude = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool unbounded_u = false;
  bool ok() const { return violations.empty(); }
  double worst(Violation::Kind k) const {
    double w = 0.0;
    for (const auto& v : violations)
      if (v.kind == k) w = std::max(w, v.magnitude);
    return w;
  }
};

// Checks membership of (u, mu) in the solution space: nonnegative finite
// energy, u_x^2 equal to the density on every density piece, and u constant
// wherever the cumulative energy is flat.
inline ValidationReport validate(const EulerianState& state,
                                 double compat_tol = 1e-10) {
  ValidationReport report;
  report.unbounded_u = state.unbounded_u;

  if (!std::isfinite(state.energy) || state.energy < 0)
    report.violations.push_back(
        {Violation::Kind::nonfinite, 0, 0, std::abs(state.energy),
         "total energy is not finite and nonnegative"});
  for (const auto& n : state.u.nodes())
    if (!std::isfinite(n.v))
      report.violations.push_back({Violation::Kind::nonfinite, n.x, n.x, 0,
                                   "velocity value not finite"});

  // u_x^2 == density on each constant-density piece
  for (const auto& d : state.mu.density()) {
    std::vector<double> xs{d.a, d.b};
    for (const auto& n : state.u.nodes())
      if (n.x > d.a && n.x < d.b) xs.push_back(n.x);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double s = state.u.slope_right(0.5 * (xs[i] + xs[i + 1]));
      const double err = std::abs(s * s - d.value);
      if (err > compat_tol * std::max(1.0, d.value))
        report.violations.push_back(
            {Violation::Kind::compatibility, xs[i], xs[i + 1], err,
             "u_x^2 differs from the density"});
    }
  }

  // u constant on every interval where F is constant: outside the support
  // and across gaps between density pieces (atoms are single points).
  std::vector<std::pair<double, double>> covered;
  for (const auto& d : state.mu.density()) covered.push_back({d.a, d.b});
  double lo = -kInf, hi = kInf;
  if (!covered.empty()) {
    lo = covered.front().first;
    hi = covered.back().second;
  }
  auto check_flat = [&](double a, double b) {
    if (!(a < b)) return;
    double worst = 0.0;
    std::vector<double> xs{a, b};
    for (const auto& n : state.u.nodes())
      if (n.x > a && n.x < b) xs.push_back(n.x);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      worst = std::max(
          worst, std::abs(state.u.slope_right(0.5 * (xs[i] + xs[i + 1]))));
    if (worst > compat_tol)
      report.violations.push_back({Violation::Kind::not_constant_on_gap, a, b,
                                   worst,
                                   "u not constant where the energy is flat"});
  };
  for (std::size_t i = 0; i + 1 < covered.size(); ++i)
    check_flat(covered[i].second, covered[i + 1].first);
  // constant tails
  if (state.u.slope_lo() != 0.0)
    report.violations.push_back({Violation::Kind::not_constant_on_gap, -kInf,
                                 lo, std::abs(state.u.slope_lo()),
                                 "u not constant left of the support"});
  if (state.u.slope_hi() != 0.0)
    report.violations.push_back({Violation::Kind::not_constant_on_gap, hi,
                                 kInf, std::abs(state.u.slope_hi()),
                                 "u not constant right of the support"});
  if (!covered.empty()) {
    check_flat(state.u.nodes().front().x, lo);
    check_flat(hi, state.u.nodes().back().x);
  } else {
    check_flat(state.u.nodes().front().x, state.u.nodes().back().x);
  }
  return report;
}

// First blow-up time t* = 2 / sup(-u'); +inf when u is non-decreasing.
inline double blowup_time(const EulerianState& state) {
  const double steepest = state.u.max_negative_slope();
  return steepest > 0.0 ? 2.0 / steepest : kInf;
}

// ---------------------------------------------------------------------------
// Finite-difference residual of the augmented equation

using TimeSolution = std::function<EulerianState(double)>;

// |u_t + u u_x - (F/2 - C/4)| at (t, x) with central differences of step h.
// The stencil must stay clear of kinks and atoms; O(h^2) at smooth points.
inline double hs_residual(const TimeSolution& solution, double t, double x,
                          double h = 1e-4) {
  if (!(h > 0)) throw ArgumentError("hs_residual: step must be positive");
  const EulerianState sm = solution(t - h);
  const EulerianState s0 = solution(t);
  const EulerianState sp = solution(t + h);
  for (const EulerianState* s : {&sm, &s0, &sp}) {
    auto guard = [&](double p) {
      if (std::abs(x - p) < h)
        throw SingularityProximityError(
            "hs_residual: kink or atom inside the stencil");
    };
    for (const auto& n : s->u.nodes()) guard(n.x);
    for (const auto& a : s->mu.atoms()) guard(a.x);
    for (const auto& d : s->mu.density()) {
      guard(d.a);
      guard(d.b);
    }
  }
  const double ut = (sp.u(x) - sm.u(x)) / (2 * h);
  const double ux = (s0.u(x + h) - s0.u(x - h)) / (2 * h);
  const double F = cumulative(s0.mu).value(x);
  return std::abs(ut + s0.u(x) * ux - (0.5 * F - 0.25 * s0.energy));
}

// Functional distance between two states over a window containing both
// supports (used by round-trip and pipeline-equivalence checks).
inline double state_difference(const EulerianState& a, const EulerianState& b) {
  double lo = -1.0, hi = 1.0;
  for (const EulerianState* s : {&a, &b}) {
    lo = std::min(lo, s->u.nodes().front().x - 1.0);
    hi = std::max(hi, s->u.nodes().back().x + 1.0);
  }
  const double du = max_difference(a.u, b.u, lo, hi);
  const double dmu = measure_difference(a.mu, b.mu);
  const double dC = std::abs(a.energy - b.energy);
  return std::max({du, dmu, dC});
}

}  // namespace hsx
