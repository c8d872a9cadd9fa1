#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hsx/lagrangian.hpp"

// The quantile-side flow: chi(t, .) is the generalized inverse of the
// cumulative energy and Ucal(t, eta) = u(t, chi(t, eta)). In these variables
// the evolution is affine in (t, t^2) and wave breaking shows up as flats of
// chi collapsing mass into atoms.

namespace hsx {

struct TransportState {
  double t = 0.0;
  double C = 0.0;
  MonotoneFunction chi;  // on [0, C] when C > 0
  PiecewiseLinear Ucal;  // continuous on [0, C], constant beyond
  BoundaryCase boundary = BoundaryCase::both_finite;
  bool left_extended = false;
  bool right_extended = false;
  bool unbounded_u = false;
  double flat_u = 0.0;  // constant velocity when C == 0

  TransportState() : Ucal(PiecewiseLinear::constant(0.0)) {}

  bool zero_energy() const { return C == 0.0; }

  // chi and Ucal including the continuity extension: slope-1 continuation of
  // chi and constant velocity outside [0, C].
  double chi_at(double eta) const {
    if (zero_energy()) throw ArgumentError("chi_at: zero-energy state");
    if (eta < 0.0) {
      if (!left_extended)
        throw ArgumentError("chi_at: eta below 0 on an unextended state");
      return chi.value_right(0.0) + eta;
    }
    if (eta > C) {
      if (!right_extended)
        throw ArgumentError("chi_at: eta above C on an unextended state");
      return chi.value(C) + (eta - C);
    }
    if (eta == 0.0 && left_extended) return chi.value_right(0.0);
    return chi.value(eta);
  }

  double U_at(double eta) const {
    if (zero_energy()) return flat_u;
    if ((eta < 0.0 && !left_extended) || (eta > C && !right_extended))
      throw ArgumentError("U_at: eta outside [0, C] on an unextended state");
    return Ucal(std::clamp(eta, 0.0, C));
  }
};

// ---------------------------------------------------------------------------

inline BoundaryCase infer_boundary(const MonotoneFunction& chi0) {
  const bool lo_finite = std::isfinite(chi0.approach_lo());
  const bool hi_finite = std::isfinite(chi0.approach_hi());
  if (lo_finite && hi_finite) return BoundaryCase::both_finite;
  if (!lo_finite && hi_finite) return BoundaryCase::left_infinite;
  if (lo_finite && !hi_finite) return BoundaryCase::right_infinite;
  return BoundaryCase::both_infinite;
}

inline TransportState init_transport(const EulerianState& state) {
  TransportState ts;
  ts.t = 0.0;
  ts.C = state.energy;
  ts.unbounded_u = state.unbounded_u;
  if (state.mu.is_zero()) {
    // u is constant for measure-free states; keep that constant.
    double v = state.u.nodes().front().v;
    for (const auto& n : state.u.nodes())
      if (std::abs(n.v - v) > 1e-12 * std::max(1.0, std::abs(v)))
        throw InvalidStateError(
            "init_transport: velocity not constant although the energy vanishes");
    ts.C = 0.0;
    ts.flat_u = v;
    return ts;
  }
  const auto F = cumulative(state.mu);
  ts.chi = pseudo_inverse(F, ts.C);
  ts.Ucal = compose_through_gaps(state.u, ts.chi, 1e-9, "init_transport");
  ts.boundary = state.boundary_override.value_or(infer_boundary(ts.chi));
  return ts;
}

// Closed-form update from time ts.t to time t >= ts.t:
//   chi(t) = chi + tau*Ucal + (tau^2/4)(eta - C/2),
//   Ucal(t) = Ucal + (tau/2)(eta - C/2),  tau = t - ts.t.
// Monotonicity of the result is asserted; for states satisfying the
// compatibility condition the new slope is (Ucal' + tau/2)^2 >= 0, so a
// violation signals corrupted input.
inline TransportState evolve(const TransportState& ts, double t) {
  if (t < 0) throw ArgumentError("evolve: negative time");
  if (t < ts.t) throw ArgumentError("evolve: backward evolution requested");
  TransportState out = ts;
  out.left_extended = out.right_extended = false;
  out.t = t;
  if (ts.zero_energy()) return out;
  const double tau = t - ts.t;
  if (tau == 0.0) return out;
  try {
    out.chi = combine_with_monotone(ts.chi, {{tau, &ts.Ucal}}, tau * tau / 4,
                                    -tau * tau * ts.C / 8);
  } catch (const NonMonotoneError&) {
    throw NonMonotoneError(
        "evolve: forward image of the quantile function is not monotone "
        "(input state is not a conservative datum)");
  }
  out.Ucal = combine({{1.0, &ts.Ucal}}, tau / 2, -tau * ts.C / 4);
  return out;
}

// Appends the continuity extension on every side with a finite boundary
// limit: chi grows with slope 1 and the velocity stays constant beyond
// [0, C]. Raises InfiniteBoundaryError when no side can be extended.
inline TransportState extend_by_continuity(const TransportState& ts) {
  TransportState out = ts;
  if (ts.zero_energy()) return out;
  const bool lo_finite = ts.boundary == BoundaryCase::both_finite ||
                         ts.boundary == BoundaryCase::right_infinite;
  const bool hi_finite = ts.boundary == BoundaryCase::both_finite ||
                         ts.boundary == BoundaryCase::left_infinite;
  if (!lo_finite && !hi_finite)
    throw InfiniteBoundaryError(
        "extend_by_continuity: both boundary limits are infinite");
  out.left_extended = lo_finite;
  out.right_extended = hi_finite;
  return out;
}

// l(eta) = sup { xi : H(xi) < eta }, the label at which the Lagrangian
// cumulative energy reaches eta. Time-independent because H is.
inline double label_at_energy(const LagrangianState& X, double eta) {
  if (eta < 0 || eta > X.energy)
    throw ArgumentError("label_at_energy: eta outside [0, C]");
  const auto l = generalized_inverse(to_monotone(X.H), 0.0, X.energy);
  return l.value(eta);
}

// ---------------------------------------------------------------------------
// Back to Eulerian variables

// u(t, x) = Ucal(t, eta) at any eta with chi(t, eta) = x; flats of chi emit
// atoms, jumps of chi leave gaps where u takes the single boundary value.
inline EulerianState reconstruct_eulerian(const TransportState& ts) {
  if (ts.zero_energy())
    return EulerianState(PiecewiseLinear::constant(ts.flat_u), RadonMeasure{});
  const auto F = inverse_to_cumulative(ts.chi, ts.C);
  EulerianState out(compose_through_gaps(ts.Ucal, F, 1e-9, "reconstruct"),
                    measure_from_cumulative(F));
  out.unbounded_u = ts.unbounded_u;
  out.boundary_override = ts.boundary;
  return out;
}

// ---------------------------------------------------------------------------
// Solution surface

struct SurfaceRow {
  double t, eta, chi, U;
};

// Deterministic sampling of {(chi(t,eta), t, Ucal(t,eta))}: eta equispaced in
// (0, C) plus every breakpoint; finite endpoints included; on extended sides
// an extra margin of C/4 of continuation rows is emitted.
inline std::vector<SurfaceRow> solution_surface(const TransportState& ts0,
                                                std::vector<double> times,
                                                int eta_samples) {
  if (eta_samples < 1) throw ArgumentError("solution_surface: bad sample count");
  std::vector<SurfaceRow> rows;
  std::sort(times.begin(), times.end());
  for (double t : times) {
    const auto ts = t == ts0.t ? ts0 : evolve(ts0, t);
    if (ts.zero_energy()) continue;  // no quantile variables to tabulate
    TransportState ext = ts;
    if (ts0.left_extended || ts0.right_extended) {
      ext.left_extended = ts0.left_extended;
      ext.right_extended = ts0.right_extended;
    }
    std::vector<double> etas;
    const double step = ts.C / (eta_samples + 1);
    for (int k = 1; k <= eta_samples; ++k) etas.push_back(step * k);
    for (const auto& b : ts.chi.breakpoints()) etas.push_back(b.x);
    for (const auto& n : ts.Ucal.nodes())
      if (n.x >= 0 && n.x <= ts.C) etas.push_back(n.x);
    if (ext.left_extended)
      for (double e = -ts.C / 4; e < 0; e += step) etas.push_back(e);
    if (ext.right_extended)
      for (double e = ts.C + step; e <= ts.C * 1.25; e += step)
        etas.push_back(e);
    std::sort(etas.begin(), etas.end());
    etas.erase(std::unique(etas.begin(), etas.end()), etas.end());
    for (double eta : etas) {
      double c;
      try {
        c = ext.chi_at(eta);
      } catch (const ArgumentError&) {
        continue;
      }
      if (!std::isfinite(c)) continue;  // endpoint sentinel
      rows.push_back({t, eta, c, ext.U_at(eta)});
    }
  }
  return rows;
}

}  // namespace hsx
