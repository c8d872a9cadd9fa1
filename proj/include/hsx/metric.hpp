#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hsx/transport.hpp"

// The Wasserstein-based stability metric. Quantile functions are rescaled to
// the common interval [0,1], so states of different total energy can be
// compared; the flow then satisfies d(t) <= (1 + t + t^2/8) d(0).

namespace hsx {

struct MetricComponents {
  double uinf = 0.0;    // sup |U_1 - U_2| after rescaling
  double chi_l1 = 0.0;  // L1 distance of the rescaled quantile functions
  double mass = 0.0;    // |C_1 - C_2|
  double total() const { return uinf + chi_l1 + mass; }
};

struct MetricReport {
  double t = 0.0;
  double d_value = 0.0;
  double bound_factor = 1.0;  // 1 + t + t^2/8
  double d0_value = 0.0;
  bool satisfied = true;  // d_value <= bound_factor * d0_value + 1e-9
  MetricComponents components;
};

inline constexpr double kBoundSlack = 1e-9;

inline double lipschitz_bound_factor(double t) { return 1.0 + t + t * t / 8; }

// ---------------------------------------------------------------------------
// Wasserstein distance between equal-mass measures

inline double wasserstein(const RadonMeasure& mu1, const RadonMeasure& mu2) {
  const double C1 = mu1.total_mass(), C2 = mu2.total_mass();
  if (std::abs(C1 - C2) > 1e-12 * std::max({1.0, C1, C2}))
    throw MassMismatchError(
        "wasserstein: measures carry different total mass (" +
        std::to_string(C1) + " vs " + std::to_string(C2) + ")");
  const auto F1 = cumulative(mu1), F2 = cumulative(mu2);
  if (!check_integrability(F1, C1) || !check_integrability(F2, C2))
    throw NonIntegrableError(
        "wasserstein: a cumulative energy has divergent tail integrals");
  if (C1 == 0.0) return 0.0;
  return l1_distance(pseudo_inverse(F1, C1), pseudo_inverse(F2, C2));
}

// ---------------------------------------------------------------------------
// Fixed-mass solution metric: sup-norm of the velocities along the quantile
// variable plus the L1 distance of the quantile functions, both on [0, C].

inline double distance_fixed_mass(const TransportState& a,
                                  const TransportState& b) {
  if (std::abs(a.C - b.C) > 1e-12 * std::max({1.0, a.C, b.C}))
    throw MassMismatchError("distance_fixed_mass: different total energies");
  if (a.zero_energy() && b.zero_energy())
    return std::abs(a.flat_u - b.flat_u);
  const double Cc = std::min(a.C, b.C);
  return sup_distance(a.Ucal, b.Ucal, 0.0, Cc) + l1_distance(a.chi, b.chi);
}

// ---------------------------------------------------------------------------
// The rescaled metric of unequal masses

namespace detail {

inline MonotoneFunction rescaled_chi(const TransportState& ts) {
  if (ts.zero_energy())
    return MonotoneFunction(0.0, 1.0, {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}});
  return rescale_argument(ts.chi, ts.C);
}

inline PiecewiseLinear rescaled_U(const TransportState& ts) {
  if (ts.zero_energy()) return PiecewiseLinear::constant(ts.flat_u);
  return rescale_argument(ts.Ucal, ts.C);
}

}  // namespace detail

// Components of the rescaled metric between two transport states (any total
// energies, including zero).
inline MetricComponents rescaled_components(const TransportState& a,
                                            const TransportState& b) {
  MetricComponents c;
  c.uinf = sup_distance(detail::rescaled_U(a), detail::rescaled_U(b), 0.0, 1.0);
  c.chi_l1 = l1_distance(detail::rescaled_chi(a), detail::rescaled_chi(b),
                         0.0, 1.0);
  c.mass = std::abs(a.C - b.C);
  return c;
}

namespace detail {

inline void require_integrable(const EulerianState& s, const char* which) {
  if (!check_integrability(cumulative(s.mu), s.energy))
    throw NonIntegrableError(
        std::string("distance: the ") + which +
        " state violates the integrability condition (the tail integrals of "
        "its cumulative energy diverge), so its quantile function is not in "
        "L1");
}

}  // namespace detail

// d((u1, mu1), (u2, mu2)) at time t, plus the comparison against the
// Lipschitz bound (1 + t + t^2/8) d(0).
inline MetricReport distance(const EulerianState& s1, const EulerianState& s2,
                             double t) {
  if (t < 0) throw ArgumentError("distance: negative time");
  detail::require_integrable(s1, "first");
  detail::require_integrable(s2, "second");
  const auto a0 = init_transport(s1), b0 = init_transport(s2);
  MetricReport report;
  report.t = t;
  report.components = rescaled_components(evolve(a0, t), evolve(b0, t));
  report.d_value = report.components.total();
  report.d0_value = rescaled_components(a0, b0).total();
  report.bound_factor = lipschitz_bound_factor(t);
  report.satisfied =
      report.d_value <= report.bound_factor * report.d0_value + kBoundSlack;
  return report;
}

// One report per time, ordered by t; overall stability holds iff every
// report is satisfied.
inline std::vector<MetricReport> verify_lipschitz(const EulerianState& s1,
                                                  const EulerianState& s2,
                                                  std::vector<double> times) {
  std::sort(times.begin(), times.end());
  detail::require_integrable(s1, "first");
  detail::require_integrable(s2, "second");
  const auto a0 = init_transport(s1), b0 = init_transport(s2);
  const double d0 = rescaled_components(a0, b0).total();
  std::vector<MetricReport> reports;
  reports.reserve(times.size());
  for (double t : times) {
    if (t < 0) throw ArgumentError("verify_lipschitz: negative time");
    MetricReport r;
    r.t = t;
    r.components = rescaled_components(evolve(a0, t), evolve(b0, t));
    r.d_value = r.components.total();
    r.d0_value = d0;
    r.bound_factor = lipschitz_bound_factor(t);
    r.satisfied = r.d_value <= r.bound_factor * d0 + kBoundSlack;
    reports.push_back(r);
  }
  return reports;
}

}  // namespace hsx
