#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hsx/scenarios.hpp"

// Invariant sweeps over the scenario catalogue and seeded random pairs;
// shared by the command-line `verify` subcommand and the acceptance suite.

namespace hsx {

struct PropertyResult {
  std::string suite;
  std::string name;
  int cases = 0;
  double max_err = 0.0;
  double tol = 0.0;
  bool pass() const { return max_err <= tol; }
};

namespace detail {

inline std::vector<Scenario> sweep_scenarios(int grid) {
  std::vector<Scenario> out;
  for (const char* name :
       {"zero", "delta", "wavebreak", "two_delta", "erf", "arcsinh"})
    out.push_back(build_scenario(name, {}, grid));
  return out;
}

}  // namespace detail

inline std::vector<PropertyResult> verify_roundtrip(int grid = 1024) {
  PropertyResult ml{"roundtrip", "eulerian -> lagrangian -> eulerian", 0, 0.0,
                    1e-12};
  PropertyResult lm{"roundtrip", "canonical lagrangian -> eulerian -> back", 0,
                    0.0, 1e-12};
  for (const auto& s : detail::sweep_scenarios(grid)) {
    ml.cases++;
    ml.max_err = std::max(
        ml.max_err, state_difference(s.initial, to_eulerian(to_lagrangian(s.initial))));
    for (double t : {0.0, 0.7, 2.0}) {
      const auto X = canonicalize(flow(to_lagrangian(s.initial), t));
      lm.cases++;
      lm.max_err = std::max(lm.max_err,
                            lagrangian_difference(X, to_lagrangian(to_eulerian(X))));
    }
  }
  return {ml, lm};
}

inline std::vector<PropertyResult> verify_ode(int grid = 1024) {
  PropertyResult chi_eq{"ode", "d chi / dt = U", 0, 0.0, 1e-10};
  PropertyResult u_eq{"ode", "d U / dt = eta/2 - C/4", 0, 0.0, 1e-10};
  const double dt = 0.25;
  for (const auto& s : detail::sweep_scenarios(grid)) {
    if (s.transport0.zero_energy()) continue;
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
      const auto m = evolve(s.transport0, t - dt);
      const auto c = evolve(s.transport0, t);
      const auto p = evolve(s.transport0, t + dt);
      for (int k = 1; k <= 16; ++k) {
        const double eta = s.C * k / 16;
        chi_eq.cases++;
        chi_eq.max_err = std::max(
            chi_eq.max_err,
            std::abs((p.chi.value(eta) - m.chi.value(eta)) / (2 * dt) -
                     c.Ucal(eta)));
        u_eq.cases++;
        u_eq.max_err = std::max(
            u_eq.max_err, std::abs((p.Ucal(eta) - m.Ucal(eta)) / (2 * dt) -
                                   (eta / 2 - s.C / 4)));
      }
    }
  }
  return {chi_eq, u_eq};
}

inline std::vector<PropertyResult> verify_conservation(int grid = 1024) {
  PropertyResult r{"conservation", "mu(t, R) = C", 0, 0.0, 1e-12};
  for (const auto& s : detail::sweep_scenarios(grid)) {
    for (int i = 0; i <= 10; ++i) {
      const double t = 0.5 * i;
      const auto rec = reconstruct_eulerian(evolve(s.transport0, t));
      r.cases++;
      r.max_err = std::max(
          r.max_err, std::abs(rec.energy - s.C) / std::max(1.0, s.C));
    }
  }
  return {r};
}

inline std::vector<PropertyResult> verify_lipschitz_sweep(std::uint64_t seed,
                                                          int pairs = 100) {
  PropertyResult bound{"lipschitz", "d(t) <= (1 + t + t^2/8) d(0)", 0, 0.0,
                       1e-9};
  PropertyResult comp_u{"lipschitz", "sup-norm component inequality", 0, 0.0,
                        1e-9};
  PropertyResult comp_chi{"lipschitz", "L1 component inequality", 0, 0.0,
                          1e-9};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < pairs; ++i) {
    const auto [a, b] = random_state_pair(rng);
    const auto a0 = init_transport(a), b0 = init_transport(b);
    const auto c0 = rescaled_components(a0, b0);
    const double d0 = c0.total();
    for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
      const auto ct = rescaled_components(evolve(a0, t), evolve(b0, t));
      bound.cases++;
      bound.max_err = std::max(
          bound.max_err, ct.total() - lipschitz_bound_factor(t) * d0);
      comp_u.cases++;
      comp_u.max_err = std::max(
          comp_u.max_err, ct.uinf - (c0.uinf + t / 4 * c0.mass));
      comp_chi.cases++;
      comp_chi.max_err = std::max(
          comp_chi.max_err,
          ct.chi_l1 - (c0.chi_l1 + t * c0.uinf + t * t / 8 * c0.mass));
    }
  }
  // negative slack means the inequality held strictly
  bound.max_err = std::max(bound.max_err, 0.0);
  comp_u.max_err = std::max(comp_u.max_err, 0.0);
  comp_chi.max_err = std::max(comp_chi.max_err, 0.0);
  return {bound, comp_u, comp_chi};
}

inline std::vector<PropertyResult> run_verify(const std::string& suite,
                                              std::uint64_t seed) {
  std::vector<PropertyResult> out;
  auto append = [&out](std::vector<PropertyResult> rs) {
    out.insert(out.end(), rs.begin(), rs.end());
  };
  if (suite == "roundtrip" || suite == "all") append(verify_roundtrip());
  if (suite == "ode" || suite == "all") append(verify_ode());
  if (suite == "conservation" || suite == "all") append(verify_conservation());
  if (suite == "lipschitz" || suite == "all")
    append(verify_lipschitz_sweep(seed));
  if (out.empty()) throw ArgumentError("unknown verify suite: " + suite);
  return out;
}

}  // namespace hsx
