#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hsx/metric.hpp"

// Closed-form initial data with known exact solutions, used both as
// constructors and as test oracles. Smooth data (erf, arcsinh) is sampled on
// an equispaced energy grid and carried as an exactly self-consistent
// piecewise state; its closed forms stay available as evaluators.

namespace hsx {

inline constexpr int kDefaultGrid = 4096;

// Inverse error function by bisection plus Newton refinement; no external
// special-function dependency. |erf(result) - p| <= 1e-14.
inline double erf_inv(double p) {
  if (!(p > -1.0 && p < 1.0))
    throw ArgumentError("erf_inv: argument outside (-1, 1)");
  double lo = -7.0, hi = 7.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  const double two_over_sqrt_pi = 2.0 / std::sqrt(M_PI);
  for (int i = 0; i < 4; ++i) {
    const double r = std::erf(x) - p;
    x -= r / (two_over_sqrt_pi * std::exp(-x * x));
  }
  return x;
}

struct ScenarioNotes {
  bool integrable = true;
  BoundaryCase boundary = BoundaryCase::both_finite;
  double blowup = kInf;
  bool unbounded_u = false;
};

struct Scenario {
  std::string name;
  std::map<std::string, double> params;
  double C = 0.0;
  EulerianState initial;
  TransportState transport0;

  // Closed-form evaluators, when the scenario has them.
  std::function<double(double, double)> exact_chi, exact_U;  // (t, eta)
  std::function<double(double, double)> exact_u, exact_F;    // (t, x)
  bool has_exact_transport = false;
  bool has_exact_eulerian = false;

  ScenarioNotes notes;
};

namespace detail {

inline Scenario from_initial(std::string name, EulerianState initial,
                             ScenarioNotes notes) {
  Scenario s;
  s.name = std::move(name);
  s.notes = notes;
  initial.unbounded_u = notes.unbounded_u;
  initial.boundary_override = notes.boundary;
  s.initial = std::move(initial);
  s.C = s.initial.energy;
  s.transport0 = init_transport(s.initial);
  return s;
}

// Sampled scenario from exact quantile evaluators: chi0 and U0 are sampled
// at eta_i = C i / N (exact closed-form values) and extended affinely to the
// interval ends. Sampling both exactly keeps the evolved surface exact at
// the grid nodes; the secant slopes satisfy (dU)^2 <= deta * dchi, so the
// represented state never develops spurious atoms.
inline Scenario sampled_scenario(std::string name, double C, int grid,
                                 const std::function<double(double)>& chi0_of,
                                 const std::function<double(double)>& U0_of,
                                 TailLaw law, ScenarioNotes notes) {
  if (grid < 8) throw ArgumentError("sampled scenario: grid too coarse");
  const int N = grid;
  std::vector<double> eta(N + 1), x(N + 1), U(N + 1);
  for (int i = 1; i < N; ++i) {
    eta[i] = C * i / N;
    x[i] = chi0_of(eta[i]);
    U[i] = U0_of(eta[i]);
  }
  eta[0] = 0.0;
  eta[N] = C;
  x[0] = 2 * x[1] - x[2];
  x[N] = 2 * x[N - 1] - x[N - 2];
  U[0] = 2 * U[1] - U[2];
  U[N] = 2 * U[N - 1] - U[N - 2];

  std::vector<Breakpoint> bps(N + 1);
  std::vector<Node> un(N + 1);
  for (int i = 0; i <= N; ++i) {
    bps[i] = {eta[i], x[i], x[i]};
    un[i] = {eta[i], U[i]};
  }
  bps.front().left = -kInf;  // chi(0) = sup of the empty set
  bps.back().right = kInf;

  Scenario s;
  s.name = std::move(name);
  s.C = C;
  s.notes = notes;
  s.transport0.t = 0.0;
  s.transport0.C = C;
  s.transport0.chi = MonotoneFunction(0.0, C, std::move(bps));
  s.transport0.Ucal = PiecewiseLinear(std::move(un));
  s.transport0.boundary = notes.boundary;
  s.transport0.unbounded_u = notes.unbounded_u;
  s.initial = reconstruct_eulerian(s.transport0);
  s.initial.mu.law_lo = law;
  s.initial.mu.law_hi = law;
  s.initial.unbounded_u = notes.unbounded_u;
  s.initial.boundary_override = notes.boundary;
  return s;
}

inline double require_param(const std::map<std::string, double>& params,
                            const std::string& key, double fallback,
                            bool required = false) {
  auto it = params.find(key);
  if (it == params.end()) {
    if (required) throw ArgumentError("missing scenario parameter: " + key);
    return fallback;
  }
  return it->second;
}

}  // namespace detail

Scenario build_scenario(const std::string& name,
                        const std::map<std::string, double>& params = {},
                        int grid = kDefaultGrid);

namespace detail {

inline Scenario build_delta(double alpha) {
  if (!(alpha > 0)) throw ArgumentError("delta scenario: alpha must be > 0");
  EulerianState init(PiecewiseLinear::constant(0.0),
                     RadonMeasure::dirac(0.0, alpha));
  ScenarioNotes notes;
  Scenario s = from_initial("delta", std::move(init), notes);
  s.params["alpha"] = alpha;
  s.exact_chi = [alpha](double t, double e) {
    return t * t / 4 * (e - alpha / 2);
  };
  s.exact_U = [alpha](double t, double e) { return t / 2 * (e - alpha / 2); };
  s.has_exact_transport = true;
  s.exact_u = [alpha](double t, double x) {
    if (t == 0.0) return 0.0;
    const double w = alpha * t * t / 8;
    if (x <= -w) return -alpha * t / 4;
    if (x >= w) return alpha * t / 4;
    return 2 * x / t;
  };
  s.exact_F = [alpha](double t, double x) {
    if (t == 0.0) return x <= 0.0 ? 0.0 : alpha;
    return std::clamp(4 * x / (t * t) + alpha / 2, 0.0, alpha);
  };
  s.has_exact_eulerian = true;
  return s;
}

inline Scenario build_wavebreak() {
  PiecewiseLinear u({{0.0, 0.0}, {1.0, -1.0}});
  EulerianState init(u, RadonMeasure::uniform(0.0, 1.0, 1.0));
  ScenarioNotes notes;
  notes.blowup = 2.0;
  Scenario s = from_initial("wavebreak", std::move(init), notes);
  s.exact_chi = [](double t, double e) {
    return t * t / 4 * (e - 0.5) - t * e + e;
  };
  s.exact_U = [](double t, double e) { return t / 2 * (e - 0.5) - e; };
  s.has_exact_transport = true;
  s.exact_u = [](double t, double x) {
    if (t == 0.0) return x <= 0.0 ? 0.0 : (x >= 1.0 ? -1.0 : -x);
    const double xl = -t * t / 8;
    const double xr = ((t - 2) * (t - 2) - t * t / 2) / 4;
    if (x <= xl) return -t / 4;
    if (x >= xr) return t / 4 - 1;
    return (2 * x + t / 2) / (t - 2);
  };
  s.exact_F = [](double t, double x) {
    if (t == 0.0) return std::clamp(x, 0.0, 1.0);
    if (t == 2.0) return x <= -0.5 ? 0.0 : 1.0;
    return std::clamp(4 * (x + t * t / 8) / ((t - 2) * (t - 2)), 0.0, 1.0);
  };
  s.has_exact_eulerian = true;
  return s;
}

inline Scenario build_two_delta() {
  EulerianState init(PiecewiseLinear::constant(0.0),
                     RadonMeasure({{0.0, 1.0}, {1.0, 2.0}}, {}));
  ScenarioNotes notes;
  Scenario s = from_initial("two_delta", std::move(init), notes);
  s.exact_chi = [](double t, double e) {
    return (e <= 1.0 ? 0.0 : 1.0) + t * t / 4 * (e - 1.5);
  };
  s.exact_U = [](double t, double e) { return t / 2 * (e - 1.5); };
  s.has_exact_transport = true;
  s.exact_u = [](double t, double x) {
    if (t == 0.0) return 0.0;
    const double t2 = t * t;
    if (x <= -3 * t2 / 8) return -0.75 * t;
    if (x <= -t2 / 8) return 2 * x / t;
    if (x <= 1 - t2 / 8) return -0.25 * t;
    if (x <= 1 + 3 * t2 / 8) return 2 * (x - 1) / t;
    return 0.75 * t;
  };
  s.exact_F = [](double t, double x) {
    if (t == 0.0) return x <= 0.0 ? 0.0 : (x <= 1.0 ? 1.0 : 3.0);
    const double t2 = t * t;
    if (x <= -3 * t2 / 8) return 0.0;
    if (x <= -t2 / 8) return 1.5 + 4 * x / t2;
    if (x <= 1 - t2 / 8) return 1.0;
    if (x <= 1 + 3 * t2 / 8) return 1.5 + 4 * (x - 1) / t2;
    return 3.0;
  };
  s.has_exact_eulerian = true;
  return s;
}

inline Scenario build_zero() {
  EulerianState init(PiecewiseLinear::constant(0.0), RadonMeasure{});
  ScenarioNotes notes;
  Scenario s = from_initial("zero", std::move(init), notes);
  s.exact_u = [](double, double) { return 0.0; };
  s.exact_F = [](double, double) { return 0.0; };
  s.has_exact_eulerian = true;
  return s;
}

inline Scenario build_erf(int grid) {
  const double sqrt_pi = std::sqrt(M_PI);
  ScenarioNotes notes;
  notes.boundary = BoundaryCase::both_infinite;
  auto chi0 = [sqrt_pi](double e) { return erf_inv(2 * e / sqrt_pi - 1); };
  auto U0 = [sqrt_pi, chi0](double e) {
    return std::sqrt(M_PI / 2) * std::erf(chi0(e) / std::sqrt(2.0));
  };
  TailLaw law{[sqrt_pi](double x) { return sqrt_pi / 2 * (1 + std::erf(x)); }};
  Scenario s = detail::sampled_scenario("erf", sqrt_pi, grid, chi0, U0, law,
                                        notes);
  s.exact_chi = [chi0, U0, sqrt_pi](double t, double e) {
    return t * t / 4 * (e - sqrt_pi / 2) + t * U0(e) + chi0(e);
  };
  s.exact_U = [U0, sqrt_pi](double t, double e) {
    return t / 2 * (e - sqrt_pi / 2) + U0(e);
  };
  s.has_exact_transport = true;
  return s;
}

inline Scenario build_arcsinh(int grid) {
  ScenarioNotes notes;
  notes.boundary = BoundaryCase::both_infinite;
  notes.integrable = false;  // Cauchy-type tails
  notes.unbounded_u = true;
  auto chi0 = [](double e) { return std::tan(e - M_PI / 2); };
  auto U0 = [chi0](double e) { return std::asinh(chi0(e)); };
  TailLaw law{[](double x) { return std::atan(x) + M_PI / 2; }};
  Scenario s =
      detail::sampled_scenario("arcsinh", M_PI, grid, chi0, U0, law, notes);
  s.exact_chi = [chi0, U0](double t, double e) {
    return t * t / 4 * (e - M_PI / 2) + t * U0(e) + chi0(e);
  };
  s.exact_U = [U0](double t, double e) { return t / 2 * (e - M_PI / 2) + U0(e); };
  s.has_exact_transport = true;
  return s;
}

inline Scenario build_custom(const std::map<std::string, double>& params) {
  std::vector<MassAtom> atoms;
  for (int i = 1; i <= 8; ++i) {
    const auto xk = "x" + std::to_string(i), mk = "m" + std::to_string(i);
    if (!params.count(xk) && !params.count(mk)) break;
    atoms.push_back({detail::require_param(params, xk, 0.0, true),
                     detail::require_param(params, mk, 0.0, true)});
  }
  if (atoms.empty())
    throw ArgumentError("custom scenario: no atoms given (x1=..,m1=..)");
  EulerianState init(PiecewiseLinear::constant(0.0),
                     RadonMeasure(std::move(atoms), {}));
  Scenario s = detail::from_initial("custom", std::move(init), ScenarioNotes{});
  s.params = params;
  return s;
}

inline Scenario build_translate(const std::map<std::string, double>& params,
                                const std::string& base_name, int grid) {
  const double h = detail::require_param(params, "h", 0.0, true);
  auto forwarded = params;
  forwarded.erase("h");
  Scenario base = build_scenario(base_name, forwarded, grid);
  Scenario s;
  s.name = "translate(" + base.name + ")";
  s.params = params;
  s.C = base.C;
  s.notes = base.notes;
  s.initial = base.initial.translated(h);
  if (base.initial.mu.law_lo)
    s.initial.mu.law_lo =
        TailLaw{[base_law = base.initial.mu.law_lo->cumulative, h](double x) {
          return base_law(x - h);
        }};
  if (base.initial.mu.law_hi)
    s.initial.mu.law_hi =
        TailLaw{[base_law = base.initial.mu.law_hi->cumulative, h](double x) {
          return base_law(x - h);
        }};
  s.initial.boundary_override = base.notes.boundary;
  s.initial.unbounded_u = base.notes.unbounded_u;
  // translated transport data: chi picks up the offset, U is unchanged
  s.transport0 = base.transport0;
  if (!s.transport0.zero_energy())
    s.transport0.chi = combine_with_monotone(base.transport0.chi, {}, 0.0, h);
  if (base.has_exact_transport) {
    s.exact_chi = [f = base.exact_chi, h](double t, double e) {
      return f(t, e) + h;
    };
    s.exact_U = base.exact_U;
    s.has_exact_transport = true;
  }
  if (base.has_exact_eulerian) {
    s.exact_u = [f = base.exact_u, h](double t, double x) {
      return f(t, x - h);
    };
    s.exact_F = [f = base.exact_F, h](double t, double x) {
      return f(t, x - h);
    };
    s.has_exact_eulerian = true;
  }
  return s;
}

}  // namespace detail

inline Scenario build_scenario(const std::string& name,
                               const std::map<std::string, double>& params,
                               int grid) {
  if (name == "delta")
    return detail::build_delta(detail::require_param(params, "alpha", 1.0));
  if (name == "wavebreak") return detail::build_wavebreak();
  if (name == "two_delta") return detail::build_two_delta();
  if (name == "zero") return detail::build_zero();
  if (name == "erf") return detail::build_erf(grid);
  if (name == "arcsinh") return detail::build_arcsinh(grid);
  if (name == "custom") return detail::build_custom(params);
  throw ArgumentError("unknown scenario: " + name);
}

// Grammar: name[:k=v,...]; translate names its base scenario, e.g.
//   delta:alpha=1.5 | two_delta | translate:base=wavebreak,h=0.1
inline Scenario parse_scenario(const std::string& text,
                               int grid = kDefaultGrid) {
  std::string name = text;
  std::map<std::string, double> params;
  std::string base;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    std::string rest = text.substr(colon + 1);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      auto comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      const std::string item = rest.substr(pos, comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ArgumentError("bad scenario parameter: " + item);
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      if (key == "base") {
        base = val;
      } else {
        try {
          params[key] = std::stod(val);
        } catch (const std::exception&) {
          throw ArgumentError("bad numeric value in scenario parameter: " + item);
        }
      }
      pos = comma + 1;
    }
  }
  if (name == "translate") {
    if (base.empty())
      throw ArgumentError("translate scenario needs base=<name>");
    return detail::build_translate(params, base, grid);
  }
  if (!base.empty()) throw ArgumentError("base= is only valid for translate");
  return build_scenario(name, params, grid);
}

// ---------------------------------------------------------------------------
// The non-uniqueness pair: the trivial solution and the self-similar fan out
// of (0, alpha delta_0). Both share u0 = 0; only the measure tells them
// apart.
inline std::pair<TimeSolution, TimeSolution> counterexample_pair(double alpha) {
  if (alpha < 0) throw ArgumentError("counterexample_pair: alpha < 0");
  TimeSolution trivial = [](double) {
    return EulerianState(PiecewiseLinear::constant(0.0), RadonMeasure{});
  };
  TimeSolution fan = [alpha](double t) {
    if (alpha == 0.0)
      return EulerianState(PiecewiseLinear::constant(0.0), RadonMeasure{});
    if (t == 0.0)
      return EulerianState(PiecewiseLinear::constant(0.0),
                           RadonMeasure::dirac(0.0, alpha));
    const double w = alpha * t * t / 8;
    PiecewiseLinear u({{-w, -alpha * t / 4}, {w, alpha * t / 4}});
    return EulerianState(u, RadonMeasure::uniform(-w, w, 4 / (t * t)));
  };
  return {trivial, fan};
}

// ---------------------------------------------------------------------------
// Seeded random pairs for the stability sweeps: translates of the named
// scenarios and mixtures of atoms (all compactly supported, hence
// integrable).

inline EulerianState random_atom_mixture(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-2.0, 2.0), mass(0.1, 1.5);
  std::uniform_int_distribution<int> count(1, 5);
  std::vector<MassAtom> atoms;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) atoms.push_back({pos(rng), mass(rng)});
  return EulerianState(PiecewiseLinear::constant(0.0),
                       RadonMeasure(std::move(atoms), {}));
}

inline std::pair<EulerianState, EulerianState> random_state_pair(
    std::mt19937_64& rng) {
  std::uniform_int_distribution<int> mode(0, 2);
  std::uniform_real_distribution<double> shift(-1.0, 1.0), alpha(0.2, 2.5);
  switch (mode(rng)) {
    case 0: {
      const char* bases[] = {"wavebreak", "two_delta", "delta"};
      const std::string base = bases[std::uniform_int_distribution<int>(0, 2)(rng)];
      std::map<std::string, double> p;
      if (base == "delta") p["alpha"] = alpha(rng);
      const Scenario s = build_scenario(base, p);
      return {s.initial, s.initial.translated(shift(rng))};
    }
    case 1: {
      auto a = random_atom_mixture(rng);
      return {a, a.translated(shift(rng))};
    }
    default:
      return {random_atom_mixture(rng), random_atom_mixture(rng)};
  }
}

}  // namespace hsx
