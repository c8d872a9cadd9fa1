#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "hsx/eulerian.hpp"

// Lagrangian coordinates X = (y, U, H): characteristic position, velocity
// along characteristics and cumulative energy along characteristics. In these
// variables the flow is an explicit affine map in (t, t^2).

namespace hsx {

struct LagrangianState {
  PiecewiseLinear y;  // non-decreasing, slope-1 tails
  PiecewiseLinear U;  // continuous, constant tails
  PiecewiseLinear H;  // non-decreasing, constant tails (0 and C)
  double energy = 0.0;
  bool in_F0 = false;  // y + H = id holds exactly on every piece

  bool unbounded_u = false;
  std::optional<BoundaryCase> boundary_override;

  // Merged xi positions of all three piece tables.
  std::vector<double> xi_grid() const {
    std::vector<double> xs;
    for (const PiecewiseLinear* f : {&y, &U, &H})
      for (const auto& n : f->nodes()) xs.push_back(n.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
  }
};

// Structural diagnostics for membership in the Lagrangian state space:
// y and H non-decreasing, y_xi + H_xi bounded below by a positive constant,
// and y_xi H_xi = U_xi^2 piecewise.
struct LagrangianCheck {
  double min_y_slope = kInf;
  double min_H_slope = kInf;
  double min_yH_slope = kInf;  // the constant c
  double compat_worst = 0.0;   // max |y_xi H_xi - U_xi^2| (relative)
  double f0_residual = 0.0;    // max |y + H - id|
  bool ok(double compat_tol = 1e-10, double c_min = 1e-12) const {
    return min_y_slope >= -1e-12 && min_H_slope >= -1e-12 &&
           min_yH_slope > c_min && compat_worst <= compat_tol;
  }
};

inline LagrangianCheck check_structure(const LagrangianState& X) {
  LagrangianCheck c;
  const auto xs = X.xi_grid();
  auto probe = [&](double a, double b) {
    const double m = 0.5 * (a + b);
    const double ys = X.y.slope_right(m);
    const double Hs = X.H.slope_right(m);
    const double Us = X.U.slope_right(m);
    c.min_y_slope = std::min(c.min_y_slope, ys);
    c.min_H_slope = std::min(c.min_H_slope, Hs);
    c.min_yH_slope = std::min(c.min_yH_slope, ys + Hs);
    const double err = std::abs(ys * Hs - Us * Us);
    c.compat_worst =
        std::max(c.compat_worst, err / std::max(1.0, std::abs(ys * Hs)));
  };
  probe(xs.front() - 2.0, xs.front() - 1.0);  // tails
  probe(xs.back() + 1.0, xs.back() + 2.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) probe(xs[i], xs[i + 1]);
  for (double x : xs)
    c.f0_residual =
        std::max(c.f0_residual, std::abs(X.y(x) + X.H(x) - x));
  return c;
}

// ---------------------------------------------------------------------------
// L: Eulerian -> Lagrangian (canonical labels, y + H = id)

inline LagrangianState to_lagrangian(const EulerianState& state) {
  LagrangianState X;
  const auto F = cumulative(state.mu);
  // G(x) = F(x) + x is strictly increasing with jumps at the atoms;
  // y(xi) = sup { x : G(x) < xi } is its continuous generalized inverse.
  const auto G = combine_with_monotone(F, {}, 1.0, 0.0);
  X.y = to_piecewise_linear(generalized_inverse(G, -kInf, kInf));
  X.U = compose(state.u, X.y);
  X.H = combine({{-1.0, &X.y}}, 1.0, 0.0);  // H = id - y
  X.energy = state.energy;
  X.in_F0 = true;
  X.unbounded_u = state.unbounded_u;
  X.boundary_override = state.boundary_override;
  return X;
}

// ---------------------------------------------------------------------------
// M: Lagrangian -> Eulerian

// u(x) = U at any xi with y(xi) = x (U must be constant on y-flats), and
// mu = y-pushforward of H_xi d xi: flats of y emit atoms.
inline EulerianState to_eulerian(const LagrangianState& X,
                                 double gap_tol = 1e-9) {
  const auto y_inv = generalized_inverse(to_monotone(X.y), -kInf, kInf);
  const auto F = compose_keep_jumps(X.H, y_inv);
  EulerianState out(compose_through_gaps(X.U, y_inv, gap_tol, "to_eulerian"),
                    measure_from_cumulative(F));
  out.unbounded_u = X.unbounded_u;
  out.boundary_override = X.boundary_override;
  return out;
}

// ---------------------------------------------------------------------------
// The explicit flow S_t

inline LagrangianState flow(const LagrangianState& X, double t) {
  if (t < 0) throw ArgumentError("flow: negative time");
  LagrangianState out = X;
  const double C = X.energy;
  out.y = combine({{1.0, &X.y}, {t, &X.U}, {t * t / 4, &X.H}}, 0.0,
                  -C * t * t / 8);
  out.U = combine({{1.0, &X.U}, {t / 2, &X.H}}, 0.0, -C * t / 4);
  out.H = X.H;
  out.in_F0 = (t == 0.0) ? X.in_F0 : false;
  return out;
}

// ---------------------------------------------------------------------------
// Relabeling projection onto y + H = id

inline LagrangianState canonicalize(const LagrangianState& X) {
  const auto w = combine({{1.0, &X.y}, {1.0, &X.H}});
  const auto winv = invert_increasing(w);
  LagrangianState out = X;
  out.y = compose(X.y, winv);
  out.U = compose(X.U, winv);
  out.H = combine({{-1.0, &out.y}}, 1.0, 0.0);  // exact y + H = id
  out.in_F0 = true;
  return out;
}

// Functional distance between two Lagrangian piece tables.
inline double lagrangian_difference(const LagrangianState& a,
                                    const LagrangianState& b) {
  double lo = kInf, hi = -kInf;
  for (const LagrangianState* s : {&a, &b}) {
    const auto xs = s->xi_grid();
    lo = std::min(lo, xs.front() - 1.0);
    hi = std::max(hi, xs.back() + 1.0);
  }
  double m = std::abs(a.energy - b.energy);
  m = std::max(m, max_difference(a.y, b.y, lo, hi));
  m = std::max(m, max_difference(a.U, b.U, lo, hi));
  m = std::max(m, max_difference(a.H, b.H, lo, hi));
  return m;
}

// Two states are relabelings of one another iff their canonical
// representatives coincide (the canonical slice meets every equivalence
// class exactly once).
inline bool is_relabeling_of(const LagrangianState& X1,
                             const LagrangianState& X2, double tol = 1e-10) {
  return lagrangian_difference(canonicalize(X1), canonicalize(X2)) <= tol;
}

// Relabeling functions: increasing homeomorphisms with g - id bounded with
// bounded derivative and g' - 1 square integrable. On a finite piece table
// this reduces to slope-1 tails and strictly positive slopes.
inline bool is_valid_relabeling(const PiecewiseLinear& g) {
  if (g.slope_lo() != 1.0 || g.slope_hi() != 1.0) return false;
  const auto& n = g.nodes();
  for (std::size_t i = 0; i + 1 < n.size(); ++i)
    if ((n[i + 1].v - n[i].v) / (n[i + 1].x - n[i].x) <= 1e-12) return false;
  for (const auto& node : n)
    if (!std::isfinite(node.v - node.x)) return false;
  return true;
}

// X composed with a relabeling g (for tests of relabeling invariance).
inline LagrangianState relabel(const LagrangianState& X,
                               const PiecewiseLinear& g) {
  if (!is_valid_relabeling(g))
    throw ArgumentError("relabel: g is not an admissible relabeling");
  LagrangianState out = X;
  out.y = compose(X.y, g);
  out.U = compose(X.U, g);
  out.H = compose(X.H, g);
  out.in_F0 = false;
  return out;
}

}  // namespace hsx
