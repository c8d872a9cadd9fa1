#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsx/errors.hpp"

// Exact piecewise-affine function algebra.
//
// Two function types cover everything the library manipulates:
//   * PiecewiseLinear   -- continuous, not necessarily monotone (velocities).
//   * MonotoneFunction  -- non-decreasing, left-continuous, jumps allowed
//                          (cumulative energies and their quantile inverses).
// Generalized inversion is done on the completed graph (a monotone polyline):
// transposing the polyline swaps jumps and flats exactly, with no arithmetic
// on the vertices, so inversion round trips are bit-exact.

namespace hsx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative tolerance below which a numerically computed rise is treated as an
// exact flat (and a negative rise as monotonicity violation).
inline constexpr double kFlatRel = 1e-13;

// Locations closer than this are merged when extracting atoms.
inline constexpr double kAtomMergeTol = 1e-14;

inline double flat_eps(double a, double b) {
  return kFlatRel * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Node {
  double x;
  double v;
};

struct Breakpoint {
  double x;
  double left;   // value at x (left-continuous convention)
  double right;  // limit from the right
};

// Exact closed-form description of a cumulative function beyond the range
// covered by breakpoints; consumed only by integrability checks.
struct TailLaw {
  std::function<double(double)> cumulative;
};

// ---------------------------------------------------------------------------
// PiecewiseLinear

class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;

  PiecewiseLinear(std::vector<Node> nodes, double slope_lo = 0.0,
                  double slope_hi = 0.0)
      : nodes_(std::move(nodes)), slope_lo_(slope_lo), slope_hi_(slope_hi) {
    if (nodes_.empty()) throw ArgumentError("PiecewiseLinear: no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!std::isfinite(nodes_[i].x) || !std::isfinite(nodes_[i].v))
        throw ArgumentError("PiecewiseLinear: non-finite node");
      if (i > 0 && !(nodes_[i - 1].x < nodes_[i].x))
        throw ArgumentError("PiecewiseLinear: nodes not strictly increasing");
    }
    if (!std::isfinite(slope_lo_) || !std::isfinite(slope_hi_))
      throw ArgumentError("PiecewiseLinear: non-finite tail slope");
  }

  static PiecewiseLinear constant(double v) { return PiecewiseLinear({{0.0, v}}); }

  static PiecewiseLinear identity() {
    return PiecewiseLinear({{0.0, 0.0}}, 1.0, 1.0);
  }

  double operator()(double x) const {
    const auto& n = nodes_;
    if (x <= n.front().x)
      return n.front().v - slope_lo_ * (n.front().x - x);
    if (x >= n.back().x)
      return n.back().v + slope_hi_ * (x - n.back().x);
    std::size_t i = segment_index(x);
    if (x == n[i].x) return n[i].v;
    const double dx = n[i + 1].x - n[i].x;
    return n[i].v + (x - n[i].x) * (n[i + 1].v - n[i].v) / dx;
  }

  // Slope of the piece immediately right of x (left of x for slope_left).
  double slope_right(double x) const {
    const auto& n = nodes_;
    if (x >= n.back().x) return slope_hi_;
    if (x < n.front().x) return slope_lo_;
    std::size_t i = segment_index(x);
    return (n[i + 1].v - n[i].v) / (n[i + 1].x - n[i].x);
  }

  double slope_left(double x) const {
    const auto& n = nodes_;
    if (x <= n.front().x) return slope_lo_;
    if (x > n.back().x) return slope_hi_;
    std::size_t i = segment_index(x);
    if (x == n[i].x) {
      if (i == 0) return slope_lo_;
      return (n[i].v - n[i - 1].v) / (n[i].x - n[i - 1].x);
    }
    return (n[i + 1].v - n[i].v) / (n[i + 1].x - n[i].x);
  }

  // Largest negative slope over all pieces, as sup(-f'); 0 if non-decreasing.
  double max_negative_slope() const {
    double m = std::max(0.0, std::max(-slope_lo_, -slope_hi_));
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
      const double s =
          (nodes_[i + 1].v - nodes_[i].v) / (nodes_[i + 1].x - nodes_[i].x);
      m = std::max(m, -s);
    }
    return m;
  }

  bool non_decreasing(double tol = 0.0) const {
    if (slope_lo_ < -tol || slope_hi_ < -tol) return false;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
      if (nodes_[i + 1].v < nodes_[i].v - flat_eps(nodes_[i].v, nodes_[i + 1].v))
        return false;
    return true;
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  double slope_lo() const { return slope_lo_; }
  double slope_hi() const { return slope_hi_; }

 private:
  // Index i with nodes_[i].x <= x < nodes_[i+1].x (x strictly inside range).
  std::size_t segment_index(double x) const {
    auto it = std::upper_bound(
        nodes_.begin(), nodes_.end(), x,
        [](double a, const Node& b) { return a < b.x; });
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
  }

  std::vector<Node> nodes_;
  double slope_lo_ = 0.0;
  double slope_hi_ = 0.0;
};

// ---------------------------------------------------------------------------
// MonotoneFunction

// Non-decreasing and left-continuous on a closed extended-real interval
// [domain_lo, domain_hi]. Affine between breakpoints; for an unbounded domain
// the function continues past the extreme breakpoints with the tail slopes.
// A bounded domain must carry breakpoints at both endpoints. The value at a
// finite left endpoint may be -inf (a single-point sentinel, e.g. a quantile
// function at 0); it never contributes to integrals.
class MonotoneFunction {
 public:
  MonotoneFunction() = default;

  MonotoneFunction(double lo, double hi, std::vector<Breakpoint> bps,
                   double slope_lo = 0.0, double slope_hi = 0.0)
      : lo_(lo), hi_(hi), bps_(std::move(bps)),
        slope_lo_(slope_lo), slope_hi_(slope_hi) {
    validate();
  }

  double domain_lo() const { return lo_; }
  double domain_hi() const { return hi_; }
  const std::vector<Breakpoint>& breakpoints() const { return bps_; }
  double slope_lo() const { return slope_lo_; }
  double slope_hi() const { return slope_hi_; }

  // Left-continuous value.
  double value(double x) const {
    const auto& b = bps_;
    if (x < b.front().x)
      return b.front().left - slope_lo_ * (b.front().x - x);
    if (x > b.back().x)
      return b.back().right + slope_hi_ * (x - b.back().x);
    std::size_t i = index_at(x);
    if (x == b[i].x) return b[i].left;
    return chord(i, x);
  }

  // Limit from the right (equals value except at jump points).
  double value_right(double x) const {
    const auto& b = bps_;
    if (x < b.front().x)
      return b.front().left - slope_lo_ * (b.front().x - x);
    if (x >= b.back().x)
      return b.back().right + slope_hi_ * (x - b.back().x);
    std::size_t i = index_at(x);
    if (x == b[i].x) return b[i].right;
    return chord(i, x);
  }

  // Limit from inside the domain at its left end; a -inf sentinel stored at
  // the endpoint itself is skipped (the limit is the right value there).
  double approach_lo() const {
    if (std::isfinite(lo_)) return bps_.front().right;
    return slope_lo_ == 0.0 ? bps_.front().left : -kInf;
  }
  // Limit from inside the domain at its right end.
  double approach_hi() const {
    if (std::isfinite(hi_)) return bps_.back().left;
    return slope_hi_ == 0.0 ? bps_.back().right : kInf;
  }

  bool has_lo_sentinel() const { return std::isinf(bps_.front().left); }
  bool has_hi_sentinel() const { return std::isinf(bps_.back().right); }

  bool continuous(double tol = 0.0) const {
    for (const auto& b : bps_) {
      if (std::isinf(b.left) || std::isinf(b.right)) continue;  // sentinels
      if (b.right - b.left > tol + flat_eps(b.left, b.right)) return false;
    }
    return true;
  }

  std::optional<TailLaw> law_lo, law_hi;

 private:
  double chord(std::size_t i, double x) const {
    const auto& b = bps_;
    const double dx = b[i + 1].x - b[i].x;
    return b[i].right + (x - b[i].x) * (b[i + 1].left - b[i].right) / dx;
  }

  // Index of the last breakpoint with bps_[i].x <= x.
  std::size_t index_at(double x) const {
    auto it = std::upper_bound(
        bps_.begin(), bps_.end(), x,
        [](double a, const Breakpoint& b) { return a < b.x; });
    return static_cast<std::size_t>(it - bps_.begin()) - 1;
  }

  void validate() {
    if (bps_.empty()) throw ArgumentError("MonotoneFunction: no breakpoints");
    if (!(lo_ < hi_)) throw ArgumentError("MonotoneFunction: empty domain");
    for (std::size_t i = 0; i < bps_.size(); ++i) {
      const auto& b = bps_[i];
      if (!std::isfinite(b.x))
        throw ArgumentError("MonotoneFunction: non-finite breakpoint position");
      if (b.x < lo_ || b.x > hi_)
        throw ArgumentError("MonotoneFunction: breakpoint outside domain");
      if (i > 0 && !(bps_[i - 1].x < b.x))
        throw ArgumentError("MonotoneFunction: breakpoints not increasing");
      const bool lo_sentinel = (i == 0 && b.x == lo_ && b.left == -kInf);
      const bool hi_sentinel =
          (i + 1 == bps_.size() && b.x == hi_ && b.right == kInf);
      if (!std::isfinite(b.left) && !lo_sentinel)
        throw ArgumentError("MonotoneFunction: interior infinite value");
      if (!std::isfinite(b.right) && !hi_sentinel)
        throw ArgumentError("MonotoneFunction: interior infinite value");
      if (std::isfinite(b.left) && std::isfinite(b.right) &&
          b.right < b.left - flat_eps(b.left, b.right))
        throw NonMonotoneError("MonotoneFunction: decreasing jump");
      if (i > 0 && std::isfinite(bps_[i - 1].right) && std::isfinite(b.left) &&
          b.left < bps_[i - 1].right - flat_eps(bps_[i - 1].right, b.left))
        throw NonMonotoneError("MonotoneFunction: decreasing chord");
    }
    if (std::isfinite(lo_) && bps_.front().x != lo_)
      throw ArgumentError("MonotoneFunction: missing breakpoint at domain_lo");
    if (std::isfinite(hi_) && bps_.back().x != hi_)
      throw ArgumentError("MonotoneFunction: missing breakpoint at domain_hi");
    if (slope_lo_ < 0 || slope_hi_ < 0 || !std::isfinite(slope_lo_) ||
        !std::isfinite(slope_hi_))
      throw ArgumentError("MonotoneFunction: invalid tail slope");
  }

  double lo_ = -kInf;
  double hi_ = kInf;
  std::vector<Breakpoint> bps_;
  double slope_lo_ = 0.0;
  double slope_hi_ = 0.0;
};

// ---------------------------------------------------------------------------
// Completed-graph polylines (implementation detail of generalized inversion)

namespace detail {

struct Polyline {
  enum class Ray { none, vertical, slope };
  std::vector<Node> v;  // vertices (x, y), non-decreasing in both coordinates
  Ray lo = Ray::none, hi = Ray::none;
  double lo_slope = 0.0, hi_slope = 0.0;
};

inline Polyline to_polyline(const MonotoneFunction& f) {
  Polyline p;
  const auto& bps = f.breakpoints();
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const auto& b = bps[i];
    const bool lo_sentinel = (i == 0 && b.left == -kInf);
    const bool hi_sentinel = (i + 1 == bps.size() && b.right == kInf);
    if (lo_sentinel) {
      p.lo = Polyline::Ray::vertical;
    } else if (p.v.empty() || p.v.back().x != b.x || p.v.back().v != b.left) {
      p.v.push_back({b.x, b.left});
    }
    if (!hi_sentinel) {
      if (p.v.empty() || p.v.back().x != b.x || p.v.back().v != b.right)
        p.v.push_back({b.x, b.right});
    } else {
      p.hi = Polyline::Ray::vertical;
    }
  }
  if (f.domain_lo() == -kInf && p.lo == Polyline::Ray::none) {
    p.lo = Polyline::Ray::slope;
    p.lo_slope = f.slope_lo();
  }
  if (f.domain_hi() == kInf && p.hi == Polyline::Ray::none) {
    p.hi = Polyline::Ray::slope;
    p.hi_slope = f.slope_hi();
  }
  return p;
}

inline Polyline transpose(Polyline p) {
  for (auto& n : p.v) std::swap(n.x, n.v);
  auto flip = [](Polyline::Ray& r, double& s) {
    if (r == Polyline::Ray::vertical) {
      r = Polyline::Ray::slope;
      s = 0.0;
    } else if (r == Polyline::Ray::slope) {
      if (s == 0.0) {
        r = Polyline::Ray::vertical;
      } else {
        s = 1.0 / s;
      }
    }
  };
  flip(p.lo, p.lo_slope);
  flip(p.hi, p.hi_slope);
  return p;
}

// Reads a polyline back as a left-continuous monotone function on the target
// domain. Vertical end rays become single-point infinities; if the polyline
// does not reach a finite target endpoint it is padded with a constant tail.
inline MonotoneFunction monotone_from_polyline(const Polyline& p, double lo,
                                               double hi) {
  std::vector<Breakpoint> bps;
  std::size_t i = 0;
  const std::size_t n = p.v.size();
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && p.v[j + 1].x == p.v[i].x) ++j;
    bps.push_back({p.v[i].x, p.v[i].v, p.v[j].v});
    i = j + 1;
  }
  if (bps.empty()) throw ArgumentError("polyline: no vertices");

  double slope_lo = 0.0, slope_hi = 0.0;
  if (p.lo == Polyline::Ray::vertical) {
    if (bps.front().x != lo)
      throw ArgumentError("polyline: dangling vertical ray");
    bps.front().left = -kInf;
  } else if (p.lo == Polyline::Ray::slope) {
    if (lo != -kInf) throw ArgumentError("polyline: ray on bounded side");
    slope_lo = p.lo_slope;
  } else if (std::isfinite(lo) && bps.front().x != lo) {
    bps.insert(bps.begin(), {lo, bps.front().left, bps.front().left});
  }
  if (p.hi == Polyline::Ray::vertical) {
    if (bps.back().x != hi)
      throw ArgumentError("polyline: dangling vertical ray");
    bps.back().right = kInf;
  } else if (p.hi == Polyline::Ray::slope) {
    if (hi != kInf) throw ArgumentError("polyline: ray on bounded side");
    slope_hi = p.hi_slope;
  } else if (std::isfinite(hi) && bps.back().x != hi) {
    bps.push_back({hi, bps.back().right, bps.back().right});
  }
  return MonotoneFunction(lo, hi, std::move(bps), slope_lo, slope_hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generalized inverses

// chi(eta) = sup { x : f(x) < eta } on the target domain [range_lo, range_hi].
// Jumps of f become flats of chi and flats become jumps. The range of f must
// fill [range_lo, range_hi]; values are snapped to the range ends within
// `snap` to absorb rounding in accumulated masses.
inline MonotoneFunction generalized_inverse(const MonotoneFunction& f,
                                            double range_lo, double range_hi,
                                            double snap = 1e-12) {
  auto p = detail::to_polyline(f);
  for (auto& n : p.v) {
    if (std::isfinite(range_lo) &&
        std::abs(n.v - range_lo) <= snap * std::max(1.0, std::abs(range_lo)))
      n.v = range_lo;
    if (std::isfinite(range_hi) &&
        std::abs(n.v - range_hi) <= snap * std::max(1.0, std::abs(range_hi)))
      n.v = range_hi;
  }
  if (std::isfinite(range_lo) &&
      (p.v.front().v < range_lo ||
       (p.lo == detail::Polyline::Ray::slope && p.lo_slope > 0.0)))
    throw ArgumentError("generalized_inverse: range exceeds target below");
  if (std::isfinite(range_hi) &&
      (p.v.back().v > range_hi ||
       (p.hi == detail::Polyline::Ray::slope && p.hi_slope > 0.0)))
    throw ArgumentError("generalized_inverse: range exceeds target above");
  if (std::isfinite(range_lo) && p.lo != detail::Polyline::Ray::vertical &&
      p.v.front().v != range_lo)
    throw ArgumentError("generalized_inverse: range does not reach target low end");
  if (std::isfinite(range_hi) && p.hi != detail::Polyline::Ray::vertical &&
      p.v.back().v != range_hi)
    throw ArgumentError("generalized_inverse: range does not reach target high end");
  return detail::monotone_from_polyline(detail::transpose(std::move(p)),
                                        range_lo, range_hi);
}

inline MonotoneFunction to_monotone(const PiecewiseLinear& f,
                                    double lo = -kInf, double hi = kInf) {
  if (!f.non_decreasing())
    throw NonMonotoneError("to_monotone: function decreases");
  std::vector<Breakpoint> bps;
  bps.reserve(f.nodes().size());
  for (const auto& n : f.nodes()) bps.push_back({n.x, n.v, n.v});
  if (std::isfinite(lo) && bps.front().x != lo) {
    if (bps.front().x < lo) throw ArgumentError("to_monotone: node below lo");
    bps.insert(bps.begin(),
               {lo, f(lo), f(lo)});
  }
  if (std::isfinite(hi) && bps.back().x != hi) {
    if (bps.back().x > hi) throw ArgumentError("to_monotone: node above hi");
    bps.push_back({hi, f(hi), f(hi)});
  }
  return MonotoneFunction(lo, hi, std::move(bps), f.slope_lo(), f.slope_hi());
}

inline PiecewiseLinear to_piecewise_linear(const MonotoneFunction& f,
                                           double jump_tol = 0.0) {
  std::vector<Node> nodes;
  nodes.reserve(f.breakpoints().size());
  for (const auto& b : f.breakpoints()) {
    double v;
    if (!std::isfinite(b.left)) {
      v = b.right;
    } else if (!std::isfinite(b.right)) {
      v = b.left;
    } else {
      if (b.right - b.left > jump_tol + flat_eps(b.left, b.right))
        throw InvalidStateError("to_piecewise_linear: function has a jump");
      v = b.left;
    }
    nodes.push_back({b.x, v});
  }
  return PiecewiseLinear(std::move(nodes), f.slope_lo(), f.slope_hi());
}

// Exact inverse of a strictly increasing continuous piecewise-linear map.
inline PiecewiseLinear invert_increasing(const PiecewiseLinear& f) {
  const auto& n = f.nodes();
  std::vector<Node> inv;
  inv.reserve(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i > 0 && !(n[i].v > n[i - 1].v))
      throw NonMonotoneError("invert_increasing: not strictly increasing");
    inv.push_back({n[i].v, n[i].x});
  }
  if (f.slope_lo() <= 0.0 || f.slope_hi() <= 0.0)
    throw NonMonotoneError("invert_increasing: non-increasing tail");
  return PiecewiseLinear(std::move(inv), 1.0 / f.slope_lo(),
                         1.0 / f.slope_hi());
}

// ---------------------------------------------------------------------------
// Composition

// Preimage positions of the given values (sorted ascending) under a monotone
// inner map sampled by its rising chords; linear two-pointer sweep.
template <class EvalRight, class EvalLeft>
std::vector<double> preimages_on_chords(const std::vector<double>& values,
                                        const std::vector<double>& xs,
                                        EvalRight right_of, EvalLeft left_of,
                                        double slope_lo, double slope_hi) {
  std::vector<double> out;
  if (xs.empty()) return out;
  const double first_val = left_of(xs.front());
  const double last_val = right_of(xs.back());
  if (std::isfinite(first_val) && slope_lo > 0.0)
    for (double v : values) {
      if (v >= first_val) break;
      out.push_back(xs.front() - (first_val - v) / slope_lo);
    }
  if (std::isfinite(last_val) && slope_hi > 0.0)
    for (auto it = values.rbegin(); it != values.rend() && *it > last_val; ++it)
      out.push_back(xs.back() + (*it - last_val) / slope_hi);
  std::size_t vi = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double a = right_of(xs[i]), b = left_of(xs[i + 1]);
    if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) continue;
    while (vi < values.size() && values[vi] <= a) ++vi;
    for (std::size_t k = vi; k < values.size() && values[k] < b; ++k)
      out.push_back(xs[i] + (values[k] - a) * (xs[i + 1] - xs[i]) / (b - a));
  }
  return out;
}

// f o g for continuous f and continuous monotone g (flats allowed).
inline PiecewiseLinear compose(const PiecewiseLinear& f,
                               const PiecewiseLinear& g) {
  if (!g.non_decreasing())
    throw NonMonotoneError("compose: inner function decreases");
  // Fast path: identity inner map.
  if (g.slope_lo() == 1.0 && g.slope_hi() == 1.0) {
    bool ident = true;
    for (const auto& n : g.nodes())
      if (n.v != n.x) { ident = false; break; }
    if (ident) return f;
  }
  std::vector<double> xs;
  xs.reserve(g.nodes().size());
  for (const auto& n : g.nodes()) xs.push_back(n.x);
  std::vector<double> fvals;
  fvals.reserve(f.nodes().size());
  for (const auto& n : f.nodes()) fvals.push_back(n.x);
  auto ev = [&g](double x) { return g(x); };
  auto pre = preimages_on_chords(fvals, xs, ev, ev, g.slope_lo(), g.slope_hi());
  xs.insert(xs.end(), pre.begin(), pre.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Node> nodes;
  nodes.reserve(xs.size());
  for (double x : xs) nodes.push_back({x, f(g(x))});
  // Preimages of f's kinks were materialized above, so beyond the extreme
  // output nodes the composition follows f's far tails.
  const double slope_lo =
      g.slope_lo() == 0.0 ? 0.0 : g.slope_lo() * f.slope_lo();
  const double slope_hi =
      g.slope_hi() == 0.0 ? 0.0 : g.slope_hi() * f.slope_hi();
  return PiecewiseLinear(std::move(nodes), slope_lo, slope_hi);
}

// f o g for continuous f and monotone g with jumps; jumps of g survive as
// jumps of the composition (used to assemble cumulative functions).
inline MonotoneFunction compose_keep_jumps(const PiecewiseLinear& f,
                                           const MonotoneFunction& g) {
  std::vector<double> xs;
  for (const auto& b : g.breakpoints()) xs.push_back(b.x);
  std::vector<double> fvals;
  for (const auto& n : f.nodes()) fvals.push_back(n.x);
  auto right_of = [&g](double x) { return g.value_right(x); };
  auto left_of = [&g](double x) { return g.value(x); };
  auto pre = preimages_on_chords(fvals, xs, right_of, left_of, g.slope_lo(),
                                 g.slope_hi());
  xs.insert(xs.end(), pre.begin(), pre.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Breakpoint> bps;
  bps.reserve(xs.size());
  for (double x : xs) {
    const double gl = g.value(x), gr = g.value_right(x);
    const double fl = std::isfinite(gl) ? f(gl) : f(gr);
    bps.push_back({x, fl, std::isfinite(gr) ? f(gr) : fl});
  }
  double slope_lo = g.slope_lo() * f.slope_lo();
  double slope_hi = g.slope_hi() * f.slope_hi();
  if (g.slope_lo() == 0.0) slope_lo = 0.0;
  if (g.slope_hi() == 0.0) slope_hi = 0.0;
  return MonotoneFunction(g.domain_lo(), g.domain_hi(), std::move(bps),
                          slope_lo, slope_hi);
}

// f o g for continuous f and monotone g with jumps, requiring f to be
// (nearly) constant across every jump of g so the composition is continuous.
// This realizes evaluation of a velocity through a quantile map: across a
// gap in the support the velocity must be a single well-defined value.
inline PiecewiseLinear compose_through_gaps(const PiecewiseLinear& f,
                                            const MonotoneFunction& g,
                                            double gap_tol,
                                            const char* what = "compose") {
  std::vector<double> xs;
  for (const auto& b : g.breakpoints()) xs.push_back(b.x);
  std::vector<double> fvals;
  for (const auto& n : f.nodes()) fvals.push_back(n.x);
  auto right_of = [&g](double x) { return g.value_right(x); };
  auto left_of = [&g](double x) { return g.value(x); };
  auto pre = preimages_on_chords(fvals, xs, right_of, left_of, g.slope_lo(),
                                 g.slope_hi());
  xs.insert(xs.end(), pre.begin(), pre.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Node> nodes;
  nodes.reserve(xs.size());
  for (double x : xs) {
    const double gl = g.value(x), gr = g.value_right(x);
    double v;
    if (!std::isfinite(gl)) {
      v = f(gr);
    } else if (!std::isfinite(gr)) {
      v = f(gl);
    } else {
      const double a = f(gl), b = f(gr);
      if (std::abs(a - b) > gap_tol)
        throw InvalidStateError(std::string(what) +
                                ": velocity not constant across a gap");
      v = a;
    }
    nodes.push_back({x, v});
  }
  double slope_lo = g.slope_lo() == 0.0 ? 0.0 : g.slope_lo() * f.slope_lo();
  double slope_hi = g.slope_hi() == 0.0 ? 0.0 : g.slope_hi() * f.slope_hi();
  return PiecewiseLinear(std::move(nodes), slope_lo, slope_hi);
}

// ---------------------------------------------------------------------------
// Linear combinations

// sum_i coef_i * f_i + id_coef * x + constant.
inline PiecewiseLinear combine(
    const std::vector<std::pair<double, const PiecewiseLinear*>>& terms,
    double id_coef = 0.0, double constant = 0.0) {
  std::vector<double> xs;
  for (const auto& [c, f] : terms)
    for (const auto& n : f->nodes()) xs.push_back(n.x);
  if (xs.empty()) xs.push_back(0.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Node> nodes;
  nodes.reserve(xs.size());
  for (double x : xs) {
    double v = id_coef * x + constant;
    for (const auto& [c, f] : terms) v += c * (*f)(x);
    nodes.push_back({x, v});
  }
  double slo = id_coef, shi = id_coef;
  for (const auto& [c, f] : terms) {
    slo += c * f->slope_lo();
    shi += c * f->slope_hi();
  }
  return PiecewiseLinear(std::move(nodes), slo, shi);
}

// base + sum_i coef_i * f_i + id_coef * x + constant, keeping base's jumps.
inline MonotoneFunction combine_with_monotone(
    const MonotoneFunction& base,
    const std::vector<std::pair<double, const PiecewiseLinear*>>& terms,
    double id_coef = 0.0, double constant = 0.0) {
  std::vector<double> xs;
  for (const auto& b : base.breakpoints()) xs.push_back(b.x);
  for (const auto& [c, f] : terms)
    for (const auto& n : f->nodes())
      if (n.x >= base.domain_lo() && n.x <= base.domain_hi()) xs.push_back(n.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Breakpoint> bps;
  bps.reserve(xs.size());
  for (double x : xs) {
    double add = id_coef * x + constant;
    for (const auto& [c, f] : terms) add += c * (*f)(x);
    const double l = base.value(x), r = base.value_right(x);
    bps.push_back({x, std::isfinite(l) ? l + add : l,
                   std::isfinite(r) ? r + add : r});
  }
  double slo = base.slope_lo() + id_coef, shi = base.slope_hi() + id_coef;
  for (const auto& [c, f] : terms) {
    slo += c * f->slope_lo();
    shi += c * f->slope_hi();
  }
  return MonotoneFunction(base.domain_lo(), base.domain_hi(), std::move(bps),
                          slo, shi);
}

// f(scale * .): rescales the argument axis exactly on breakpoints.
inline MonotoneFunction rescale_argument(const MonotoneFunction& f,
                                         double scale) {
  if (!(scale > 0)) throw ArgumentError("rescale_argument: scale must be > 0");
  std::vector<Breakpoint> bps = f.breakpoints();
  for (auto& b : bps) b.x /= scale;
  return MonotoneFunction(f.domain_lo() == -kInf ? -kInf : f.domain_lo() / scale,
                          f.domain_hi() == kInf ? kInf : f.domain_hi() / scale,
                          std::move(bps), f.slope_lo() * scale,
                          f.slope_hi() * scale);
}

inline PiecewiseLinear rescale_argument(const PiecewiseLinear& f, double scale) {
  if (!(scale > 0)) throw ArgumentError("rescale_argument: scale must be > 0");
  std::vector<Node> nodes = f.nodes();
  for (auto& n : nodes) n.x /= scale;
  return PiecewiseLinear(std::move(nodes), f.slope_lo() * scale,
                         f.slope_hi() * scale);
}

// ---------------------------------------------------------------------------
// Exact integrals and distances

namespace detail {

inline std::vector<double> merged_positions(const std::vector<double>& a,
                                            const std::vector<double>& b,
                                            double lo, double hi) {
  std::vector<double> xs;
  xs.push_back(lo);
  xs.push_back(hi);
  for (double x : a)
    if (x > lo && x < hi) xs.push_back(x);
  for (double x : b)
    if (x > lo && x < hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

inline std::vector<double> positions(const MonotoneFunction& f) {
  std::vector<double> xs;
  xs.reserve(f.breakpoints().size());
  for (const auto& b : f.breakpoints()) xs.push_back(b.x);
  return xs;
}

inline std::vector<double> positions(const PiecewiseLinear& f) {
  std::vector<double> xs;
  xs.reserve(f.nodes().size());
  for (const auto& n : f.nodes()) xs.push_back(n.x);
  return xs;
}

// integral of |affine| over [a,b] where the affine takes values va, vb.
inline double abs_affine_integral(double a, double b, double va, double vb) {
  const double len = b - a;
  if (va >= 0 && vb >= 0) return 0.5 * (va + vb) * len;
  if (va <= 0 && vb <= 0) return -0.5 * (va + vb) * len;
  const double r = a + len * (-va) / (vb - va);  // sign change
  return 0.5 * (std::abs(va) * (r - a) + std::abs(vb) * (b - r));
}

}  // namespace detail

// Exact integral of f over the finite interval [a, b].
inline double integrate(const MonotoneFunction& f, double a, double b) {
  if (!(a <= b)) throw ArgumentError("integrate: bad interval");
  auto xs = detail::merged_positions(detail::positions(f), {}, a, b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double va = f.value_right(xs[i]);
    const double vb = f.value(xs[i + 1]);
    if (!std::isfinite(va) || !std::isfinite(vb))
      throw NonIntegrableError("integrate: infinite on a set of positive measure");
    total += 0.5 * (va + vb) * (xs[i + 1] - xs[i]);
  }
  return total;
}

// Exact L1 distance between two monotone functions over [lo, hi]. Endpoint
// infinities occupy single points and are ignored; an infinite value over an
// interval of positive length raises NonIntegrableError.
inline double l1_distance(const MonotoneFunction& f, const MonotoneFunction& g,
                          double lo, double hi) {
  auto xs =
      detail::merged_positions(detail::positions(f), detail::positions(g), lo, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double fa = f.value_right(xs[i]), fb = f.value(xs[i + 1]);
    const double ga = g.value_right(xs[i]), gb = g.value(xs[i + 1]);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(ga) ||
        !std::isfinite(gb))
      throw NonIntegrableError(
          "l1_distance: function infinite on a set of positive measure");
    total += detail::abs_affine_integral(xs[i], xs[i + 1], fa - ga, fb - gb);
  }
  return total;
}

// Exact L1 distance between two continuous piecewise-linear functions.
inline double l1_distance(const PiecewiseLinear& f, const PiecewiseLinear& g,
                          double lo, double hi) {
  auto xs =
      detail::merged_positions(detail::positions(f), detail::positions(g), lo, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    total += detail::abs_affine_integral(xs[i], xs[i + 1],
                                         f(xs[i]) - g(xs[i]),
                                         f(xs[i + 1]) - g(xs[i + 1]));
  return total;
}

// Exact sup distance between two continuous piecewise-linear functions on
// [lo, hi]; the difference is piecewise affine, so extrema sit at nodes.
inline double sup_distance(const PiecewiseLinear& f, const PiecewiseLinear& g,
                           double lo, double hi) {
  auto xs =
      detail::merged_positions(detail::positions(f), detail::positions(g), lo, hi);
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(f(x) - g(x)));
  return m;
}

// Largest pointwise discrepancy over merged nodes and midpoints.
inline double max_difference(const PiecewiseLinear& f, const PiecewiseLinear& g,
                             double lo, double hi) {
  auto xs =
      detail::merged_positions(detail::positions(f), detail::positions(g), lo, hi);
  double m = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    m = std::max(m, std::abs(f(xs[i]) - g(xs[i])));
    if (i + 1 < xs.size()) {
      const double mid = 0.5 * (xs[i] + xs[i + 1]);
      m = std::max(m, std::abs(f(mid) - g(mid)));
    }
  }
  return m;
}

// Largest discrepancy of one-sided values over merged breakpoints and
// midpoints; single-point infinite sentinels compare equal to each other.
inline double max_difference(const MonotoneFunction& f,
                             const MonotoneFunction& g, double lo, double hi) {
  auto xs =
      detail::merged_positions(detail::positions(f), detail::positions(g), lo, hi);
  double m = 0.0;
  auto acc = [&m](double a, double b) {
    if (std::isinf(a) && std::isinf(b) && a == b) return;
    m = std::max(m, std::abs(a - b));
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc(f.value(xs[i]), g.value(xs[i]));
    acc(f.value_right(xs[i]), g.value_right(xs[i]));
    if (i + 1 < xs.size()) {
      const double mid = 0.5 * (xs[i] + xs[i + 1]);
      acc(f.value(mid), g.value(mid));
    }
  }
  return m;
}

}  // namespace hsx
