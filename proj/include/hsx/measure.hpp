#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hsx/piecewise.hpp"

// Finite nonnegative Radon measures on the line, their cumulative energy
// functions F(x) = mu((-inf, x)) and the quantile (pseudo-inverse) calculus.

namespace hsx {

struct MassAtom {
  double x;
  double mass;
};

struct DensityPiece {
  double a, b;   // [a, b)
  double value;  // constant density >= 0
};

class RadonMeasure {
 public:
  RadonMeasure() = default;  // the zero measure

  RadonMeasure(std::vector<MassAtom> atoms, std::vector<DensityPiece> density)
      : atoms_(std::move(atoms)), density_(std::move(density)) {
    normalize();
  }

  static RadonMeasure dirac(double x, double mass) {
    return RadonMeasure({{x, mass}}, {});
  }

  static RadonMeasure uniform(double a, double b, double value) {
    return RadonMeasure({}, {{a, b, value}});
  }

  const std::vector<MassAtom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& density() const { return density_; }
  double total_mass() const { return total_; }

  bool is_zero() const { return atoms_.empty() && density_.empty(); }

  RadonMeasure translated(double h) const {
    RadonMeasure m = *this;
    for (auto& a : m.atoms_) a.x += h;
    for (auto& d : m.density_) {
      d.a += h;
      d.b += h;
    }
    return m;
  }

  // Exact cumulative law beyond the represented window, when the measure
  // stands for a sampled closed-form density (integrability checks only).
  std::optional<TailLaw> law_lo, law_hi;

  // Breakpoints of F(x) = mu((-inf, x)); the running sum here defines
  // total_mass() bit-for-bit, so F(+inf) == total_mass() exactly.
  std::vector<Breakpoint> cumulative_breakpoints() const {
    std::vector<Breakpoint> bps;
    if (is_zero()) {
      bps.push_back({0.0, 0.0, 0.0});
      return bps;
    }
    std::vector<double> xs;
    for (const auto& a : atoms_) xs.push_back(a.x);
    for (const auto& d : density_) {
      xs.push_back(d.a);
      xs.push_back(d.b);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    bps.reserve(xs.size());
    double running = 0.0;
    std::size_t ai = 0, di = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const double before = running;
      while (ai < atoms_.size() && atoms_[ai].x <= x)
        running += atoms_[ai++].mass;
      bps.push_back({x, before, running});
      if (i + 1 < xs.size()) {
        while (di < density_.size() && density_[di].b <= x) ++di;
        if (di < density_.size() && density_[di].a <= x &&
            density_[di].b >= xs[i + 1])
          running += density_[di].value * (xs[i + 1] - x);
      }
    }
    return bps;
  }

 private:
  void normalize() {
    for (const auto& a : atoms_)
      if (!std::isfinite(a.x) || !std::isfinite(a.mass) || a.mass < 0)
        throw ArgumentError("RadonMeasure: bad atom");
    for (const auto& d : density_)
      if (!std::isfinite(d.a) || !std::isfinite(d.b) || !(d.a < d.b) ||
          !std::isfinite(d.value) || d.value < 0)
        throw ArgumentError("RadonMeasure: bad density piece");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const MassAtom& a, const MassAtom& b) { return a.x < b.x; });
    std::vector<MassAtom> merged;
    for (const auto& a : atoms_) {
      if (a.mass == 0) continue;
      if (!merged.empty() &&
          a.x - merged.back().x <=
              kAtomMergeTol * std::max(1.0, std::abs(a.x))) {
        merged.back().mass += a.mass;
      } else {
        merged.push_back(a);
      }
    }
    atoms_ = std::move(merged);
    std::sort(density_.begin(), density_.end(),
              [](const DensityPiece& a, const DensityPiece& b) {
                return a.a < b.a;
              });
    std::vector<DensityPiece> kept;
    for (const auto& d : density_) {
      if (d.value == 0) continue;
      if (!kept.empty() && d.a < kept.back().b - kAtomMergeTol)
        throw ArgumentError("RadonMeasure: overlapping density pieces");
      kept.push_back(d);
    }
    density_ = std::move(kept);
    total_ = cumulative_breakpoints().back().right;
  }

  std::vector<MassAtom> atoms_;
  std::vector<DensityPiece> density_;
  double total_ = 0.0;
};

// F(x) = mu((-inf, x)); left-continuous, 0 at -inf, total mass at +inf.
// Atoms become jumps, density pieces become affine rises, gaps become flats.
inline MonotoneFunction cumulative(const RadonMeasure& mu) {
  MonotoneFunction f(-kInf, kInf, mu.cumulative_breakpoints());
  f.law_lo = mu.law_lo;
  f.law_hi = mu.law_hi;
  return f;
}

// Inverse of `cumulative`: jumps back to atoms, rises back to constant
// densities. Requires constant tails (a cumulative function of a finite
// measure is eventually constant on both sides).
inline RadonMeasure measure_from_cumulative(const MonotoneFunction& F) {
  if (F.slope_lo() != 0.0 || F.slope_hi() != 0.0)
    throw ArgumentError("measure_from_cumulative: non-constant tail");
  std::vector<MassAtom> atoms;
  std::vector<DensityPiece> density;
  const auto& bps = F.breakpoints();
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const auto& b = bps[i];
    if (std::isfinite(b.left) && std::isfinite(b.right)) {
      const double jump = b.right - b.left;
      if (jump > flat_eps(b.left, b.right)) atoms.push_back({b.x, jump});
    }
    if (i + 1 < bps.size()) {
      const double va = b.right, vb = bps[i + 1].left;
      if (std::isfinite(va) && std::isfinite(vb)) {
        const double rise = vb - va;
        if (rise > flat_eps(va, vb))
          density.push_back({b.x, bps[i + 1].x, rise / (bps[i + 1].x - b.x)});
      }
    }
  }
  return RadonMeasure(std::move(atoms), std::move(density));
}

// chi(eta) = sup { x : F(x) < eta } on [0, C]. chi(0) is stored as -inf (a
// single-point sentinel); jumps of F map to flats of chi and vice versa.
inline MonotoneFunction pseudo_inverse(const MonotoneFunction& F, double C) {
  if (!(C > 0)) throw ArgumentError("pseudo_inverse: total mass must be > 0");
  return generalized_inverse(F, 0.0, C);
}

// F(x) = Leb{ eta in (0,C) : chi(eta) < x }; flats of chi of length m become
// jumps of F of height m (atoms of the reconstructed measure).
inline MonotoneFunction inverse_to_cumulative(const MonotoneFunction& chi,
                                              double C) {
  if (!(C > 0)) throw ArgumentError("inverse_to_cumulative: bad total mass");
  if (chi.domain_lo() != 0.0 || chi.domain_hi() != C)
    throw ArgumentError("inverse_to_cumulative: domain is not [0, C]");
  return generalized_inverse(chi, -kInf, kInf);
}

// L1 distance of two quantile functions defined on the same interval [0, C].
inline double l1_distance(const MonotoneFunction& chi1,
                          const MonotoneFunction& chi2) {
  const double c1 = chi1.domain_hi(), c2 = chi2.domain_hi();
  if (chi1.domain_lo() != chi2.domain_lo() ||
      std::abs(c1 - c2) > 1e-12 * std::max({1.0, c1, c2}))
    throw ArgumentError("l1_distance: functions live on different intervals");
  return l1_distance(chi1, chi2, chi1.domain_lo(), std::min(c1, c2));
}

namespace detail {

// Integrates a nonnegative decaying integrand over [start, +inf) (mirrored
// for the lower tail) on doubling windows. Divergence is detected as a lack
// of geometric decay of the window contributions: probing ever larger x is
// useless once the integrand falls below double-precision resolution (e.g.
// pi/2 - atan(x) reads as zero past x ~ 1e16).
inline bool tail_integral_converges(const std::function<double(double)>& f,
                                    double start, bool toward_plus_inf) {
  const int panels = 64;
  double window = std::max(1.0, std::abs(start));
  double a = start;
  double total = 0.0;
  double first = -1.0;
  for (int k = 0; k < 40; ++k) {
    const double b = toward_plus_inf ? a + window : a - window;
    const double h = (b - a) / panels;
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < panels; ++i) sum += f(a + h * i);
    const double contribution = std::abs(sum * h);
    total += contribution;
    if (contribution <= 1e-13 * std::max(1.0, total)) return true;
    if (first < 0) first = contribution;
    if (k == 12 && contribution > 0.25 * first) return false;
    a = b;
    window *= 2.0;
  }
  return false;
}

}  // namespace detail

// True iff  int_{-inf}^{0} F dx  and  int_{0}^{inf} (C - F) dx  are both
// finite; equivalently the quantile function of F is absolutely integrable.
// Piecewise representations with constant tails are always integrable; a
// sampled measure carrying exact tail laws is probed by quadrature on
// doubling windows.
inline bool check_integrability(const MonotoneFunction& F, double C) {
  if (F.domain_lo() == -kInf) {
    const double lo_level = F.slope_lo() == 0.0 ? F.breakpoints().front().left
                                                : kInf;
    if (!(lo_level <= 0.0 || lo_level <= 1e-12 * std::max(1.0, C))) return false;
  }
  if (F.domain_hi() == kInf) {
    const double hi_level =
        F.slope_hi() == 0.0 ? F.breakpoints().back().right : -kInf;
    if (!(C - hi_level <= 1e-12 * std::max(1.0, C))) return false;
  }
  if (F.law_lo) {
    const double start = F.breakpoints().front().x;
    if (!detail::tail_integral_converges(
            [&](double x) { return std::max(0.0, F.law_lo->cumulative(x)); },
            start, false))
      return false;
  }
  if (F.law_hi) {
    const double start = F.breakpoints().back().x;
    if (!detail::tail_integral_converges(
            [&](double x) {
              return std::max(0.0, C - F.law_hi->cumulative(x));
            },
            start, true))
      return false;
  }
  return true;
}

// Functional equality of two measures: atoms matched pairwise and cumulative
// functions compared on the merged grid.
inline double measure_difference(const RadonMeasure& a, const RadonMeasure& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  double m = 0.0;
  if (a.atoms().size() != b.atoms().size()) {
    m = kInf;
  } else {
    for (std::size_t i = 0; i < a.atoms().size(); ++i) {
      m = std::max(m, std::abs(a.atoms()[i].x - b.atoms()[i].x));
      m = std::max(m, std::abs(a.atoms()[i].mass - b.atoms()[i].mass));
    }
  }
  if (std::isinf(m)) return m;
  const auto Fa = cumulative(a), Fb = cumulative(b);
  const double lo =
      std::min(Fa.breakpoints().front().x, Fb.breakpoints().front().x) - 1.0;
  const double hi =
      std::max(Fa.breakpoints().back().x, Fb.breakpoints().back().x) + 1.0;
  return std::max(m, max_difference(Fa, Fb, lo, hi));
}

}  // namespace hsx
