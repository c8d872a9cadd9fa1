#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "hsx/metric.hpp"
#include "hsx/scenarios.hpp"

// Serialization to JSON records and CSV rows. Infinities are encoded as the
// strings "inf" / "-inf"; floats print with 17 significant digits so round
// trips are lossless.

namespace hsx {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline nlohmann::json encode_real(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

inline double decode_real(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ArgumentError("decode_real: bad value '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace detail

// --------------------------------------------------------------------------
// MonotoneFunction <-> {"breakpoints":[[x,left,right],...],
//                       "tail_lo":..,"tail_hi":..,"domain":[lo,hi]}

inline nlohmann::json to_json(const MonotoneFunction& f) {
  nlohmann::json bps = nlohmann::json::array();
  for (const auto& b : f.breakpoints())
    bps.push_back({b.x, detail::encode_real(b.left), detail::encode_real(b.right)});
  const double tail_lo =
      f.slope_lo() == 0.0 ? f.breakpoints().front().left : -kInf;
  const double tail_hi =
      f.slope_hi() == 0.0 ? f.breakpoints().back().right : kInf;
  return {{"breakpoints", bps},
          {"tail_lo", detail::encode_real(tail_lo)},
          {"tail_hi", detail::encode_real(tail_hi)},
          {"domain", {detail::encode_real(f.domain_lo()),
                      detail::encode_real(f.domain_hi())}}};
}

inline MonotoneFunction monotone_from_json(const nlohmann::json& j) {
  std::vector<Breakpoint> bps;
  for (const auto& row : j.at("breakpoints"))
    bps.push_back({row.at(0).get<double>(), detail::decode_real(row.at(1)),
                   detail::decode_real(row.at(2))});
  double lo = -kInf, hi = kInf;
  if (j.contains("domain")) {
    lo = detail::decode_real(j["domain"].at(0));
    hi = detail::decode_real(j["domain"].at(1));
  }
  return MonotoneFunction(lo, hi, std::move(bps));
}

// --------------------------------------------------------------------------
// RadonMeasure <-> {"atoms":[[x,m],...],"density":[[a,b,v],...]}

inline nlohmann::json to_json(const RadonMeasure& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({a.x, a.mass});
  nlohmann::json density = nlohmann::json::array();
  for (const auto& d : mu.density()) density.push_back({d.a, d.b, d.value});
  return {{"atoms", atoms}, {"density", density}};
}

inline RadonMeasure measure_from_json(const nlohmann::json& j) {
  std::vector<MassAtom> atoms;
  for (const auto& row : j.at("atoms"))
    atoms.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
  std::vector<DensityPiece> density;
  for (const auto& row : j.at("density"))
    density.push_back({row.at(0).get<double>(), row.at(1).get<double>(),
                       row.at(2).get<double>()});
  return RadonMeasure(std::move(atoms), std::move(density));
}

// --------------------------------------------------------------------------
// Velocity piece tables: [[a, b, kind, slope, intercept], ...] where the
// affine piece is u(x) = intercept + slope * x on [a, b).

inline nlohmann::json u_pieces_json(const PiecewiseLinear& u) {
  nlohmann::json pieces = nlohmann::json::array();
  const auto& n = u.nodes();
  auto piece = [](double a, double b, double slope, double anchor_x,
                  double anchor_v) {
    return nlohmann::json{detail::encode_real(a), detail::encode_real(b),
                          "affine", slope, anchor_v - slope * anchor_x};
  };
  pieces.push_back(piece(-kInf, n.front().x, u.slope_lo(), n.front().x,
                         n.front().v));
  for (std::size_t i = 0; i + 1 < n.size(); ++i) {
    const double s = (n[i + 1].v - n[i].v) / (n[i + 1].x - n[i].x);
    pieces.push_back(piece(n[i].x, n[i + 1].x, s, n[i].x, n[i].v));
  }
  pieces.push_back(piece(n.back().x, kInf, u.slope_hi(), n.back().x,
                         n.back().v));
  return pieces;
}

inline nlohmann::json to_json(const EulerianState& s) {
  return {{"u_pieces", u_pieces_json(s.u)},
          {"mu", to_json(s.mu)},
          {"energy", s.energy}};
}

// --------------------------------------------------------------------------
// Lagrangian piece tables:
// [[xi_a, xi_b, [y0, y1], [U0, U1], [H0, H1]], ...] with f = f0 + f1 * xi.

inline nlohmann::json to_json(const LagrangianState& X) {
  nlohmann::json pieces = nlohmann::json::array();
  const auto xs = X.xi_grid();
  auto affine = [](const PiecewiseLinear& f, double probe) {
    const double s = f.slope_right(probe);
    return nlohmann::json{f(probe) - s * probe, s};
  };
  auto emit = [&](double a, double b, double probe) {
    pieces.push_back({detail::encode_real(a), detail::encode_real(b),
                      affine(X.y, probe), affine(X.U, probe),
                      affine(X.H, probe)});
  };
  emit(-kInf, xs.front(), xs.front() - 1.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    emit(xs[i], xs[i + 1], 0.5 * (xs[i] + xs[i + 1]));
  emit(xs.back(), kInf, xs.back() + 1.0);
  return {{"pieces", pieces}, {"energy", X.energy}, {"in_F0", X.in_F0}};
}

// --------------------------------------------------------------------------
// Metric reports

inline nlohmann::json to_json(const MetricReport& r) {
  return {{"t", r.t},
          {"d", r.d_value},
          {"bound_factor", r.bound_factor},
          {"d0", r.d0_value},
          {"satisfied", r.satisfied},
          {"components",
           {{"uinf", r.components.uinf},
            {"chi_l1", r.components.chi_l1},
            {"mass", r.components.mass}}}};
}

inline std::string metric_csv_header() {
  return "t,d,bound_factor,d0,satisfied,uinf,chi_l1,mass";
}

inline std::string metric_csv_row(const MetricReport& r) {
  return fmt17(r.t) + "," + fmt17(r.d_value) + "," + fmt17(r.bound_factor) +
         "," + fmt17(r.d0_value) + "," + (r.satisfied ? "1" : "0") + "," +
         fmt17(r.components.uinf) + "," + fmt17(r.components.chi_l1) + "," +
         fmt17(r.components.mass);
}

// Surface rows: header `t,eta,chi,U`, floats with 17 significant digits.
inline std::string surface_csv_header() { return "t,eta,chi,U"; }

inline std::string surface_csv_row(const SurfaceRow& r) {
  return fmt17(r.t) + "," + fmt17(r.eta) + "," + fmt17(r.chi) + "," +
         fmt17(r.U);
}

}  // namespace hsx
