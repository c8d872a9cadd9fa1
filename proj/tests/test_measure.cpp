#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hsx/measure.hpp"
#include "support/generators.hpp"

using namespace hsx;

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

TEST_CASE("cumulative of a Dirac mass", "[measure]") {
  const auto F = cumulative(RadonMeasure::dirac(0.0, 1.0));
  CHECK(F.value(-5.0) == 0.0);
  CHECK(F.value(0.0) == 0.0);  // open interval: the atom does not count yet
  CHECK(F.value_right(0.0) == 1.0);
  CHECK(F.value(0.25) == 1.0);
  CHECK(F.value(7.0) == 1.0);
}

TEST_CASE("cumulative of the zero measure", "[measure]") {
  const auto F = cumulative(RadonMeasure{});
  CHECK(F.value(-3.0) == 0.0);
  CHECK(F.value(11.0) == 0.0);
}

TEST_CASE("cumulative of the unit density on [0,1]", "[measure]") {
  const auto F = cumulative(RadonMeasure::uniform(0.0, 1.0, 1.0));
  for (double x : {-1.0, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0})
    CHECK(F.value(x) == Catch::Approx(clamp01(x)).margin(0.0));
}

TEST_CASE("pseudo inverse of a Dirac cumulative", "[measure]") {
  const double alpha = 1.5;
  const auto F = cumulative(RadonMeasure::dirac(0.0, alpha));
  const auto chi = pseudo_inverse(F, alpha);
  CHECK(chi.value(0.0) == -kInf);
  CHECK(chi.value_right(0.0) == 0.0);
  CHECK(chi.value(0.3) == 0.0);
  CHECK(chi.value(alpha) == 0.0);
}

TEST_CASE("pseudo inverse of the ramp cumulative", "[measure]") {
  const auto F = cumulative(RadonMeasure::uniform(0.0, 1.0, 1.0));
  const auto chi = pseudo_inverse(F, 1.0);
  CHECK(chi.value(0.0) == -kInf);
  for (double eta : {1e-9, 0.25, 0.5, 0.99, 1.0})
    CHECK(chi.value(eta) == Catch::Approx(eta).margin(1e-15));
}

TEST_CASE("pseudo inverse rejects range mismatch", "[measure]") {
  const auto F = cumulative(RadonMeasure::dirac(0.0, 2.0));
  CHECK_THROWS_AS(pseudo_inverse(F, 1.0), ArgumentError);   // range exceeds C
  CHECK_THROWS_AS(pseudo_inverse(F, 3.0), ArgumentError);   // range deficit
}

TEST_CASE("inverse_to_cumulative of a constant quantile is an atom",
          "[measure]") {
  // chi == 0 on (0, alpha]  ->  alpha * delta_0
  const double alpha = 0.75;
  const MonotoneFunction chi(0.0, alpha,
                             {{0.0, -kInf, 0.0}, {alpha, 0.0, 0.0}});
  const auto F = inverse_to_cumulative(chi, alpha);
  const auto mu = measure_from_cumulative(F);
  REQUIRE(mu.atoms().size() == 1);
  CHECK(mu.atoms()[0].x == 0.0);
  CHECK(mu.atoms()[0].mass == Catch::Approx(alpha).margin(1e-15));
  CHECK(mu.density().empty());
}

TEST_CASE("inverse_to_cumulative of the identity quantile", "[measure]") {
  const MonotoneFunction chi(0.0, 1.0, {{0.0, -kInf, 0.0}, {1.0, 1.0, 1.0}});
  const auto F = inverse_to_cumulative(chi, 1.0);
  for (double x : {-1.0, 0.0, 0.3, 0.9, 1.0, 4.0})
    CHECK(F.value(x) == Catch::Approx(clamp01(x)).margin(0.0));
}

TEST_CASE("duality round trip is exact on random measures", "[measure]") {
  std::mt19937_64 rng(20240514);
  for (int it = 0; it < 60; ++it) {
    const auto mu = testgen::random_measure(rng);
    const double C = mu.total_mass();
    const auto F = cumulative(mu);
    const auto chi = pseudo_inverse(F, C);
    const auto F2 = inverse_to_cumulative(chi, C);
    const double lo = F.breakpoints().front().x - 1.0;
    const double hi = F.breakpoints().back().x + 1.0;
    CHECK(max_difference(F, F2, lo, hi) == 0.0);  // vertex-exact
    const auto mu2 = measure_from_cumulative(F2);
    CHECK(std::abs(mu2.total_mass() - C) <= 1e-12 * std::max(1.0, C));
  }
}

TEST_CASE("monotone output everywhere", "[measure]") {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 40; ++it) {
    const auto mu = testgen::random_measure(rng);
    const auto F = cumulative(mu);
    const auto chi = pseudo_inverse(F, mu.total_mass());
    const auto& b = chi.breakpoints();
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      if (std::isfinite(b[i].right) && std::isfinite(b[i + 1].left))
        CHECK(b[i].right <= b[i + 1].left + 1e-12);
    }
  }
}

TEST_CASE("l1 distance on basic pairs", "[measure]") {
  const MonotoneFunction zero(0.0, 1.0, {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}});
  const MonotoneFunction one(0.0, 1.0, {{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}});
  const MonotoneFunction up(0.0, 1.0, {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
  CHECK(l1_distance(zero, zero) == 0.0);
  // unit-mass delta at 0 vs delta at 1: quantiles 0 and 1
  CHECK(l1_distance(zero, one) == Catch::Approx(1.0).margin(1e-15));
  CHECK(l1_distance(up, up) == 0.0);
  // int_0^1 |eta - (-eta)| d eta = 1 (general piecewise-linear overload)
  const PiecewiseLinear eta({{0.0, 0.0}, {1.0, 1.0}});
  const PiecewiseLinear minus_eta({{0.0, 0.0}, {1.0, -1.0}});
  CHECK(l1_distance(eta, minus_eta, 0.0, 1.0) ==
        Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("l1 distance splits at sign changes", "[measure]") {
  // f = eta, g = 1 - eta cross at 1/2: int |2 eta - 1| = 1/2
  const MonotoneFunction f(0.0, 1.0, {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
  const MonotoneFunction g(0.0, 1.0, {{0.0, 1.0, 1.0}, {1.0, 1.0, 1.0}});
  // g is constant 1; |eta - 1| integrates to 1/2
  CHECK(l1_distance(f, g) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("l1 distance is a metric on random triples", "[measure][property]") {
  std::mt19937_64 rng(991);
  for (int it = 0; it < 40; ++it) {
    const double C = testgen::uniform(rng, 0.5, 3.0);
    const auto m1 = testgen::random_measure_with_mass(rng, C);
    const auto m2 = testgen::random_measure_with_mass(rng, C);
    const auto m3 = testgen::random_measure_with_mass(rng, C);
    const auto c1 = pseudo_inverse(cumulative(m1), C);
    const auto c2 = pseudo_inverse(cumulative(m2), C);
    const auto c3 = pseudo_inverse(cumulative(m3), C);
    const double d12 = l1_distance(c1, c2);
    const double d21 = l1_distance(c2, c1);
    const double d13 = l1_distance(c1, c3);
    const double d32 = l1_distance(c3, c2);
    CHECK(d12 == d21);                     // symmetry is exact
    CHECK(d12 <= d13 + d32 + 1e-12);       // triangle inequality
    CHECK(l1_distance(c1, c1) == 0.0);
  }
}

TEST_CASE("check_integrability on compact support", "[measure]") {
  const auto F = cumulative(RadonMeasure::dirac(0.0, 1.0));
  CHECK(check_integrability(F, 1.0));
}

TEST_CASE("check_integrability consults exact tail laws", "[measure]") {
  const double sqrt_pi = std::sqrt(M_PI);
  // Gaussian energy: F(x) = sqrt(pi)/2 (1 + erf x); the upper tail integral
  // int_0^inf (C - F) = sqrt(pi)/2 int_0^inf erfc = 1/2, finite.
  RadonMeasure gauss({}, {{-1.0, 1.0, 1.0}});  // window stand-in
  gauss.law_lo = TailLaw{[=](double x) { return sqrt_pi / 2 * (1 + std::erf(x)); }};
  gauss.law_hi = gauss.law_lo;
  auto Fg = cumulative(gauss);
  // Make the window mass irrelevant: only the laws matter here.
  CHECK(check_integrability(Fg, sqrt_pi));

  // Cauchy-type energy: F(x) = arctan(x) + pi/2; C - F ~ 1/x, divergent.
  RadonMeasure cauchy({}, {{-1.0, 1.0, 1.0}});
  cauchy.law_lo = TailLaw{[](double x) { return std::atan(x) + M_PI / 2; }};
  cauchy.law_hi = cauchy.law_lo;
  auto Fc = cumulative(cauchy);
  CHECK_FALSE(check_integrability(Fc, M_PI));
}

TEST_CASE("quadrature oracle agrees with the tail classification",
          "[measure][oracle]") {
  // Independent oracle: trapezoid integral of C - F over [1, L]; the Gaussian
  // tail stabilizes, the Cauchy tail keeps growing like log L.
  auto tail_mass = [](auto F, double C, double L, int n) {
    const double h = (L - 1.0) / n;
    double s = 0.5 * ((C - F(1.0)) + (C - F(L)));
    for (int i = 1; i < n; ++i) s += C - F(1.0 + h * i);
    return s * h;
  };
  const double sqrt_pi = std::sqrt(M_PI);
  auto Fg = [=](double x) { return sqrt_pi / 2 * (1 + std::erf(x)); };
  auto Fc = [](double x) { return std::atan(x) + M_PI / 2; };
  // Gaussian: the tail mass has the closed value 1/2 and stops growing.
  const double g1 = tail_mass(Fg, sqrt_pi, 50.0, 400000);
  const double g2 = tail_mass(Fg, sqrt_pi, 100.0, 800000);
  CHECK(std::abs(g2 - g1) < 1e-9);
  // closed value of int_1^inf (C - F): e^{-1}/2 - sqrt(pi)/2 * erfc(1)
  const double closed = std::exp(-1.0) / 2 - sqrt_pi / 2 * std::erfc(1.0);
  CHECK(g1 == Catch::Approx(closed).epsilon(1e-6));
  // Cauchy-type: windows keep contributing ~ log L.
  const double c3 = tail_mass(Fc, M_PI, 1e3, 200000);
  const double c6 = tail_mass(Fc, M_PI, 4e3, 800000);
  CHECK(c6 - c3 > 1.0);
}

TEST_CASE("atoms within the merge tolerance collapse", "[measure]") {
  RadonMeasure m({{0.0, 1.0}, {5e-15, 2.0}}, {});
  REQUIRE(m.atoms().size() == 1);
  CHECK(m.atoms()[0].mass == Catch::Approx(3.0).margin(0.0));
  CHECK(m.total_mass() == Catch::Approx(3.0).margin(0.0));
}

TEST_CASE("reconstructed total mass equals C", "[measure][property]") {
  std::mt19937_64 rng(4242);
  for (int it = 0; it < 50; ++it) {
    const auto mu = testgen::random_measure(rng);
    const double C = mu.total_mass();
    const auto chi = pseudo_inverse(cumulative(mu), C);
    const auto mu2 = measure_from_cumulative(inverse_to_cumulative(chi, C));
    CHECK(std::abs(mu2.total_mass() - C) <= 1e-12 * std::max(1.0, C));
  }
}
