#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hsx/metric.hpp"
#include "hsx/scenarios.hpp"
#include "support/generators.hpp"

using namespace hsx;

namespace {

EulerianState dirac_state(double alpha) {
  return EulerianState(PiecewiseLinear::constant(0.0),
                       RadonMeasure::dirac(0.0, alpha));
}

EulerianState wavebreak_state() {
  PiecewiseLinear u({{0.0, 0.0}, {1.0, -1.0}});
  return EulerianState(u, RadonMeasure::uniform(0.0, 1.0, 1.0));
}

EulerianState atom_state(std::mt19937_64& rng) {
  std::vector<MassAtom> atoms;
  const int n = testgen::uniform_int(rng, 1, 5);
  for (int i = 0; i < n; ++i)
    atoms.push_back({testgen::uniform(rng, -2.0, 2.0),
                     testgen::uniform(rng, 0.1, 1.5)});
  return EulerianState(PiecewiseLinear::constant(0.0),
                       RadonMeasure(std::move(atoms), {}));
}

}  // namespace

TEST_CASE("wasserstein basics", "[metric]") {
  const auto d0 = RadonMeasure::dirac(0.0, 1.0);
  const auto d1 = RadonMeasure::dirac(1.0, 1.0);
  CHECK(wasserstein(d0, d0) == 0.0);
  CHECK(wasserstein(d0, d1) == Catch::Approx(1.0).margin(1e-15));
  // uniform on [0,1] vs its barycenter: int_0^1 |eta - 1/2| = 1/4
  CHECK(wasserstein(RadonMeasure::uniform(0.0, 1.0, 1.0),
                    RadonMeasure::dirac(0.5, 1.0)) ==
        Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("wasserstein signals mass mismatch", "[metric]") {
  CHECK_THROWS_AS(
      wasserstein(RadonMeasure::dirac(0.0, 1.0), RadonMeasure::dirac(0.0, 2.0)),
      MassMismatchError);
}

TEST_CASE("wasserstein signals divergent tails", "[metric]") {
  // total mass pi, matching the arctan cumulative law
  RadonMeasure cauchy({}, {{-1.0, 1.0, M_PI / 2}});
  cauchy.law_hi = TailLaw{[](double x) { return std::atan(x) + M_PI / 2; }};
  RadonMeasure other({}, {{-1.0, 1.0, M_PI / 2}});
  CHECK_THROWS_AS(wasserstein(cauchy, other), NonIntegrableError);
}

TEST_CASE("fixed-mass distance on the translated Dirac pair", "[metric]") {
  const auto a = dirac_state(1.0);
  const auto b = a.translated(1.0);  // (0, delta_1)
  const auto ta = init_transport(a), tb = init_transport(b);
  CHECK(distance_fixed_mass(ta, ta) == 0.0);
  CHECK(distance_fixed_mass(ta, tb) == Catch::Approx(1.0).margin(1e-15));
  // the velocity parts stay equal, so d(t) = ||chi offset||_1 = 1 for all t
  for (double t : {0.5, 1.0, 2.0, 5.0})
    CHECK(distance_fixed_mass(evolve(ta, t), evolve(tb, t)) ==
          Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("fixed-mass distance grows at most like (1 + C t)",
          "[metric][property]") {
  std::mt19937_64 rng(314);
  for (int it = 0; it < 25; ++it) {
    const double mass = testgen::uniform(rng, 0.3, 2.0);
    const auto m1 = testgen::random_measure_with_mass(rng, mass);
    const auto m2 = testgen::random_measure_with_mass(rng, mass);
    const EulerianState s1(PiecewiseLinear::constant(0.0),
                           RadonMeasure(m1.atoms(), {}));
    const EulerianState s2(PiecewiseLinear::constant(0.0),
                           RadonMeasure(m2.atoms(), {}));
    if (s1.mu.is_zero() || s2.mu.is_zero()) continue;
    const double C = s1.energy;
    if (std::abs(C - s2.energy) > 1e-12) continue;  // atoms only, same mass?
    const auto a0 = init_transport(s1), b0 = init_transport(s2);
    const double d0 = distance_fixed_mass(a0, b0);
    for (double t : {0.5, 1.0, 2.0}) {
      const double dt = distance_fixed_mass(evolve(a0, t), evolve(b0, t));
      CHECK(dt <= (1 + C * t) * d0 + 1e-9);
    }
  }
}

TEST_CASE("rescaled distance of two Dirac masses", "[metric]") {
  const double a1 = 1.0, a2 = 2.0;
  const auto r0 = distance(dirac_state(a1), dirac_state(a2), 0.0);
  CHECK(r0.d_value == Catch::Approx(std::abs(a1 - a2)).margin(1e-15));
  CHECK(r0.components.uinf == 0.0);
  CHECK(r0.components.chi_l1 == 0.0);
  CHECK(r0.components.mass == Catch::Approx(1.0).margin(0.0));
  CHECK(r0.satisfied);

  // frozen closed form: d(t) = |a1 - a2| (1 + t/4 + t^2/16)
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto r = distance(dirac_state(a1), dirac_state(a2), t);
    CHECK(r.d_value ==
          Catch::Approx(std::abs(a1 - a2) * (1 + t / 4 + t * t / 16))
              .margin(1e-12));
    CHECK(r.satisfied);  // 1 + t/4 + t^2/16 <= 1 + t + t^2/8
    CHECK(r.d_value == Catch::Approx(r.components.uinf + r.components.chi_l1 +
                                     r.components.mass)
                           .margin(1e-12));
  }
}

TEST_CASE("distance vanishes on identical states at every time", "[metric]") {
  for (double t : {0.0, 1.0, 5.0}) {
    const auto r = distance(wavebreak_state(), wavebreak_state(), t);
    CHECK(r.d_value == 0.0);
    CHECK(r.satisfied);
  }
}

TEST_CASE("translate pairs have pure quantile offset at t = 0", "[metric]") {
  const double h = 0.1;
  const auto r = distance(wavebreak_state(), wavebreak_state().translated(h), 0.0);
  CHECK(r.components.uinf <= 1e-15);
  CHECK(r.components.mass == 0.0);
  CHECK(r.d_value == Catch::Approx(h).margin(1e-14));
}

TEST_CASE("verify_lipschitz on the Dirac pair and a translate pair",
          "[metric]") {
  const auto reports =
      verify_lipschitz(dirac_state(1.0), dirac_state(2.0), {0.0, 1.0, 2.0, 4.0});
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) CHECK(r.satisfied);
  CHECK(reports[0].d_value == Catch::Approx(1.0).margin(1e-15));

  const auto tr = verify_lipschitz(wavebreak_state(),
                                   wavebreak_state().translated(0.1),
                                   {0.0, 1.0, 2.0, 3.0});
  for (const auto& r : tr) CHECK(r.satisfied);
  CHECK(tr[0].d_value == Catch::Approx(0.1).margin(1e-14));
}

TEST_CASE("distance enforces the integrability gate", "[metric]") {
  auto bad = dirac_state(1.0);
  RadonMeasure mu({}, {{-1.0, 1.0, M_PI / 2}});
  mu.law_hi = TailLaw{[](double x) { return std::atan(x) + M_PI / 2; }};
  EulerianState cauchy(PiecewiseLinear::constant(0.0), mu);
  CHECK_THROWS_AS(distance(cauchy, bad, 0.0), NonIntegrableError);
  CHECK_THROWS_AS(distance(bad, cauchy, 0.0), NonIntegrableError);
  CHECK_THROWS_AS(distance(bad, bad, -1.0), ArgumentError);
}

TEST_CASE("metric axioms on random atom mixtures", "[metric][property]") {
  std::mt19937_64 rng(2718);
  for (int it = 0; it < 30; ++it) {
    const auto s1 = atom_state(rng);
    const auto s2 = atom_state(rng);
    const auto s3 = atom_state(rng);
    const double t = testgen::uniform(rng, 0.0, 3.0);
    const double d12 = distance(s1, s2, t).d_value;
    const double d21 = distance(s2, s1, t).d_value;
    const double d13 = distance(s1, s3, t).d_value;
    const double d32 = distance(s3, s2, t).d_value;
    CHECK(d12 == d21);  // exact symmetry
    CHECK(d12 <= d13 + d32 + 1e-12);
    CHECK(distance(s1, s1, t).d_value == 0.0);
  }
}

TEST_CASE("zero distance pins both energies and functions", "[metric]") {
  // d = 0 forces C1 = C2; compare a Dirac with a slightly heavier one.
  const auto r = distance(dirac_state(1.0), dirac_state(1.0 + 1e-6), 0.0);
  CHECK(r.d_value > 0.0);
}

TEST_CASE("component inequalities from the stability proof",
          "[metric][property]") {
  std::mt19937_64 rng(161803);
  for (int it = 0; it < 30; ++it) {
    const auto s1 = atom_state(rng);
    const auto s2 = atom_state(rng);
    const auto a0 = init_transport(s1), b0 = init_transport(s2);
    const auto c0 = rescaled_components(a0, b0);
    const double dC = c0.mass;
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      const auto ct = rescaled_components(evolve(a0, t), evolve(b0, t));
      CHECK(ct.uinf <= c0.uinf + t / 4 * dC + 1e-9);
      CHECK(ct.chi_l1 <=
            c0.chi_l1 + t * c0.uinf + t * t / 8 * dC + 1e-9);
    }
  }
}

TEST_CASE("growth stays below the quadratic envelope", "[metric][property]") {
  std::mt19937_64 rng(555);
  for (int it = 0; it < 15; ++it) {
    const auto s1 = atom_state(rng);
    const auto s2 = atom_state(rng);
    const auto d0 = distance(s1, s2, 0.0).d_value;
    if (d0 == 0.0) continue;
    for (int k = 0; k <= 10; ++k) {
      const double t = k;
      const auto rt = distance(s1, s2, t);
      CHECK(rt.d_value / d0 <= lipschitz_bound_factor(t) + 1e-9);
    }
  }
}

TEST_CASE("translate of the sampled Gaussian scenario", "[metric]") {
  // exercises the tail-law shift: both states pass the integrability gate
  // and the initial distance is the pure quantile offset |h|
  const double h = 0.3;
  const auto e = parse_scenario("erf", 256);
  const auto et = parse_scenario("translate:base=erf,h=0.3", 256);
  const auto r0 = distance(e.initial, et.initial, 0.0);
  CHECK(r0.components.mass <= 1e-13);
  CHECK(r0.components.uinf <= 1e-12);
  CHECK(r0.d_value == Catch::Approx(h).margin(1e-12));
  for (const auto& r :
       verify_lipschitz(e.initial, et.initial, {0.0, 1.0, 2.5}))
    CHECK(r.satisfied);
}

TEST_CASE("zero-energy convention keeps the metric continuous", "[metric]") {
  // d((0, 0), (0, alpha delta_0)) -> 0 as alpha -> 0
  EulerianState zero(PiecewiseLinear::constant(0.0), RadonMeasure{});
  for (double alpha : {1.0, 0.1, 1e-4}) {
    const auto r = distance(zero, dirac_state(alpha), 0.0);
    CHECK(r.d_value == Catch::Approx(alpha).margin(1e-15));
  }
  // and for the evolved pair: d(t) = alpha (1 + t/4 + t^2/16)
  const double alpha = 0.5, t = 2.0;
  const auto r = distance(zero, dirac_state(alpha), t);
  CHECK(r.d_value ==
        Catch::Approx(alpha * (1 + t / 4 + t * t / 16)).margin(1e-12));
}
