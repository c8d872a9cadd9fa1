#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hsx/piecewise.hpp"

using namespace hsx;

TEST_CASE("piecewise linear evaluation and tails", "[piecewise]") {
  PiecewiseLinear f({{0.0, 1.0}, {1.0, 3.0}, {2.0, 3.0}}, 0.0, 2.0);
  CHECK(f(-4.0) == 1.0);
  CHECK(f(0.0) == 1.0);
  CHECK(f(0.5) == 2.0);
  CHECK(f(1.0) == 3.0);
  CHECK(f(1.7) == 3.0);
  CHECK(f(3.0) == 5.0);
  CHECK(f.slope_right(0.0) == 2.0);
  CHECK(f.slope_left(1.0) == 2.0);
  CHECK(f.slope_right(1.0) == 0.0);
}

TEST_CASE("identity and constant helpers", "[piecewise]") {
  const auto id = PiecewiseLinear::identity();
  CHECK(id(-3.5) == -3.5);
  CHECK(id(9.25) == 9.25);
  const auto c = PiecewiseLinear::constant(2.5);
  CHECK(c(-100.0) == 2.5);
  CHECK(c(100.0) == 2.5);
}

TEST_CASE("monotone function values at jumps", "[piecewise]") {
  MonotoneFunction f(-kInf, kInf, {{0.0, 0.0, 1.0}, {2.0, 2.0, 2.0}});
  CHECK(f.value(-1.0) == 0.0);
  CHECK(f.value(0.0) == 0.0);        // left-continuous
  CHECK(f.value_right(0.0) == 1.0);
  CHECK(f.value(1.0) == 1.5);        // chord between (0,1) and (2,2)
  CHECK(f.value(2.0) == 2.0);
  CHECK(f.value(5.0) == 2.0);
}

TEST_CASE("monotone constructor rejects decreasing data", "[piecewise]") {
  CHECK_THROWS_AS(MonotoneFunction(-kInf, kInf, {{0.0, 1.0, 0.5}}),
                  NonMonotoneError);
  CHECK_THROWS_AS(
      MonotoneFunction(-kInf, kInf, {{0.0, 0.0, 1.0}, {1.0, 0.5, 2.0}}),
      NonMonotoneError);
}

TEST_CASE("bounded domains need endpoint breakpoints", "[piecewise]") {
  CHECK_THROWS_AS(MonotoneFunction(0.0, 1.0, {{0.5, 0.0, 0.0}}), ArgumentError);
}

TEST_CASE("generalized inverse round trip is vertex-exact", "[piecewise]") {
  // mixed flats, rises and a jump
  MonotoneFunction F(-kInf, kInf,
                     {{-1.0, 0.0, 0.0}, {0.0, 1.0, 1.5}, {2.0, 1.5, 1.5},
                      {3.0, 2.0, 2.0}});
  const auto chi = generalized_inverse(F, 0.0, 2.0);
  const auto F2 = generalized_inverse(chi, -kInf, kInf);
  CHECK(max_difference(F, F2, -3.0, 5.0) == 0.0);
}

TEST_CASE("generalized inverse maps jumps to flats", "[piecewise]") {
  MonotoneFunction F(-kInf, kInf, {{1.0, 0.0, 2.0}});  // jump of size 2 at x=1
  const auto chi = generalized_inverse(F, 0.0, 2.0);
  CHECK(chi.value(0.0) == -kInf);
  CHECK(chi.value(0.5) == 1.0);
  CHECK(chi.value(1.7) == 1.0);
  CHECK(chi.value(2.0) == 1.0);
}

TEST_CASE("invert_increasing is an exact node swap", "[piecewise]") {
  PiecewiseLinear w({{0.0, 1.0}, {2.0, 5.0}}, 1.0, 2.0);
  const auto winv = invert_increasing(w);
  CHECK(winv(1.0) == 0.0);
  CHECK(winv(5.0) == 2.0);
  CHECK(winv(3.0) == 1.0);
  CHECK(winv(7.0) == 3.0);   // tail slope 1/2
  CHECK(winv(0.0) == -1.0);  // tail slope 1/1
}

TEST_CASE("compose of piecewise linear functions is exact", "[piecewise]") {
  PiecewiseLinear f({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}});  // tent
  PiecewiseLinear g({{0.0, 0.0}, {4.0, 2.0}}, 0.5, 0.5);     // half-speed ramp
  const auto h = compose(f, g);
  CHECK(h(0.0) == 0.0);
  CHECK(h(2.0) == 1.0);  // g(2) = 1 is the tent peak; node must exist there
  CHECK(h(4.0) == 0.0);
  CHECK(h(1.0) == 0.5);
  CHECK(h(3.0) == 0.5);
  bool has_peak_node = false;
  for (const auto& n : h.nodes()) has_peak_node |= (n.x == 2.0);
  CHECK(has_peak_node);
}

TEST_CASE("compose with identity returns the outer function", "[piecewise]") {
  PiecewiseLinear f({{-1.0, 2.0}, {3.0, 0.5}}, 0.25, 0.0);
  const auto h = compose(f, PiecewiseLinear::identity());
  CHECK(h.nodes().size() == f.nodes().size());
  CHECK(max_difference(f, h, -5.0, 5.0) == 0.0);
}

TEST_CASE("compose_through_gaps demands constancy across gaps", "[piecewise]") {
  // g jumps from 0 to 1 at x=0; f is constant across [0,1] -> fine
  MonotoneFunction g(-kInf, kInf, {{0.0, 0.0, 1.0}});
  PiecewiseLinear ok({{-1.0, 5.0}, {0.0, 7.0}, {1.0, 7.0}, {2.0, 9.0}});
  const auto h = compose_through_gaps(ok, g, 1e-12);
  CHECK(h(0.0) == 7.0);
  // f not constant across the gap -> invalid state
  PiecewiseLinear bad({{-1.0, 5.0}, {2.0, 9.0}});
  CHECK_THROWS_AS(compose_through_gaps(bad, g, 1e-9), InvalidStateError);
}

TEST_CASE("combine merges nodes exactly", "[piecewise]") {
  PiecewiseLinear a({{0.0, 1.0}, {1.0, 2.0}});
  PiecewiseLinear b({{0.5, 10.0}, {2.0, 10.0}});
  const auto s = combine({{2.0, &a}, {-1.0, &b}}, 0.5, 3.0);
  // s(x) = 2 a(x) - b(x) + 0.5 x + 3
  for (double x : {-1.0, 0.0, 0.5, 0.75, 1.0, 2.0, 4.0})
    CHECK(s(x) == Catch::Approx(2 * a(x) - b(x) + 0.5 * x + 3).margin(1e-14));
}

TEST_CASE("combine_with_monotone keeps jumps", "[piecewise]") {
  MonotoneFunction base(0.0, 2.0,
                        {{0.0, -kInf, 0.0}, {1.0, 0.25, 0.75}, {2.0, 1.0, 1.0}});
  PiecewiseLinear lin({{0.0, 1.0}, {2.0, 1.0}});
  const auto out = combine_with_monotone(base, {{2.0, &lin}}, 1.0, -1.0);
  // out = base + 2*1 + x - 1 = base + x + 1
  CHECK(out.value(0.0) == -kInf);
  CHECK(out.value_right(0.0) == 1.0);
  CHECK(out.value(1.0) == Catch::Approx(0.25 + 2.0).margin(1e-15));
  CHECK(out.value_right(1.0) == Catch::Approx(0.75 + 2.0).margin(1e-15));
  // the jump height is preserved exactly
  CHECK(out.value_right(1.0) - out.value(1.0) ==
        Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("rescale_argument moves breakpoints only", "[piecewise]") {
  MonotoneFunction f(0.0, 2.0, {{0.0, 0.0, 0.0}, {2.0, 4.0, 4.0}});
  const auto g = rescale_argument(f, 2.0);  // g(eta) = f(2 eta) on [0,1]
  CHECK(g.domain_hi() == 1.0);
  CHECK(g.value(0.5) == f.value(1.0));
  CHECK(g.value(1.0) == 4.0);
}

TEST_CASE("sup and max difference on merged grids", "[piecewise]") {
  PiecewiseLinear f({{0.0, 0.0}, {1.0, 1.0}});
  PiecewiseLinear g({{0.0, 0.5}, {1.0, 0.0}});
  CHECK(sup_distance(f, g, 0.0, 1.0) == 1.0);
  CHECK(max_difference(f, g, 0.0, 1.0) == 1.0);
}

TEST_CASE("composition is associative on monotone chains",
          "[piecewise][property]") {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> dv(0.05, 1.0), dx(0.1, 1.0);
  auto random_increasing = [&](double lo_slope, double hi_slope) {
    std::vector<Node> nodes;
    double x = -2.0, v = -1.5;
    for (int i = 0; i < 6; ++i) {
      nodes.push_back({x, v});
      x += dx(rng);
      v += dv(rng);
    }
    return PiecewiseLinear(nodes, lo_slope, hi_slope);
  };
  for (int it = 0; it < 25; ++it) {
    const auto f = random_increasing(0.5, 2.0);
    const auto g = random_increasing(1.0, 1.0);
    const auto h = random_increasing(1.0, 1.0);
    const auto left = compose(compose(f, g), h);
    const auto right = compose(f, compose(g, h));
    CHECK(max_difference(left, right, -6.0, 6.0) <= 1e-13);
  }
}

TEST_CASE("inverse of the inverse returns the original map", "[piecewise]") {
  PiecewiseLinear w({{-1.0, -2.0}, {0.5, 1.0}, {2.0, 1.5}}, 0.75, 2.0);
  const auto back = invert_increasing(invert_increasing(w));
  CHECK(max_difference(w, back, -5.0, 5.0) == 0.0);
}

TEST_CASE("integrate is exact on chords and flats", "[piecewise]") {
  MonotoneFunction F(-kInf, kInf, {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
  CHECK(integrate(F, -1.0, 0.0) == 0.0);
  CHECK(integrate(F, 0.0, 1.0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(integrate(F, 0.0, 2.0) == Catch::Approx(1.5).margin(1e-15));
}
