#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullfront/hypersurface.hpp"

#include <cmath>

using namespace nullfront;

TEST_CASE("graph slice evaluates height and gradient from expression text") {
  GraphSlice gs = GraphSlice::from_text(2, "a*x0 + x1^2", {{"a", 0.5}});
  Vec p(2);
  p << 2.0, 3.0;
  CHECK(gs.height(p) == doctest::Approx(10.0));
  Vec grad = gs.gradient(p);
  CHECK(grad(0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(grad(1) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK_THROWS_AS(GraphSlice::from_text(2, "x0 + x5"), ParseError);
}

TEST_CASE("induced metric of a tilted plane in Minkowski") {
  // t = 0.5 x0 over 2d space: gbar = diag(1 - 0.25, 1) = diag(0.75, 1)
  MetricModel mink = minkowski_model(2);
  Immersion imm = slice_as_immersion(GraphSlice::from_text(2, "0.5*x0"));
  Vec p(2);
  p << 0.7, -1.3;
  Mat gbar = induced_metric(mink, imm, p);
  CHECK(gbar(0, 0) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(gbar(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(gbar(0, 1)) <= 1e-9);
}

TEST_CASE("spacelike check accepts mild tilts and rejects steep ones") {
  MetricModel mink = minkowski_model(2);
  std::vector<Vec> grid;
  for (double a : {-1.0, 0.0, 1.0})
    for (double b : {-1.0, 1.0}) {
      Vec p(2);
      p << a, b;
      grid.push_back(p);
    }

  Immersion mild = slice_as_immersion(GraphSlice::from_text(2, "0.5*x0"));
  CHECK(spacelike_check(mink, mild, grid).pass());

  // t = 2 x0 is timelike in the x0 direction: 1 - 4 < 0
  Immersion steep = slice_as_immersion(GraphSlice::from_text(2, "2*x0"));
  SpacelikeReport rep = spacelike_check(mink, steep, grid);
  CHECK(!rep.pass());
  CHECK(rep.failures.size() == grid.size());
}

TEST_CASE("unit future normal of a tilted plane") {
  // For t = 0.5 x0 the normal is (0.5, 0, 1)/sqrt(0.75): unit, future, orthogonal.
  MetricModel mink = minkowski_model(2);
  Immersion imm = slice_as_immersion(GraphSlice::from_text(2, "0.5*x0"));
  Vec p(2);
  p << 1.0, 2.0;
  Vec V = unit_future_normal(mink, imm, p);
  Vec expect(3);
  expect << 0.5, 0.0, 1.0;
  expect /= std::sqrt(0.75);
  CHECK((V - expect).norm() <= 1e-10);
  Vec x = imm.map(p);
  CHECK(inner(mink, x, V, V) == doctest::Approx(-1.0).epsilon(1e-12));
  Mat J = imm.jacobian(p);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(inner(mink, x, V, J.col(i))) <= 1e-9);
}

TEST_CASE("unit future normal refuses non-spacelike immersions") {
  MetricModel mink = minkowski_model(2);
  Immersion steep = slice_as_immersion(GraphSlice::from_text(2, "2*x0"));
  Vec p = Vec::Zero(2);
  CHECK_THROWS_AS(unit_future_normal(mink, steep, p), DomainError);
}

TEST_CASE("generic immersion with finite-difference Jacobian") {
  // unit circle in the t = 0 plane of 2+1 Minkowski
  MetricModel mink = minkowski_model(2);
  Immersion circ = Immersion::from_map(1, [](const Vec& p) {
    Vec x(3);
    x << std::cos(p(0)), std::sin(p(0)), 0.0;
    return x;
  });
  Vec p(1);
  p << 0.8;
  Mat J = circ.jacobian(p);
  CHECK(J(0, 0) == doctest::Approx(-std::sin(0.8)).epsilon(1e-8));
  CHECK(J(1, 0) == doctest::Approx(std::cos(0.8)).epsilon(1e-8));
  Mat gbar = induced_metric(mink, circ, p);
  CHECK(gbar(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
}
