#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullfront/front.hpp"

#include <cmath>
#include <sstream>

using namespace nullfront;

namespace {

// unit circle in the t = 0 plane of 2+1 Minkowski with outward normals:
// rays nu(theta, t) = ((1+t) cos, (1+t) sin, t)
NullCongruence expanding_circle(int n, double t_lo, double t_hi, int steps) {
  MetricModel mink = minkowski_model(2);
  Immersion host = slice_as_immersion(GraphSlice::from_text(2, "0"));
  LGrid grid = circle_grid(n);
  auto lambda = [](const Vec& l) {
    Vec p(2);
    p << std::cos(l(0)), std::sin(l(0));
    return p;
  };
  auto [plus, minus] = normal_lifts(mink, host, lambda, grid);
  LegendrianMap lm = plus.X(grid.point({0})).dot(lambda(grid.point({0}))) > 0 ? plus : minus;
  return build_front(mink, host, lm, t_lo, t_hi, steps, {});
}

}  // namespace

TEST_CASE("initial null field is null, future pointing, and as constructed") {
  MetricModel mink = minkowski_model(3);
  Immersion host = slice_as_immersion(GraphSlice::from_text(3, "0"));
  Vec xbar = Vec::Zero(3);
  LGrid grid = sphere_grid(8, 12);
  LegendrianMap lm = fiber_legendrian(mink, host, xbar, grid);
  Vec l = grid.point({3, 4});
  Vec N = initial_null_field(mink, host, lm, l);
  Vec x(4);
  x << xbar, 0.0;
  CHECK(std::abs(inner(mink, x, N, N)) <= 1e-12);
  CHECK(classify(mink, x, N).time_sense == TimeSense::future);
  // flat slice: N = (u, 1) with u the unit direction
  CHECK(N(3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(N.head(3).norm() == doctest::Approx(1.0).epsilon(1e-12));

  // a non-unit X breaks nullness and is rejected
  LegendrianMap bad = lm;
  bad.X = [&lm](const Vec& l) { return Vec(2.0 * lm.X(l)); };
  CHECK_THROWS_AS(initial_null_field(mink, host, bad, l), DomainError);
}

TEST_CASE("expanding circle congruence matches its closed form") {
  NullCongruence nc = expanding_circle(32, -0.5, 2.0, 25);
  CHECK(nc.rays.size() == 32);
  for (std::size_t r = 0; r < nc.rays.size(); ++r) {
    CHECK(!nc.rays[r].failed);
    double th = nc.grid.point(nc.grid.unflatten(r))(0);
    for (int k = 0; k <= 25; ++k) {
      REQUIRE(nc.covered(r, k));
      double t = nc.tgrid[k];
      Vec expect(3);
      expect << (1 + t) * std::cos(th), (1 + t) * std::sin(th), t;
      CHECK((nc.nu(r, k) - expect).norm() <= 1e-9);
      Vec Nex(3);
      Nex << std::cos(th), std::sin(th), 1.0;
      CHECK((nc.N(r, k) - Nex).norm() <= 1e-9);
    }
  }
}

TEST_CASE("congruence residuals vanish for an exact front") {
  NullCongruence nc = expanding_circle(128, -0.5, 2.0, 25);
  FrontResidualReport rep = mapped_null_residual(nc);
  CHECK(rep.null_dev.max <= 1e-12);
  CHECK(rep.orth.max <= 1e-10);   // FD tangents are exactly tangent by symmetry
  CHECK(rep.tangency.max <= 1e-4);  // central FD in t on the closed form is O(h^2)

  FrontResidualReport fine = mapped_null_residual(nc, {3e-4});
  CHECK(fine.orth.max <= 1e-9);
}

TEST_CASE("lift and lift_rank see an immersed front away from caustics") {
  NullCongruence nc = expanding_circle(64, -0.5, 2.0, 25);
  Lift lf = lift(nc, 0, 10);
  CHECK(lf.point.size() == 3);
  CHECK(lf.direction.norm() == doctest::Approx(1.0));
  // flat metric: covector equals (N_x, N_y, -N_t)
  CHECK(lf.covector(2) == doctest::Approx(-nc.N(0, 10)(2)).epsilon(1e-12));
  // rank m = 2 everywhere on this front
  CHECK(lift_rank(nc, {5}, 12) == 2);
  CHECK(lift_rank(nc, {0}, 3) == 2);
}

TEST_CASE("a direct degenerate congruence has rank 1") {
  // nu(l, t) = (t, 0, 0, t) for every l: the whole family is one ray
  MetricModel mink = minkowski_model(3);
  LGrid grid;
  grid.axes.push_back({-1.0, 0.25, 9, false});
  grid.axes.push_back({-1.0, 0.25, 9, false});
  std::vector<double> tgrid;
  for (int k = 0; k <= 20; ++k) tgrid.push_back(-1.0 + 0.15 * k);
  auto nu_fn = [](const Vec&, double t) {
    Vec x(4);
    x << t, 0.0, 0.0, t;
    return x;
  };
  auto N_fn = [](const Vec&, double) {
    Vec N(4);
    N << 1.0, 0.0, 0.0, 1.0;
    return N;
  };
  NullCongruence nc = make_direct_congruence(mink, grid, tgrid, nu_fn, N_fn);
  FrontResidualReport rep = mapped_null_residual(nc);
  CHECK(rep.orth.max == 0.0);
  CHECK(rep.null_dev.max == 0.0);
  CHECK(lift_rank(nc, {4, 4}, 10) == 1);
}

TEST_CASE("front CSV output is deterministic with a fixed header") {
  NullCongruence nc = expanding_circle(8, 0.0, 1.0, 4);
  std::ostringstream a, b;
  write_front_csv(nc, a);
  write_front_csv(nc, b);
  CHECK(a.str() == b.str());
  std::string header = a.str().substr(0, a.str().find('\n'));
  CHECK(header == "l_0,t,nu_0,nu_1,nu_2,N_0,N_1,N_2");
  // one row per (ray, covered time): 8 * 5 + header
  int lines = 0;
  for (char c : a.str())
    if (c == '\n') ++lines;
  CHECK(lines == 41);
}
