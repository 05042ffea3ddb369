#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nullfront/chart.hpp"

#include <cmath>

using namespace nullfront;

namespace {

MetricModel exp_time_model() {
  // diag(1,1,1,-e^{2 x0})
  MetricModel model;
  model.dim = 3;
  model.metric = [](const Vec& x) {
    Mat g = Mat::Identity(4, 4);
    g(3, 3) = -std::exp(2.0 * x(0));
    return g;
  };
  return model;
}

}  // namespace

TEST_CASE("causal classification in flat space") {
  MetricModel mink = minkowski_model(3);
  Vec x = Vec::Zero(4);

  Vec v(4);
  v << 1, 0, 0, 0;
  CHECK(classify(mink, x, v).kind == CausalKind::spacelike);

  v << 0, 0, 0, 1;
  auto c = classify(mink, x, v);
  CHECK(c.kind == CausalKind::timelike);
  CHECK(c.time_sense == TimeSense::future);

  v << 0, 0, 0, -1;
  c = classify(mink, x, v);
  CHECK(c.kind == CausalKind::timelike);
  CHECK(c.time_sense == TimeSense::past);

  v << 1, 0, 0, 1;
  c = classify(mink, x, v);
  CHECK(c.kind == CausalKind::null);
  CHECK(c.time_sense == TimeSense::future);

  v << 0.6, -0.8, 0, -1;
  c = classify(mink, x, v);
  CHECK(c.kind == CausalKind::null);
  CHECK(c.time_sense == TimeSense::past);

  v.setZero();
  CHECK(classify(mink, x, v).kind == CausalKind::zero);
}

TEST_CASE("inner product uses the metric") {
  MetricModel mink = minkowski_model(2);
  Vec x = Vec::Zero(3);
  Vec u(3), v(3);
  u << 1, 2, 3;
  v << 4, 5, 6;
  CHECK(inner(mink, x, u, v) == doctest::Approx(4.0 + 10.0 - 18.0));
}

TEST_CASE("flat Christoffel symbols vanish") {
  MetricModel mink = minkowski_model(3);
  Vec x(4);
  x << 0.3, -1.2, 0.5, 2.0;
  Christoffel G = christoffel(mink, x);
  double mx = 0.0;
  for (int k = 0; k < 4; ++k) mx = std::max(mx, G.comp[k].cwiseAbs().maxCoeff());
  CHECK(mx == 0.0);
}

TEST_CASE("curved Christoffel symbols match hand-computed values") {
  // For g = diag(1,1,1,-e^{2 x0}): Gamma^t_{x0 t} = 1, Gamma^{x0}_{tt} = e^{2 x0}.
  MetricModel model = exp_time_model();

  Vec x = Vec::Zero(4);
  Christoffel G0 = christoffel(model, x);
  CHECK(G0(3, 0, 3) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(G0(3, 3, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(G0(0, 3, 3) == doctest::Approx(1.0).epsilon(1e-8));

  x(0) = 0.4;
  Christoffel G1 = christoffel(model, x);
  CHECK(G1(3, 0, 3) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(G1(0, 3, 3) == doctest::Approx(std::exp(0.8)).epsilon(1e-6));
  CHECK(G1(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("analytic derivative tables override finite differences") {
  MetricModel model = exp_time_model();
  model.metric_deriv = [](const Vec& x) {
    std::vector<Mat> d(4, Mat::Zero(4, 4));
    d[0](3, 3) = -2.0 * std::exp(2.0 * x(0));
    return d;
  };
  Vec x(4);
  x << -0.3, 0, 0, 0;
  Christoffel G = christoffel(model, x);
  CHECK(G(3, 0, 3) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(G(0, 3, 3) == doctest::Approx(std::exp(-0.6)).epsilon(1e-14));
}

TEST_CASE("validate_lorentzian accepts Lorentzian and rejects Euclidean signatures") {
  std::vector<Vec> pts;
  for (double a : {-1.0, 0.0, 1.5}) {
    Vec x(4);
    x << a, 0.5 * a, -a, 2 * a;
    pts.push_back(x);
  }

  CHECK(validate_lorentzian(minkowski_model(3), pts).pass());
  CHECK(validate_lorentzian(exp_time_model(), pts).pass());

  MetricModel euclid;
  euclid.dim = 3;
  euclid.metric = [](const Vec&) { return Mat(Mat::Identity(4, 4)); };
  LorentzReport bad = validate_lorentzian(euclid, pts);
  CHECK(!bad.pass());
  CHECK(bad.violations.size() >= pts.size());  // signature and orientation both fail
}

TEST_CASE("dimension mismatches are rejected") {
  MetricModel mink = minkowski_model(3);
  Vec x3 = Vec::Zero(3);
  CHECK_THROWS_AS(metric_at(mink, x3), DimensionError);
  Vec x4 = Vec::Zero(4);
  Vec v3 = Vec::Zero(3);
  CHECK_THROWS_AS(inner(mink, x4, v3, v3), DimensionError);
}
