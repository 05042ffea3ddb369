#pragma once

// Immersed spacelike hypersurfaces mu : M^m -> X^{m+1}: parametric
// immersions (where fronts launch) and time-graph slices t = f(x)
// (where fronts are read off), induced metrics, and unit future normals.

#include "nullfront/chart.hpp"
#include "nullfront/expr.hpp"

#include <functional>
#include <vector>

namespace nullfront {

struct Immersion {
  int m = 0;  // parameter dimension
  std::function<Vec(const Vec&)> map;       // params -> chart point (m+1)
  std::function<Mat(const Vec&)> jacobian;  // params -> (m+1) x m
  double jac_fd_step = 1e-5;

  static Immersion from_map(int m, std::function<Vec(const Vec&)> map,
                            double fd_step = 1e-5) {
    Immersion imm;
    imm.m = m;
    imm.map = map;
    imm.jac_fd_step = fd_step;
    imm.jacobian = [m, map, fd_step](const Vec& p) {
      Mat J(m + 1, m);
      for (int i = 0; i < m; ++i) {
        Vec pp = p, pm = p;
        pp[i] += fd_step;
        pm[i] -= fd_step;
        J.col(i) = (map(pp) - map(pm)) / (2.0 * fd_step);
      }
      return J;
    };
    return imm;
  }
};

// Graph slice t = f(x0..x{m-1}); used wherever crossings must reduce to
// scalar root finding along rays.
struct GraphSlice {
  int m = 0;
  ExprPtr f;
  Env params;

  static GraphSlice from_text(int m, std::string_view text, Env params = {}) {
    GraphSlice gs;
    gs.m = m;
    gs.params = std::move(params);
    std::set<std::string> ok;
    for (int i = 0; i < m; ++i) ok.insert("x" + std::to_string(i));
    for (const auto& [k, _] : gs.params) ok.insert(k);
    gs.f = parse_expr(text, &ok);
    return gs;
  }

  double height(const Vec& spatial) const {
    Env env = params;
    for (int i = 0; i < m; ++i) env["x" + std::to_string(i)] = spatial[i];
    return eval_expr(f, env);
  }

  Vec gradient(const Vec& spatial, double h = 1e-7) const {
    Vec g(m);
    for (int i = 0; i < m; ++i) {
      Vec sp = spatial, sm = spatial;
      sp[i] += h;
      sm[i] -= h;
      g[i] = (height(sp) - height(sm)) / (2.0 * h);
    }
    return g;
  }
};

inline Immersion slice_as_immersion(const GraphSlice& slice) {
  const int m = slice.m;
  GraphSlice gs = slice;
  Immersion imm;
  imm.m = m;
  imm.map = [m, gs](const Vec& p) {
    Vec x(m + 1);
    x.head(m) = p;
    x[m] = gs.height(p);
    return x;
  };
  imm.jacobian = [m, gs](const Vec& p) {
    Mat J = Mat::Zero(m + 1, m);
    Vec grad = gs.gradient(p);
    for (int i = 0; i < m; ++i) {
      J(i, i) = 1.0;
      J(m, i) = grad[i];
    }
    return J;
  };
  return imm;
}

// gbar(p) = J(p)^T G(mu(p)) J(p)
inline Mat induced_metric(const MetricModel& model, const Immersion& imm, const Vec& p) {
  Mat J = imm.jacobian(p);
  Mat G = metric_at(model, imm.map(p));
  Mat gbar = J.transpose() * G * J;
  return 0.5 * (gbar + gbar.transpose());
}

struct SpacelikePoint {
  Vec params;
  double min_eigenvalue;
  double min_singular_value;  // of the Jacobian (rank check)
};

struct SpacelikeReport {
  std::vector<SpacelikePoint> points;
  std::vector<SpacelikePoint> failures;
  double pd_tol, rank_tol;
  bool pass() const { return failures.empty(); }
};

inline SpacelikeReport spacelike_check(const MetricModel& model, const Immersion& imm,
                                       const std::vector<Vec>& grid,
                                       double pd_tol = 1e-8, double rank_tol = 1e-8) {
  SpacelikeReport report;
  report.pd_tol = pd_tol;
  report.rank_tol = rank_tol;
  for (const Vec& p : grid) {
    Mat gbar = induced_metric(model, imm, p);
    Eigen::SelfAdjointEigenSolver<Mat> es(gbar);
    Eigen::JacobiSVD<Mat> svd(imm.jacobian(p));
    SpacelikePoint pt{p, es.eigenvalues().minCoeff(),
                      svd.singularValues().minCoeff()};
    report.points.push_back(pt);
    if (pt.min_eigenvalue < pd_tol || pt.min_singular_value < rank_tol)
      report.failures.push_back(pt);
  }
  return report;
}

// The unique future pointing V with g(V, V) = -1 and V g-orthogonal to the
// Jacobian columns: null space of J^T G, then scaled and sign fixed.
inline Vec unit_future_normal(const MetricModel& model, const Immersion& imm, const Vec& p) {
  const int n = model.n();
  Vec x = imm.map(p);
  Mat J = imm.jacobian(p);
  Mat G = metric_at(model, x);
  Mat A = J.transpose() * G;  // m x (m+1)
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  Vec V = svd.matrixV().col(n - 1);  // kernel direction
  double q = V.dot(G * V);
  if (!(q < 0.0))
    throw DomainError("unit_future_normal: no timelike normal (immersion not spacelike here)");
  V /= std::sqrt(-q);
  if (V.dot(G * model.reference_field(x)) > 0.0) V = -V;
  return V;
}

}  // namespace nullfront
