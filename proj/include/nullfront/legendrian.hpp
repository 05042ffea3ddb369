#pragma once

// Legendrian maps into ST*M over a spacelike immersion, represented as the
// pair (lambda, X): base map into the immersion's parameter domain plus a
// gbar-unit vector field along it.

#include "nullfront/hypersurface.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace nullfront {

struct GridAxis {
  double start = 0.0;
  double step = 1.0;
  int count = 1;
  bool periodic = false;

  double coord(int i) const { return start + step * i; }
  double period() const { return step * count; }
};

// Structured sample grid over the (m-1)-dimensional parameter manifold L.
// Lexicographic order: axis 0 is the slowest index.
struct LGrid {
  std::vector<GridAxis> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& a : axes) s *= a.count;
    return s;
  }
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(axes.size());
    for (int k = dim() - 1; k >= 0; --k) {
      idx[k] = static_cast<int>(flat % axes[k].count);
      flat /= axes[k].count;
    }
    return idx;
  }
  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (int k = 0; k < dim(); ++k) f = f * axes[k].count + idx[k];
    return f;
  }
  Vec point(const std::vector<int>& idx) const {
    Vec p(dim());
    for (int k = 0; k < dim(); ++k) p[k] = axes[k].coord(idx[k]);
    return p;
  }
  // neighbor along axis with periodic wrap; returns false when off the grid
  bool neighbor(const std::vector<int>& idx, int axis, int delta,
                std::vector<int>& out) const {
    out = idx;
    int j = idx[axis] + delta;
    if (axes[axis].periodic) {
      j = ((j % axes[axis].count) + axes[axis].count) % axes[axis].count;
    } else if (j < 0 || j >= axes[axis].count) {
      return false;
    }
    out[axis] = j;
    return true;
  }
  bool interior(const std::vector<int>& idx) const {
    for (int k = 0; k < dim(); ++k)
      if (!axes[k].periodic && (idx[k] == 0 || idx[k] == axes[k].count - 1)) return false;
    return true;
  }
};

inline LGrid circle_grid(int count) {
  LGrid g;
  g.axes.push_back({0.0, 2.0 * M_PI / count, count, true});
  return g;
}

// lat-long sphere grid with polar caps excluded at colatitude eps_pole
inline LGrid sphere_grid(int n_colat, int n_lon, double eps_pole = -1.0) {
  LGrid g;
  double h_lon = 2.0 * M_PI / n_lon;
  double h_colat_guess = M_PI / (n_colat + 1);
  if (eps_pole < 0.0) eps_pole = std::max(0.05, 1.5 * h_colat_guess);
  double span = M_PI - 2.0 * eps_pole;
  require(span > 0.0, "sphere_grid: pole gap leaves no colatitude span");
  g.axes.push_back({eps_pole, span / (n_colat - 1), n_colat, false});
  g.axes.push_back({0.0, h_lon, n_lon, true});
  return g;
}

// lat-long unit direction on S^{m-1}; supported for m = 2 and m = 3
inline Vec latlong_direction(int m, const Vec& l) {
  if (m == 2) {
    Vec u(2);
    u << std::cos(l[0]), std::sin(l[0]);
    return u;
  }
  if (m == 3) {
    double a = l[0], b = l[1];
    Vec u(3);
    u << std::sin(a) * std::cos(b), std::sin(a) * std::sin(b), std::cos(a);
    return u;
  }
  throw DomainError("latlong_direction: only m = 2 and m = 3 are supported");
}

struct LegendrianMap {
  LGrid grid;
  Immersion host;
  std::function<Vec(const Vec&)> lambda;  // L-params -> M-params (size m)
  std::function<Vec(const Vec&)> X;       // L-params -> gbar-unit m-vector
};

namespace detail {

// FD tangent of fn along L-axis `axis`; central on the grid interior and at
// arbitrary params, one-sided at non-periodic grid edges
inline Vec fd_tangent(const std::function<Vec(const Vec&)>& fn, const LGrid& grid,
                      const Vec& l, int axis, double step, bool at_lower_edge,
                      bool at_upper_edge) {
  Vec lp = l, lm = l;
  if (at_lower_edge) {
    lp[axis] += step;
    return (fn(lp) - fn(l)) / step;
  }
  if (at_upper_edge) {
    lm[axis] -= step;
    return (fn(l) - fn(lm)) / step;
  }
  lp[axis] += step;
  lm[axis] -= step;
  return (fn(lp) - fn(lm)) / (2.0 * step);
}

inline std::vector<Vec> base_tangents(const LegendrianMap& lm, const Vec& l,
                                      const std::vector<int>* idx = nullptr,
                                      double fd_step = 0.0) {
  std::vector<Vec> tang;
  for (int k = 0; k < lm.grid.dim(); ++k) {
    double h = fd_step > 0.0 ? fd_step : lm.grid.axes[k].step;
    bool lo = false, hi = false;
    if (idx && !lm.grid.axes[k].periodic) {
      lo = (*idx)[k] == 0;
      hi = (*idx)[k] == lm.grid.axes[k].count - 1;
    }
    tang.push_back(fd_tangent(lm.lambda, lm.grid, l, k, h, lo, hi));
  }
  return tang;
}

}  // namespace detail

// max_i |gbar(X(l), D_i lambda(l))|; 0 for a 0-dimensional L
inline double legendrian_residual(const MetricModel& model, const LegendrianMap& lm,
                                  const Vec& l, const std::vector<int>* idx = nullptr,
                                  double fd_step = 0.0) {
  if (lm.grid.dim() == 0) return 0.0;
  Mat gbar = induced_metric(model, lm.host, lm.lambda(l));
  Vec X = lm.X(l);
  double r = 0.0;
  for (const Vec& tl : detail::base_tangents(lm, l, idx, fd_step))
    r = std::max(r, std::abs(X.dot(gbar * tl)));
  return r;
}

// The two gbar-unit normal lifts of an immersed (m-1)-submanifold of M,
// sign-continuous along the grid (greedy propagation from node 0).
inline std::pair<LegendrianMap, LegendrianMap> normal_lifts(
    const MetricModel& model, const Immersion& host,
    std::function<Vec(const Vec&)> lambda, const LGrid& grid) {
  const int m = host.m;
  const int d = grid.dim();
  require(d == m - 1, "normal_lifts: grid dimension must be m-1");

  auto kernel_dir = [=](const Vec& l, const std::vector<int>* idx, double fd) -> Vec {
    Mat gbar = induced_metric(model, host, lambda(l));
    LegendrianMap probe{grid, host, lambda, {}};
    auto tang = detail::base_tangents(probe, l, idx, fd);
    Mat A(d, m);
    for (int k = 0; k < d; ++k) A.row(k) = (gbar * tang[k]).transpose();
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    if (d > 0) {
      double smax = svd.singularValues()[0];
      double smin = svd.singularValues()[d - 1];
      if (!(smin > 1e-10 * std::max(1.0, smax)))
        throw DomainError("normal_lifts: base map is not an immersion at a grid point");
    }
    Vec X = svd.matrixV().col(m - 1);
    double q = X.dot(gbar * X);
    if (!(q > 0.0)) throw DomainError("normal_lifts: induced metric not positive here");
    return X / std::sqrt(q);
  };

  // table with greedy sign propagation over grid adjacency
  const std::size_t nnode = grid.size();
  std::vector<Vec> table(nnode);
  std::vector<char> seen(nnode, 0);
  std::vector<std::size_t> queue{0};
  table[0] = kernel_dir(grid.point(grid.unflatten(0)), nullptr, 0.0);
  seen[0] = 1;
  while (!queue.empty()) {
    std::size_t cur = queue.back();
    queue.pop_back();
    auto idx = grid.unflatten(cur);
    for (int k = 0; k < d; ++k)
      for (int delta : {-1, +1}) {
        std::vector<int> nb;
        if (!grid.neighbor(idx, k, delta, nb)) continue;
        std::size_t f = grid.flatten(nb);
        Vec cand = kernel_dir(grid.point(nb), &nb, 0.0);
        double align = cand.dot(table[cur]);
        if (!seen[f]) {
          table[f] = align < 0.0 ? Vec(-cand) : cand;
          seen[f] = 1;
          queue.push_back(f);
        } else {
          // revisit: a sign conflict means the normal bundle is not orientable
          double agree = table[f].dot(align < 0.0 ? Vec(-cand) : cand);
          if (agree < 0.0)
            throw DomainError("normal_lifts: sign conflict (non-orientable normal bundle)");
        }
      }
  }

  // continuous field: solve at l and align the sign with the nearest table node
  auto plus_field = [grid, d, kernel_dir, table](const Vec& l) -> Vec {
    std::vector<int> nearest(d);
    for (int k = 0; k < d; ++k) {
      const auto& ax = grid.axes[k];
      int j = static_cast<int>(std::lround((l[k] - ax.start) / ax.step));
      if (ax.periodic)
        j = ((j % ax.count) + ax.count) % ax.count;
      else
        j = std::clamp(j, 0, ax.count - 1);
      nearest[k] = j;
    }
    double fd = 1e-6;
    Vec X = kernel_dir(l, nullptr, fd);
    if (X.dot(table[grid.flatten(nearest)]) < 0.0) X = -X;
    return X;
  };
  auto minus_field = [plus_field](const Vec& l) -> Vec { return Vec(-plus_field(l)); };

  LegendrianMap plus{grid, host, lambda, plus_field};
  LegendrianMap minus{grid, host, lambda, minus_field};
  return {plus, minus};
}

// Constant base map at xbar with X the gbar-normalized lat-long direction
// (the S^{m-1} fiber Legendrian of the null-cone construction).
inline LegendrianMap fiber_legendrian(const MetricModel& model, const Immersion& host,
                                      const Vec& xbar, const LGrid& grid) {
  const int m = host.m;
  Mat gbar = induced_metric(model, host, xbar);
  Eigen::SelfAdjointEigenSolver<Mat> es(gbar);
  require(es.eigenvalues().minCoeff() > 0.0,
          "fiber_legendrian: induced metric not positive definite at xbar");
  Vec center = xbar;
  auto lambda = [center](const Vec&) { return center; };
  auto X = [m, gbar](const Vec& l) {
    Vec u = latlong_direction(m, l);
    double q = u.dot(gbar * u);
    return Vec(u / std::sqrt(q));
  };
  return LegendrianMap{grid, host, lambda, X};
}

// Numeric rank of the stacked FD differential of (lambda, X); the X rows
// are projected orthogonal to X (directions live on a sphere).
inline int legendrian_rank(const MetricModel& model, const LegendrianMap& lm,
                           const std::vector<int>& idx, double rank_tol = 1e-3) {
  const int m = lm.host.m;
  const int d = lm.grid.dim();
  if (d == 0) return 0;
  Vec l = lm.grid.point(idx);
  Vec X0 = lm.X(l);
  Vec xhat = X0.normalized();
  Mat D(2 * m, d);
  for (int k = 0; k < d; ++k) {
    double h = lm.grid.axes[k].step;
    bool lo = !lm.grid.axes[k].periodic && idx[k] == 0;
    bool hi = !lm.grid.axes[k].periodic && idx[k] == lm.grid.axes[k].count - 1;
    Vec dl = detail::fd_tangent(lm.lambda, lm.grid, l, k, h, lo, hi);
    Vec dX = detail::fd_tangent(lm.X, lm.grid, l, k, h, lo, hi);
    dX -= xhat * xhat.dot(dX);
    D.col(k) << dl, dX;
  }
  Eigen::JacobiSVD<Mat> svd(D);
  double smax = svd.singularValues()[0];
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= rank_tol * smax) ++rank;
  return rank;
}

}  // namespace nullfront
