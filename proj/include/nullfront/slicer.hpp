#pragma once

// Slicing a wavefront by a spacelike graph hypersurface t = f(x):
// crossing detection along each ray, pull-back covector phi, and the
// numerical checks that the result is a Legendrian map into the
// spherical cotangent bundle of the slice.

#include "nullfront/front.hpp"
#include "nullfront/hypersurface.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nullfront {

struct Crossing {
  double t_star = 0.0;
  Vec point;     // nu(l, t*) in the chart, n+1 components
  Vec m_params;  // spatial coordinates = graph base coordinates, m of them
  Vec N_cross;   // null tangent at the crossing
  Vec phi;       // pulled-back covector phi_i = theta(e_i + f_i e_t)
  double margin = 0.0;  // |F'(t*)| / |N|, transversality margin
};

struct SliceOptions {
  double cross_tol = 1e-10;
  double trans_tol = 1e-2;
  double phi_tol = 1e-8;
};

namespace detail {

struct RayEval {
  std::function<Vec(double)> nu;  // position
  std::function<Vec(double)> N;   // velocity
  double t_lo = 0.0, t_hi = 0.0;
};

inline RayEval ray_eval_stored(const NullCongruence& nc, std::size_t r) {
  RayEval ev;
  if (nc.nu_fn) {
    Vec l = nc.grid.point(nc.grid.unflatten(r));
    ev.nu = [l, fn = nc.nu_fn](double t) { return fn(l, t); };
    ev.N = [l, fn = nc.N_fn](double t) { return fn(l, t); };
    ev.t_lo = nc.tgrid.front();
    ev.t_hi = nc.tgrid.back();
  } else {
    const Trajectory& traj = nc.rays[r].traj;
    ev.nu = [&traj](double t) { return traj.sample(t).x; };
    ev.N = [&traj](double t) { return traj.sample(t).v; };
    ev.t_lo = nc.tgrid[nc.rays[r].k_lo];
    ev.t_hi = nc.tgrid[nc.rays[r].k_hi];
  }
  return ev;
}

inline RayEval ray_eval_fresh(const NullCongruence& nc, const Vec& l,
                              std::shared_ptr<Trajectory>& keep) {
  RayEval ev;
  if (nc.nu_fn) {
    ev.nu = [l, fn = nc.nu_fn](double t) { return fn(l, t); };
    ev.N = [l, fn = nc.N_fn](double t) { return fn(l, t); };
    ev.t_lo = nc.tgrid.front();
    ev.t_hi = nc.tgrid.back();
  } else {
    keep = std::make_shared<Trajectory>(nc.ray_at(l));
    auto traj = keep;
    ev.nu = [traj](double t) { return traj->sample(t).x; };
    ev.N = [traj](double t) { return traj->sample(t).v; };
    ev.t_lo = traj->ts.front();
    ev.t_hi = traj->ts.back();
  }
  return ev;
}

inline Crossing make_crossing(const MetricModel& model, const GraphSlice& slice,
                              const RayEval& ev, double t, const SliceOptions& opts) {
  const int m = slice.m;
  Crossing c;
  c.t_star = t;
  c.point = ev.nu(t);
  c.m_params = c.point.head(m);
  c.N_cross = ev.N(t);
  Vec grad = slice.gradient(c.m_params);
  double Fp = c.N_cross[m] - grad.dot(c.N_cross.head(m));
  c.margin = std::abs(Fp) / c.N_cross.norm();
  Mat G = metric_at(model, c.point);
  Vec theta = G * c.N_cross;  // covector of the lift
  c.phi = theta.head(m) + grad * theta[m];
  double jnorm = std::sqrt(static_cast<double>(m) + grad.squaredNorm());
  if (c.phi.norm() <= opts.phi_tol * c.N_cross.norm() * jnorm)
    throw DomainError("slice: pulled-back covector vanishes at t = " + std::to_string(t));
  return c;
}

// all transversal roots of F(t) = t-coord(nu) - f(spatial(nu)) on
// [ev.t_lo, ev.t_hi], scanned over the congruence time grid
inline std::vector<Crossing> ray_crossings(const MetricModel& model, const GraphSlice& slice,
                                           const std::vector<double>& tgrid, const RayEval& ev,
                                           const SliceOptions& opts,
                                           std::vector<std::string>* warnings,
                                           const std::string& tag) {
  const int m = slice.m;
  auto F = [&](double t) {
    Vec x = ev.nu(t);
    return x[m] - slice.height(x.head(m));
  };
  std::vector<double> nodes;
  for (double t : tgrid)
    if (t >= ev.t_lo - 1e-14 && t <= ev.t_hi + 1e-14)
      nodes.push_back(std::clamp(t, ev.t_lo, ev.t_hi));
  std::vector<Crossing> out;
  if (nodes.size() < 2) return out;

  double fscale = 1.0;
  std::vector<double> Fv(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    Fv[k] = F(nodes[k]);
    fscale = std::max(fscale, std::abs(Fv[k]));
  }
  const double zero_tol = opts.cross_tol * fscale;

  auto polish = [&](double a, double b) {
    double fa = F(a), fb = F(b);
    for (int it = 0; it < 200 && (b - a) > opts.cross_tol; ++it) {
      double mid = 0.5 * (a + b), fm = F(mid);
      if (fa * fm <= 0.0) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    // Newton polish with the analytic F'
    double t = 0.5 * (a + b);
    for (int it = 0; it < 12; ++it) {
      Vec x = ev.nu(t), v = ev.N(t);
      double f = x[m] - slice.height(x.head(m));
      double fp = v[m] - slice.gradient(x.head(m)).dot(v.head(m));
      if (fp == 0.0) break;
      double step = f / fp;
      double tn = std::clamp(t - step, ev.t_lo, ev.t_hi);
      if (std::abs(tn - t) < 0.1 * opts.cross_tol) return tn;
      t = tn;
    }
    return t;
  };

  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    bool root = false;
    double t_star = 0.0;
    if (std::abs(Fv[k]) <= zero_tol) {
      if (k == 0 || std::abs(Fv[k - 1]) > zero_tol) {
        root = true;
        t_star = nodes[k];
      }
    } else if (std::abs(Fv[k + 1]) <= zero_tol) {
      continue;  // handled as the left endpoint of the next interval
    } else if (Fv[k] * Fv[k + 1] < 0.0) {
      root = true;
      t_star = polish(nodes[k], nodes[k + 1]);
    }
    if (!root) continue;
    Crossing c = make_crossing(model, slice, ev, t_star, opts);
    if (c.margin < opts.trans_tol) {
      if (warnings)
        warnings->push_back("tangential crossing at " + tag +
                            ", t = " + format_double(t_star) +
                            ", margin = " + format_double(c.margin));
      continue;
    }
    out.push_back(std::move(c));
  }
  if (std::abs(Fv.back()) <= zero_tol &&
      (Fv.size() < 2 || std::abs(Fv[Fv.size() - 2]) > zero_tol))
    out.push_back(make_crossing(model, slice, ev, nodes.back(), opts));
  return out;
}

}  // namespace detail

struct SlicedLegendrian {
  MetricModel model;
  LGrid grid;
  GraphSlice slice;
  SliceOptions opts;
  std::vector<std::vector<Crossing>> crossings;  // per ray, ordered by t_star
  std::vector<std::string> warnings;
  // continuous evaluation at arbitrary L-params, selecting a sheet
  std::function<std::vector<Crossing>(const Vec&)> cross_at;

  std::size_t sheet_count() const {
    std::size_t n = crossings.empty() ? 0 : crossings[0].size();
    for (const auto& cs : crossings) n = std::min(n, cs.size());
    return n;
  }
};

inline SlicedLegendrian slice_front(const NullCongruence& nc, const GraphSlice& slice,
                                    const SliceOptions& opts = {}) {
  require(slice.m + 1 == static_cast<int>(nc.nu_tab[0][0].size()),
          "slice_front: slice dimension does not match the chart");
  SlicedLegendrian sl;
  sl.model = nc.model;
  sl.grid = nc.grid;
  sl.slice = slice;
  sl.opts = opts;
  sl.crossings.resize(nc.grid.size());
  for (std::size_t r = 0; r < nc.grid.size(); ++r) {
    if (!nc.rays.empty() && nc.rays[r].failed) continue;
    auto ev = detail::ray_eval_stored(nc, r);
    sl.crossings[r] = detail::ray_crossings(nc.model, slice, nc.tgrid, ev, opts, &sl.warnings,
                                            "ray " + std::to_string(r));
  }
  sl.cross_at = [nc, slice, opts](const Vec& l) {
    std::shared_ptr<Trajectory> keep;
    auto ev = detail::ray_eval_fresh(nc, l, keep);
    return detail::ray_crossings(nc.model, slice, nc.tgrid, ev, opts, nullptr, "off-grid ray");
  };
  return sl;
}

struct TransversalityReport {
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t crossing_count = 0;
  bool pass = true;
};

inline TransversalityReport transversality_check(const SlicedLegendrian& sl) {
  TransversalityReport rep;
  for (const auto& cs : sl.crossings)
    for (const auto& c : cs) {
      rep.min_margin = std::min(rep.min_margin, c.margin);
      ++rep.crossing_count;
    }
  rep.pass = rep.crossing_count > 0 && rep.min_margin >= sl.opts.trans_tol;
  return rep;
}

// Legendrian residual of the sliced map on sheet s:
// max_i |phi . D_i m| / (|phi| |D_i m|), FD over the grid (table mode)
// or re-sliced stencil rays at l +- fd_step e_i.
inline ResidualStat sliced_legendrian_residual(const SlicedLegendrian& sl, std::size_t sheet,
                                               const ResidualOptions& opts = {}) {
  ResidualStat stat;
  const int d = sl.grid.dim();
  const double tiny = 1e-300;
  for (std::size_t r = 0; r < sl.grid.size(); ++r) {
    if (sl.crossings[r].size() <= sheet) continue;
    const Crossing& c = sl.crossings[r][sheet];
    auto idx = sl.grid.unflatten(r);
    Vec l = sl.grid.point(idx);
    for (int i = 0; i < d; ++i) {
      Vec mp, mm;
      double h;
      if (opts.fd_step > 0.0) {
        Vec lp = l, lmv = l;
        lp[i] += opts.fd_step;
        lmv[i] -= opts.fd_step;
        auto cp = sl.cross_at(lp), cm = sl.cross_at(lmv);
        if (cp.size() <= sheet || cm.size() <= sheet) continue;
        mp = cp[sheet].m_params;
        mm = cm[sheet].m_params;
        h = opts.fd_step;
      } else {
        std::vector<int> nbp, nbm;
        if (!sl.grid.neighbor(idx, i, +1, nbp) || !sl.grid.neighbor(idx, i, -1, nbm)) continue;
        std::size_t rp = sl.grid.flatten(nbp), rm = sl.grid.flatten(nbm);
        if (sl.crossings[rp].size() <= sheet || sl.crossings[rm].size() <= sheet) continue;
        mp = sl.crossings[rp][sheet].m_params;
        mm = sl.crossings[rm][sheet].m_params;
        h = sl.grid.axes[i].step;
      }
      Vec Dm = (mp - mm) / (2.0 * h);
      double denom = std::max(c.phi.norm() * Dm.norm(), tiny);
      stat.add(c.phi.dot(Dm) / denom);
    }
  }
  return stat;
}

// Numeric rank of the FD differential of lambda-tilde = (m, direction(phi))
// on sheet s; rank m-1 means the sliced map is a Legendrian immersion.
inline int sliced_rank(const SlicedLegendrian& sl, const std::vector<int>& idx,
                       std::size_t sheet, double rank_tol = 1e-3) {
  const int d = sl.grid.dim();
  std::size_t r = sl.grid.flatten(idx);
  require(sl.crossings[r].size() > sheet, "sliced_rank: sheet missing at sample");
  const int m = sl.slice.m;
  const Crossing& c0 = sl.crossings[r][sheet];
  Vec dir0 = c0.phi.normalized();

  Mat D(2 * m, d);
  for (int i = 0; i < d; ++i) {
    std::vector<int> nbp, nbm;
    bool okp = sl.grid.neighbor(idx, i, +1, nbp);
    bool okm = sl.grid.neighbor(idx, i, -1, nbm);
    std::size_t rp = okp ? sl.grid.flatten(nbp) : r;
    std::size_t rm = okm ? sl.grid.flatten(nbm) : r;
    if (sl.crossings[rp].size() <= sheet) rp = r;
    if (sl.crossings[rm].size() <= sheet) rm = r;
    require(rp != rm, "sliced_rank: no usable neighbors along an axis");
    double h = sl.grid.axes[i].step * ((rp != r) + (rm != r));
    const Crossing& cp = sl.crossings[rp][sheet];
    const Crossing& cm = sl.crossings[rm][sheet];
    Vec ddir = (cp.phi.normalized() - cm.phi.normalized()) / h;
    ddir -= dir0 * dir0.dot(ddir);
    D.col(i) << (cp.m_params - cm.m_params) / h, ddir;
  }
  Eigen::JacobiSVD<Mat> svd(D);
  double smax = svd.singularValues()[0];
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= rank_tol * smax) ++rank;
  return rank;
}

// "l_0,...,l_{m-2},crossing_index,t_star,m_0,...,m_{m-1},phi_0,...,phi_{m-1}"
inline void write_sliced_csv(const SlicedLegendrian& sl, std::ostream& os) {
  const int d = sl.grid.dim();
  const int m = sl.slice.m;
  for (int i = 0; i < d; ++i) os << "l_" << i << ',';
  os << "crossing_index,t_star";
  for (int i = 0; i < m; ++i) os << ",m_" << i;
  for (int i = 0; i < m; ++i) os << ",phi_" << i;
  os << '\n';
  for (std::size_t r = 0; r < sl.grid.size(); ++r) {
    Vec l = sl.grid.point(sl.grid.unflatten(r));
    for (std::size_t s = 0; s < sl.crossings[r].size(); ++s) {
      const Crossing& c = sl.crossings[r][s];
      for (int i = 0; i < d; ++i) put_csv_value(os, l[i], i == 0);
      if (d > 0) os << ',';
      os << s;
      put_csv_value(os, c.t_star, false);
      for (int i = 0; i < m; ++i) put_csv_value(os, c.m_params[i], false);
      for (int i = 0; i < m; ++i) put_csv_value(os, c.phi[i], false);
      os << '\n';
    }
  }
}

}  // namespace nullfront
