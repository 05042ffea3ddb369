#pragma once

// Wavefront construction: null initial field from (mu, lambda-tilde),
// propagation of the congruence nu(l, t) = gamma_l(t), and numerical
// verification that the result is a mapped null hypersurface whose lift
// is an immersion.

#include "nullfront/csv.hpp"
#include "nullfront/geodesic.hpp"
#include "nullfront/legendrian.hpp"

#include <optional>

#include <functional>
#include <ostream>
#include <vector>

namespace nullfront {

// N_l = mu_* X_l + V at mu(lambda(l)); null by the orthogonal splitting
inline Vec initial_null_field(const MetricModel& model, const Immersion& mu,
                              const LegendrianMap& lm, const Vec& l) {
  Vec p = lm.lambda(l);
  Vec x = mu.map(p);
  Mat J = mu.jacobian(p);
  Vec V = unit_future_normal(model, mu, p);
  Vec N = J * lm.X(l) + V;
  double q = inner(model, x, N, N);
  if (std::abs(q) > 1e-10 * N.squaredNorm())
    throw DomainError("initial_null_field: constructed vector is not null (|g(N,N)| = " +
                      std::to_string(std::abs(q)) + "); is X gbar-unit?");
  auto cc = classify(model, x, N);
  if (cc.time_sense != TimeSense::future)
    throw DomainError("initial_null_field: constructed vector is not future pointing");
  return N;
}

struct RayRecord {
  Trajectory traj;
  int k_lo = 0, k_hi = -1;  // covered contiguous index range into tgrid
  bool failed = false;
  std::string error;
};

struct NullCongruence {
  MetricModel model;
  LGrid grid;
  std::vector<double> tgrid;
  std::vector<RayRecord> rays;               // per grid node, lexicographic
  std::vector<std::vector<Vec>> nu_tab;      // [ray][k], valid on [k_lo, k_hi]
  std::vector<std::vector<Vec>> N_tab;
  // evaluators for arbitrary L-params (used by refined-FD residuals);
  // exactly one of ray_at / direct (nu_fn, N_fn) is set
  std::function<Trajectory(const Vec&)> ray_at;
  std::function<Vec(const Vec&, double)> nu_fn, N_fn;

  bool covered(std::size_t ray, int k) const {
    return !rays.empty() ? (k >= rays[ray].k_lo && k <= rays[ray].k_hi) : true;
  }
  const Vec& nu(std::size_t ray, int k) const { return nu_tab[ray][k]; }
  const Vec& N(std::size_t ray, int k) const { return N_tab[ray][k]; }
};

inline NullCongruence build_front(const MetricModel& model, const Immersion& mu,
                                  const LegendrianMap& lm, double t_lo, double t_hi,
                                  int t_steps, const IntegratorConfig& cfg) {
  require(t_lo <= 0.0 && t_hi >= 0.0, "build_front: window must contain 0");
  require(t_steps >= 1, "build_front: need at least one time step");

  NullCongruence nc;
  nc.model = model;
  nc.grid = lm.grid;
  nc.tgrid.resize(t_steps + 1);
  for (int k = 0; k <= t_steps; ++k)
    nc.tgrid[k] = t_lo + (t_hi - t_lo) * k / t_steps;

  nc.ray_at = [model, mu, lm, t_lo, t_hi, cfg](const Vec& l) {
    Vec N0 = initial_null_field(model, mu, lm, l);
    return integrate(model, mu.map(lm.lambda(l)), N0, t_lo, t_hi, cfg);
  };

  const std::size_t nray = nc.grid.size();
  const int K = t_steps;
  nc.rays.resize(nray);
  nc.nu_tab.assign(nray, std::vector<Vec>(K + 1));
  nc.N_tab.assign(nray, std::vector<Vec>(K + 1));
  for (std::size_t r = 0; r < nray; ++r) {
    Vec l = nc.grid.point(nc.grid.unflatten(r));
    RayRecord& rec = nc.rays[r];
    try {
      rec.traj = nc.ray_at(l);
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
      continue;
    }
    rec.k_lo = K + 1;
    rec.k_hi = -1;
    for (int k = 0; k <= K; ++k) {
      if (!rec.traj.covers(nc.tgrid[k])) continue;
      auto s = rec.traj.sample(nc.tgrid[k]);
      nc.nu_tab[r][k] = s.x;
      nc.N_tab[r][k] = s.v;
      rec.k_lo = std::min(rec.k_lo, k);
      rec.k_hi = std::max(rec.k_hi, k);
    }
  }
  return nc;
}

// Congruence given directly as nu(l, t) with its own null field (e.g. the
// degenerate projected-curve example); bypasses the geodesic build.
inline NullCongruence make_direct_congruence(const MetricModel& model, const LGrid& grid,
                                             std::vector<double> tgrid,
                                             std::function<Vec(const Vec&, double)> nu_fn,
                                             std::function<Vec(const Vec&, double)> N_fn) {
  NullCongruence nc;
  nc.model = model;
  nc.grid = grid;
  nc.tgrid = std::move(tgrid);
  nc.nu_fn = std::move(nu_fn);
  nc.N_fn = std::move(N_fn);
  const std::size_t nray = grid.size();
  const int K = static_cast<int>(nc.tgrid.size()) - 1;
  nc.nu_tab.assign(nray, std::vector<Vec>(K + 1));
  nc.N_tab.assign(nray, std::vector<Vec>(K + 1));
  for (std::size_t r = 0; r < nray; ++r) {
    Vec l = grid.point(grid.unflatten(r));
    for (int k = 0; k <= K; ++k) {
      nc.nu_tab[r][k] = nc.nu_fn(l, nc.tgrid[k]);
      nc.N_tab[r][k] = nc.N_fn(l, nc.tgrid[k]);
    }
  }
  return nc;
}

struct ResidualStat {
  double max = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    max = std::max(max, std::abs(v));
    sum_sq += v * v;
    ++count;
  }
  double rms() const { return count ? std::sqrt(sum_sq / count) : 0.0; }
};

struct FrontResidualReport {
  ResidualStat orth;      // |g(N, D_l nu)| / (|N| |D_l nu|)
  ResidualStat null_dev;  // |g(N, N)| / |N|^2
  ResidualStat tangency;  // |D_t nu - N| / |N|
};

struct ResidualOptions {
  // <= 0: FD tangents over the L-grid spacing from the stored tables.
  // > 0: stencil rays at l +- fd_step e_i evaluated on demand.
  double fd_step = 0.0;
};

namespace detail {

// sample nu over the congruence's time grid for an arbitrary L-point
inline std::vector<std::optional<Vec>> stencil_nu(const NullCongruence& nc, const Vec& l) {
  std::vector<std::optional<Vec>> out(nc.tgrid.size());
  if (nc.nu_fn) {
    for (std::size_t k = 0; k < nc.tgrid.size(); ++k) out[k] = nc.nu_fn(l, nc.tgrid[k]);
    return out;
  }
  Trajectory traj = nc.ray_at(l);
  for (std::size_t k = 0; k < nc.tgrid.size(); ++k)
    if (traj.covers(nc.tgrid[k])) out[k] = traj.sample(nc.tgrid[k]).x;
  return out;
}

}  // namespace detail

inline FrontResidualReport mapped_null_residual(const NullCongruence& nc,
                                                const ResidualOptions& opts = {}) {
  FrontResidualReport rep;
  const int d = nc.grid.dim();
  const int K = static_cast<int>(nc.tgrid.size()) - 1;
  const std::size_t nray = nc.grid.size();
  const double tiny = 1e-300;

  // refined-FD stencils: per ray and axis, nu at l +- fd_step e_i
  for (std::size_t r = 0; r < nray; ++r) {
    if (!nc.rays.empty() && nc.rays[r].failed) continue;
    auto idx = nc.grid.unflatten(r);
    Vec l = nc.grid.point(idx);

    std::vector<std::vector<std::optional<Vec>>> sp(d), sm(d);  // [axis][k]
    std::vector<double> hstep(d);
    bool usable_axis_all = true;
    for (int i = 0; i < d; ++i) {
      if (opts.fd_step > 0.0) {
        hstep[i] = opts.fd_step;
        Vec lp = l, lmv = l;
        lp[i] += opts.fd_step;
        lmv[i] -= opts.fd_step;
        sp[i] = detail::stencil_nu(nc, lp);
        sm[i] = detail::stencil_nu(nc, lmv);
      } else {
        hstep[i] = nc.grid.axes[i].step;
        std::vector<int> nbp, nbm;
        if (!nc.grid.neighbor(idx, i, +1, nbp) || !nc.grid.neighbor(idx, i, -1, nbm)) {
          usable_axis_all = false;
          continue;
        }
        std::size_t rp = nc.grid.flatten(nbp), rm = nc.grid.flatten(nbm);
        if (!nc.rays.empty() && (nc.rays[rp].failed || nc.rays[rm].failed)) {
          usable_axis_all = false;
          continue;
        }
        sp[i].resize(K + 1);
        sm[i].resize(K + 1);
        for (int k = 0; k <= K; ++k) {
          if (nc.covered(rp, k)) sp[i][k] = nc.nu(rp, k);
          if (nc.covered(rm, k)) sm[i][k] = nc.nu(rm, k);
        }
      }
    }
    if (!usable_axis_all && opts.fd_step <= 0.0) continue;  // grid-edge ray

    for (int k = 0; k <= K; ++k) {
      if (!nc.covered(r, k)) continue;
      const Vec& N = nc.N(r, k);
      const Vec& nu = nc.nu(r, k);
      double nN = N.norm();
      Mat G = metric_at(nc.model, nu);
      rep.null_dev.add(N.dot(G * N) / std::max(N.squaredNorm(), tiny));
      for (int i = 0; i < d; ++i) {
        if (!sp[i].size() || !sp[i][k] || !sm[i][k]) continue;
        Vec Dnu = (*sp[i][k] - *sm[i][k]) / (2.0 * hstep[i]);
        double denom = std::max(nN * Dnu.norm(), tiny);
        rep.orth.add(N.dot(G * Dnu) / std::max(denom, nN * nN * 1e-14));
      }
      // tangency: D_t nu vs stored N over the shared time grid
      if (k > 0 && k < K && nc.covered(r, k - 1) && nc.covered(r, k + 1)) {
        double dt = nc.tgrid[k + 1] - nc.tgrid[k - 1];
        Vec Dt = (nc.nu(r, k + 1) - nc.nu(r, k - 1)) / dt;
        rep.tangency.add((Dt - N).norm() / std::max(nN, tiny));
      }
    }
  }
  return rep;
}

struct Lift {
  Vec point;      // nu(l, t)
  Vec direction;  // N / |N| (Euclidean normalization)
  Vec covector;   // G(nu) N
};

inline Lift lift(const NullCongruence& nc, std::size_t ray, int k) {
  require(nc.covered(ray, k), "lift: (l, t) not covered");
  const Vec& N = nc.N(ray, k);
  Mat G = metric_at(nc.model, nc.nu(ray, k));
  return {nc.nu(ray, k), N / N.norm(), G * N};
}

// Numeric rank of the FD differential of nu-tilde = (nu, direction(N)):
// the t-direction plus the L-directions, direction rows projected
// orthogonal to the direction itself. Rank m means immersion point.
inline int lift_rank(const NullCongruence& nc, const std::vector<int>& idx, int k,
                     double rank_tol = 1e-3) {
  const int d = nc.grid.dim();
  const int n = static_cast<int>(nc.nu(0, 0).size());
  std::size_t r = nc.grid.flatten(idx);
  require(nc.covered(r, k), "lift_rank: sample not covered");
  const int K = static_cast<int>(nc.tgrid.size()) - 1;

  Vec dir0 = nc.N(r, k).normalized();
  auto dir_at = [&](std::size_t ray, int kk) { return Vec(nc.N(ray, kk).normalized()); };

  Mat D(2 * n, d + 1);
  // t-column: D_t nu = N exactly; direction by FD over the time grid
  {
    int km = std::max(k - 1, 0), kp = std::min(k + 1, K);
    while (!nc.covered(r, km) && km < k) ++km;
    while (!nc.covered(r, kp) && kp > k) --kp;
    require(kp > km, "lift_rank: no time neighbors covered");
    Vec ddir = (dir_at(r, kp) - dir_at(r, km)) / (nc.tgrid[kp] - nc.tgrid[km]);
    D.col(0) << nc.N(r, k), ddir;
  }
  for (int i = 0; i < d; ++i) {
    std::vector<int> nbp, nbm;
    bool okp = nc.grid.neighbor(idx, i, +1, nbp);
    bool okm = nc.grid.neighbor(idx, i, -1, nbm);
    require(okp || okm, "lift_rank: isolated grid point along an axis");
    std::size_t rp = okp ? nc.grid.flatten(nbp) : r;
    std::size_t rm = okm ? nc.grid.flatten(nbm) : r;
    if (!nc.covered(rp, k)) rp = r;
    if (!nc.covered(rm, k)) rm = r;
    require(rp != rm, "lift_rank: no covered neighbors along an axis");
    double h = nc.grid.axes[i].step * ((rp != r) + (rm != r));
    Vec dnu = (nc.nu(rp, k) - nc.nu(rm, k)) / h;
    Vec ddir = (dir_at(rp, k) - dir_at(rm, k)) / h;
    D.col(i + 1) << dnu, ddir;
  }
  // project direction rows orthogonal to the direction
  for (int c = 0; c < d + 1; ++c) {
    Vec rows = D.col(c).tail(n);
    D.col(c).tail(n) = rows - dir0 * dir0.dot(rows);
  }
  Eigen::JacobiSVD<Mat> svd(D);
  double smax = svd.singularValues()[0];
  if (smax == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= rank_tol * smax) ++rank;
  return rank;
}

// CSV export: "l_0,...,l_{m-2},t,nu_0,...,nu_m,N_0,...,N_m", lexicographic
// grid order, uncovered (l, t) pairs skipped.
inline void write_front_csv(const NullCongruence& nc, std::ostream& os) {
  const int d = nc.grid.dim();
  const int n = static_cast<int>(nc.nu_tab[0][0].size());
  for (int i = 0; i < d; ++i) os << "l_" << i << ',';
  os << 't';
  for (int i = 0; i < n; ++i) os << ",nu_" << i;
  for (int i = 0; i < n; ++i) os << ",N_" << i;
  os << '\n';
  for (std::size_t r = 0; r < nc.grid.size(); ++r) {
    if (!nc.rays.empty() && nc.rays[r].failed) continue;
    Vec l = nc.grid.point(nc.grid.unflatten(r));
    for (int k = 0; k < static_cast<int>(nc.tgrid.size()); ++k) {
      if (!nc.covered(r, k)) continue;
      for (int i = 0; i < d; ++i) put_csv_value(os, l[i], i == 0);
      put_csv_value(os, nc.tgrid[k], d == 0);
      for (int i = 0; i < n; ++i) put_csv_value(os, nc.nu(r, k)[i], false);
      for (int i = 0; i < n; ++i) put_csv_value(os, nc.N(r, k)[i], false);
      os << '\n';
    }
  }
}

}  // namespace nullfront
