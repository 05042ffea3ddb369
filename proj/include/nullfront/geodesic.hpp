#pragma once

// Geodesic integration: x' = v, (v^k)' = -Gamma^k_{ij} v^i v^j, solved by
// an adaptive Dormand-Prince 5(4) pair integrated outward from t = 0 in
// both directions, with per-interval cubic Hermite dense output.

#include "nullfront/chart.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace nullfront {

struct GeodesicState {
  Vec x;
  Vec v;
};

inline GeodesicState geodesic_rhs(const MetricModel& model, const GeodesicState& s) {
  const int n = model.n();
  Christoffel gamma = christoffel(model, s.x);
  Vec a = Vec::Zero(n);
  for (int k = 0; k < n; ++k) a[k] = -s.v.dot(gamma.comp[k] * s.v);
  return {s.v, a};
}

enum class Termination {
  window_end,
  step_underflow,
  non_finite,
  left_validity_box,
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::window_end: return "window_end";
    case Termination::step_underflow: return "step_underflow";
    case Termination::non_finite: return "non_finite";
    case Termination::left_validity_box: return "left_validity_box";
  }
  return "?";
}

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.2;
  double initial_step = 0.05;
  long max_steps = 200000;
  bool renormalize_null = false;
  // optional coordinate validity box for x
  std::optional<Vec> box_lo, box_hi;
};

class Trajectory {
 public:
  // nodes sorted by t ascending; node 0 of the forward sweep is t = 0
  std::vector<double> ts;
  std::vector<GeodesicState> states;
  std::vector<GeodesicState> derivs;  // (v, a) at each node
  Termination term_forward = Termination::window_end;
  Termination term_backward = Termination::window_end;
  double renorm_accum = 0.0;  // total null-projection magnitude applied

  double t_min() const { return ts.front(); }
  double t_max() const { return ts.back(); }
  bool covers(double t) const { return t >= t_min() && t <= t_max(); }

  GeodesicState sample(double t) const {
    if (!covers(t))
      throw DomainError("Trajectory::sample: t = " + std::to_string(t) +
                        " outside covered range [" + std::to_string(t_min()) + ", " +
                        std::to_string(t_max()) + "]");
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t hi = std::min<std::size_t>(it - ts.begin(), ts.size() - 1);
    std::size_t lo = hi == 0 ? 0 : hi - 1;
    if (ts[lo] == t) return states[lo];
    if (ts[hi] == t) return states[hi];
    double h = ts[hi] - ts[lo];
    double s = (t - ts[lo]) / h;
    auto hermite = [&](const Vec& y0, const Vec& y1, const Vec& d0, const Vec& d1) {
      double s2 = s * s, s3 = s2 * s;
      double h00 = 2 * s3 - 3 * s2 + 1;
      double h10 = s3 - 2 * s2 + s;
      double h01 = -2 * s3 + 3 * s2;
      double h11 = s3 - s2;
      return Vec(h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1);
    };
    return {hermite(states[lo].x, states[hi].x, derivs[lo].x, derivs[hi].x),
            hermite(states[lo].v, states[hi].v, derivs[lo].v, derivs[hi].v)};
  }
};

namespace detail {

struct DormandPrince {
  static constexpr int stages = 7;
  // classic DOPRI5 tableau
  static const double* a(int row) {
    static const double a2[] = {1.0 / 5};
    static const double a3[] = {3.0 / 40, 9.0 / 40};
    static const double a4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
    static const double a5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
    static const double a6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                                -5103.0 / 18656};
    static const double a7[] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
                                11.0 / 84};
    static const double* rows[] = {nullptr, a2, a3, a4, a5, a6, a7};
    return rows[row];
  }
  static const double* b5() { return a(6); }  // FSAL: 5th-order weights
  static const double* b4() {
    static const double b[] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
    return b;
  }
};

inline Vec pack(const GeodesicState& s) {
  Vec y(s.x.size() * 2);
  y << s.x, s.v;
  return y;
}

inline GeodesicState unpack(const Vec& y) {
  Eigen::Index n = y.size() / 2;
  return {y.head(n), y.tail(n)};
}

// rescale the time component of v so g(v, v) = 0, choosing the quadratic
// root closest to 1; returns |s - 1| * |v_t| (the projection magnitude)
inline double project_null(const MetricModel& model, const Vec& x, Vec& v) {
  const int m = model.dim;
  Mat g = metric_at(model, x);
  double vt = v[m];
  if (vt == 0.0) return 0.0;
  Vec w = v;
  w[m] = 0.0;
  Vec et = Vec::Zero(model.n());
  et[m] = 1.0;
  double A = vt * vt * et.dot(g * et);
  double B = vt * w.dot(g * et);
  double C = w.dot(g * w);
  // q(s) = A s^2 + 2 B s + C
  double disc = B * B - A * C;
  if (disc < 0.0 || A == 0.0) return 0.0;  // cannot project; leave v alone
  double r1 = (-B + std::sqrt(disc)) / A;
  double r2 = (-B - std::sqrt(disc)) / A;
  double s = std::abs(r1 - 1.0) <= std::abs(r2 - 1.0) ? r1 : r2;
  v[m] = s * vt;
  return std::abs(s - 1.0) * std::abs(vt);
}

}  // namespace detail

inline Trajectory integrate(const MetricModel& model, const Vec& x0, const Vec& v0,
                            double t_lo, double t_hi, const IntegratorConfig& cfg) {
  require(t_lo <= 0.0 && t_hi >= 0.0, "integrate: window must contain 0");
  require(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0 && cfg.abs_tol > 0.0 && cfg.abs_tol < 1.0,
          "integrate: tolerances must lie in (0, 1)");
  require(all_finite(x0) && all_finite(v0), "integrate: non-finite initial data");
  require(x0.size() == model.n() && v0.size() == model.n(),
          "integrate: dimension mismatch");

  auto rhs = [&](const Vec& y) {
    GeodesicState s = detail::unpack(y);
    return detail::pack(geodesic_rhs(model, s));
  };
  auto in_box = [&](const Vec& x) {
    if (!cfg.box_lo || !cfg.box_hi) return true;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < (*cfg.box_lo)[i] || x[i] > (*cfg.box_hi)[i]) return false;
    return true;
  };

  struct Node {
    double t;
    Vec y, f;
  };

  double renorm_accum = 0.0;

  // one-directional sweep from t = 0 to t_end; returns nodes past t = 0
  auto sweep = [&](double t_end, std::vector<Node>& out) -> Termination {
    double dir = t_end >= 0.0 ? 1.0 : -1.0;
    double t = 0.0;
    Vec y = detail::pack({x0, v0});
    Vec f = rhs(y);
    if (dir > 0) out.push_back({t, y, f});
    if (t_end == 0.0) return Termination::window_end;
    double h = dir * std::min(std::abs(cfg.initial_step), cfg.max_step);
    long steps = 0;
    while (dir * (t_end - t) > 0.0) {
      if (++steps > cfg.max_steps) return Termination::step_underflow;
      if (dir * (t + h) > dir * t_end) h = t_end - t;
      if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
        return Termination::step_underflow;

      Vec k[7];
      k[0] = f;
      bool finite = true;
      for (int s = 1; s < 7 && finite; ++s) {
        Vec ys = y;
        const double* arow = detail::DormandPrince::a(s);
        for (int j = 0; j < s; ++j) ys += h * arow[j] * k[j];
        if (!all_finite(ys)) { finite = false; break; }
        try {
          k[s] = rhs(ys);
        } catch (const Error&) {
          finite = false;
        }
      }
      if (!finite) {
        // shrink and retry; below underflow threshold the loop terminates
        h *= 0.5;
        continue;
      }
      Vec y5 = y;
      Vec err = Vec::Zero(y.size());
      const double* b5 = detail::DormandPrince::b5();
      const double* b4 = detail::DormandPrince::b4();
      for (int s = 0; s < 7; ++s) {
        if (s < 6) y5 += h * b5[s] * k[s];
        err += h * (  (s < 6 ? b5[s] : 0.0) - b4[s]) * k[s];
      }
      if (!all_finite(y5)) {
        h *= 0.5;
        continue;
      }
      double errnorm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        errnorm = std::max(errnorm, std::abs(err[i]) / sc);
      }
      if (errnorm <= 1.0) {
        t += h;
        y = y5;
        if (cfg.renormalize_null) {
          GeodesicState s = detail::unpack(y);
          renorm_accum += detail::project_null(model, s.x, s.v);
          y = detail::pack(s);
        }
        try {
          f = rhs(y);
        } catch (const Error&) {
          return Termination::non_finite;
        }
        if (!all_finite(f)) return Termination::non_finite;
        out.push_back({t, y, f});
        GeodesicState s = detail::unpack(y);
        if (!in_box(s.x)) return Termination::left_validity_box;
      }
      double fac = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      if (std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
    }
    return Termination::window_end;
  };

  std::vector<Node> fwd, bwd;
  Termination tf = sweep(t_hi, fwd);
  Termination tb = sweep(t_lo, bwd);

  Trajectory traj;
  traj.term_forward = tf;
  traj.term_backward = tb;
  traj.renorm_accum = renorm_accum;
  for (auto it = bwd.rbegin(); it != bwd.rend(); ++it) {
    traj.ts.push_back(it->t);
    traj.states.push_back(detail::unpack(it->y));
    traj.derivs.push_back(detail::unpack(it->f));
  }
  for (const auto& node : fwd) {
    traj.ts.push_back(node.t);
    traj.states.push_back(detail::unpack(node.y));
    traj.derivs.push_back(detail::unpack(node.f));
  }
  return traj;
}

// exp_x(v) = gamma_v(1)
inline Vec exp_map(const MetricModel& model, const Vec& x, const Vec& v,
                   const IntegratorConfig& cfg = {}) {
  Trajectory traj = integrate(model, x, v, 0.0, 1.0, cfg);
  if (!traj.covers(1.0))
    throw DomainError("exp_map: v outside the numerically reachable star-convex domain (" +
                      std::string(to_string(traj.term_forward)) + ")");
  return traj.sample(1.0).x;
}

}  // namespace nullfront
