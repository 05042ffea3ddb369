#pragma once

// Scenario library: JSON-configured pipeline runs (null cones, saucers,
// explicit fronts, the degenerate projected-curve example), geometric
// fits, cusp-locus detection, and the invariant report.

#include "nullfront/metric_program.hpp"
#include "nullfront/slicer.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace nullfront {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- fitting

struct SphereFit {
  Vec center;
  double radius = 0.0;
  double rms = 0.0;  // RMS of |x - c| - r
};

// Kasa linear least squares: |x|^2 = 2 c.x + (r^2 - |c|^2)
inline SphereFit fit_sphere(const std::vector<Vec>& pts) {
  require(!pts.empty(), "fit_sphere: no points");
  const int n = static_cast<int>(pts[0].size());
  require(static_cast<int>(pts.size()) > n, "fit_sphere: need more points than dimensions");
  Mat A(pts.size(), n + 1);
  Vec b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    A.row(i).head(n) = 2.0 * pts[i].transpose();
    A(i, n) = 1.0;
    b[i] = pts[i].squaredNorm();
  }
  Vec sol = A.colPivHouseholderQr().solve(b);
  SphereFit fit;
  fit.center = sol.head(n);
  fit.radius = std::sqrt(std::max(0.0, sol[n] + fit.center.squaredNorm()));
  double ss = 0.0;
  for (const Vec& p : pts) {
    double d = (p - fit.center).norm() - fit.radius;
    ss += d * d;
  }
  fit.rms = std::sqrt(ss / pts.size());
  return fit;
}

struct CircleFit {
  Vec center;           // in the (x0, x1) plane
  double radius = 0.0;
  double height = 0.0;  // mean x2
  double rms = 0.0;
};

// horizontal circle fit for 3-d points: mean height + planar Kasa fit
inline CircleFit fit_horizontal_circle(const std::vector<Vec>& pts) {
  require(!pts.empty(), "fit_horizontal_circle: no points");
  std::vector<Vec> planar;
  double h = 0.0;
  for (const Vec& p : pts) {
    planar.push_back(p.head(2));
    h += p[2];
  }
  SphereFit s = fit_sphere(planar);
  CircleFit c;
  c.center = s.center;
  c.radius = s.radius;
  c.height = h / pts.size();
  c.rms = s.rms;
  return c;
}

// ------------------------------------------------------------ saucer data

// Rotationally symmetric profile in the (rho, z) half-plane of the t = 0
// slice: p(u) = (1 - u^2, b u^k), k odd, with unit contact normal
// n(u) = (b k u^{k-2}, 2) / |.| chosen so n(0) = (0, 1).
struct SaucerProfile {
  double b = 0.8;
  int k = 5;

  Vec profile(double u) const {
    Vec p(2);
    p << 1.0 - u * u, b * std::pow(u, k);
    return p;
  }
  Vec normal(double u) const {
    Vec n(2);
    n << b * k * std::pow(u, k - 2), 2.0;
    return n.normalized();
  }
};

inline LegendrianMap saucer_legendrian(const SaucerProfile& prof, const Immersion& host,
                                       const LGrid& grid) {
  require(host.m == 3, "saucer_legendrian: lives in the m = 3 slice");
  auto lambda = [prof](const Vec& l) {
    Vec p = prof.profile(l[0]);
    Vec out(3);
    out << p[0] * std::cos(l[1]), p[0] * std::sin(l[1]), p[1];
    return out;
  };
  auto X = [prof](const Vec& l) {
    Vec n = prof.normal(l[0]);
    Vec out(3);
    out << n[0] * std::cos(l[1]), n[0] * std::sin(l[1]), n[1];
    return out;
  };
  return LegendrianMap{grid, host, lambda, X};
}

// -------------------------------------------------------- cusp detection

struct CuspPoint {
  Vec l;        // refined L-params
  Vec m_params; // slice-base coordinates of the refined crossing
};

// Grid points of sheet `sheet` where sigma_min of the FD differential of
// the base map drops below cusp_tol * sigma_max; each flagged point walks
// along grid lines to the discrete minimum of sigma_min and is refined by
// parabolic minimization there.
inline std::vector<CuspPoint> detect_cusp_locus(const SlicedLegendrian& sl, std::size_t sheet,
                                                double cusp_tol = 0.05) {
  const int d = sl.grid.dim();
  const int m = sl.slice.m;
  const std::size_t nn = sl.grid.size();
  std::vector<double> smin(nn, -1.0), ratio(nn, -1.0);

  auto has = [&](std::size_t r) { return sl.crossings[r].size() > sheet; };
  for (std::size_t r = 0; r < nn; ++r) {
    if (!has(r)) continue;
    auto idx = sl.grid.unflatten(r);
    Mat D(m, d);
    bool ok = true;
    for (int i = 0; i < d && ok; ++i) {
      std::vector<int> nbp, nbm;
      if (!sl.grid.neighbor(idx, i, +1, nbp) || !sl.grid.neighbor(idx, i, -1, nbm)) {
        ok = false;
        break;
      }
      std::size_t rp = sl.grid.flatten(nbp), rm = sl.grid.flatten(nbm);
      if (!has(rp) || !has(rm)) {
        ok = false;
        break;
      }
      D.col(i) = (sl.crossings[rp][sheet].m_params - sl.crossings[rm][sheet].m_params) /
                 (2.0 * sl.grid.axes[i].step);
    }
    if (!ok) continue;
    Eigen::JacobiSVD<Mat> svd(D);
    smin[r] = svd.singularValues().tail(1)[0];
    ratio[r] = svd.singularValues()[0] > 0.0 ? smin[r] / svd.singularValues()[0] : 0.0;
  }

  std::set<std::size_t> minima;
  for (std::size_t r = 0; r < nn; ++r) {
    if (ratio[r] < 0.0 || ratio[r] > cusp_tol) continue;
    // walk to the discrete local minimum of sigma_min along grid lines
    std::size_t cur = r;
    for (std::size_t guard = 0; guard < nn; ++guard) {
      auto idx = sl.grid.unflatten(cur);
      std::size_t best = cur;
      for (int i = 0; i < d; ++i)
        for (int dir : {-1, +1}) {
          std::vector<int> nb;
          if (!sl.grid.neighbor(idx, i, dir, nb)) continue;
          std::size_t rn = sl.grid.flatten(nb);
          if (smin[rn] >= 0.0 && smin[rn] < smin[best]) best = rn;
        }
      if (best == cur) break;
      cur = best;
    }
    minima.insert(cur);
  }

  std::vector<CuspPoint> out;
  for (std::size_t r : minima) {
    auto idx = sl.grid.unflatten(r);
    Vec l = sl.grid.point(idx);
    for (int i = 0; i < d; ++i) {
      std::vector<int> nbp, nbm;
      if (!sl.grid.neighbor(idx, i, +1, nbp) || !sl.grid.neighbor(idx, i, -1, nbm)) continue;
      double sp = smin[sl.grid.flatten(nbp)], sm = smin[sl.grid.flatten(nbm)];
      double s0 = smin[r];
      if (sp < 0.0 || sm < 0.0 || s0 > sp || s0 > sm) continue;
      double curv = sm - 2.0 * s0 + sp;
      if (curv <= 0.0) continue;
      double delta = 0.5 * sl.grid.axes[i].step * (sm - sp) / curv;
      delta = std::clamp(delta, -sl.grid.axes[i].step, sl.grid.axes[i].step);
      l[i] += delta;
    }
    CuspPoint cp;
    cp.l = l;
    auto crossings = sl.cross_at(l);
    if (crossings.size() > sheet)
      cp.m_params = crossings[sheet].m_params;
    else
      cp.m_params = sl.crossings[r][sheet].m_params;
    out.push_back(std::move(cp));
  }
  return out;
}

// ------------------------------------------------------------- scenarios

struct WindowSpec {
  double t_min = 0.0, t_max = 1.0;
  int steps = 20;
};

struct Scenario {
  std::string name;
  std::string kind;  // cone | saucer | front | degenerate
  MetricProgram metric;
  MetricModel model;
  int m = 0;
  GraphSlice surface;

  std::string leg_type;  // fiber | explicit | saucer_profile
  Vec fiber_point;
  SaucerProfile profile;
  std::vector<ExprPtr> lambda_exprs, X_exprs;
  Env leg_params;

  WindowSpec window;
  LGrid grid;
  IntegratorConfig integ;
  std::vector<GraphSlice> slices;
  std::map<std::string, double> thresholds;
  double residual_fd_step = 0.0;
  double cusp_tol = 0.05;
  double rank_tol = 1e-3;

  double threshold(const std::string& key, double fallback) const {
    auto it = thresholds.find(key);
    return it != thresholds.end() ? it->second : fallback;
  }
};

namespace detail {

inline std::vector<ExprPtr> parse_expr_list(const nlohmann::json& arr, int nvars,
                                            const Env& params) {
  std::set<std::string> ok;
  for (int i = 0; i < nvars; ++i) ok.insert("l" + std::to_string(i));
  for (const auto& [k, _] : params) ok.insert(k);
  std::vector<ExprPtr> out;
  for (const auto& s : arr) out.push_back(parse_expr(s.get<std::string>(), &ok));
  return out;
}

inline Vec to_vec(const nlohmann::json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

inline Env to_env(const nlohmann::json& obj) {
  Env env;
  for (auto it = obj.begin(); it != obj.end(); ++it) env[it.key()] = it.value().get<double>();
  return env;
}

}  // namespace detail

inline Scenario load_scenario(const nlohmann::json& cfg) {
  Scenario sc;
  sc.name = cfg.value("name", "unnamed");
  sc.kind = cfg.at("scenario").get<std::string>();

  const auto& mj = cfg.at("metric");
  std::string mtype = mj.value("type", "program");
  sc.m = mj.at("m").get<int>();
  if (mtype == "minkowski") {
    sc.metric = minkowski_program(sc.m);
  } else if (mtype == "program") {
    sc.metric.dim = sc.m;
    if (mj.contains("params")) sc.metric.params = detail::to_env(mj.at("params"));
    for (auto it = mj.at("entries").begin(); it != mj.at("entries").end(); ++it) {
      int i, j;
      if (std::sscanf(it.key().c_str(), "%d,%d", &i, &j) != 2)
        throw DomainError("metric entry key must be \"i,j\": " + it.key());
      sc.metric.set_entry(i, j, it.value().get<std::string>());
    }
    if (mj.contains("derivs"))
      for (auto kt = mj.at("derivs").begin(); kt != mj.at("derivs").end(); ++kt) {
        int k = std::stoi(kt.key());
        for (auto it = kt.value().begin(); it != kt.value().end(); ++it) {
          int i, j;
          if (std::sscanf(it.key().c_str(), "%d,%d", &i, &j) != 2)
            throw DomainError("derivative key must be \"i,j\": " + it.key());
          sc.metric.set_deriv(k, i, j, it.value().get<std::string>());
        }
      }
    if (cfg.contains("orientation")) {
      auto ok = MetricProgram::allowed_names(sc.m, sc.metric.params);
      for (const auto& s : cfg.at("orientation"))
        sc.metric.orientation_exprs.push_back(parse_expr(s.get<std::string>(), &ok));
    }
    if (mj.contains("sample_points"))
      for (const auto& p : mj.at("sample_points"))
        sc.metric.sample_points.push_back(detail::to_vec(p));
  } else {
    throw DomainError("unknown metric type: " + mtype);
  }
  sc.model = compile_metric(sc.metric);

  if (cfg.contains("surface")) {
    const auto& sj = cfg.at("surface");
    sc.surface = GraphSlice::from_text(sc.m, sj.at("f").get<std::string>(),
                                       sj.contains("params") ? detail::to_env(sj.at("params"))
                                                             : Env{});
  } else {
    sc.surface = GraphSlice::from_text(sc.m, "0");
  }

  const auto& wj = cfg.at("window");
  sc.window = {wj.at("t_min").get<double>(), wj.at("t_max").get<double>(),
               wj.at("steps").get<int>()};

  const auto& gj = cfg.at("l_grid");
  if (gj.contains("type")) {
    std::string gt = gj.at("type").get<std::string>();
    if (gt == "circle")
      sc.grid = circle_grid(gj.at("count").get<int>());
    else if (gt == "sphere")
      sc.grid = sphere_grid(gj.at("n_colat").get<int>(), gj.at("n_lon").get<int>());
    else
      throw DomainError("unknown l_grid type: " + gt);
  } else {
    for (const auto& aj : gj.at("axes"))
      sc.grid.axes.push_back({aj.at("start").get<double>(), aj.at("step").get<double>(),
                              aj.at("count").get<int>(), aj.value("periodic", false)});
  }

  if (cfg.contains("legendrian")) {
    const auto& lj = cfg.at("legendrian");
    sc.leg_type = lj.at("type").get<std::string>();
    if (sc.leg_type == "fiber") {
      sc.fiber_point = detail::to_vec(lj.at("point"));
    } else if (sc.leg_type == "saucer_profile") {
      sc.profile.b = lj.value("b", 0.8);
      sc.profile.k = lj.value("k", 5);
    } else if (sc.leg_type == "explicit") {
      sc.leg_params = lj.contains("params") ? detail::to_env(lj.at("params")) : Env{};
      sc.lambda_exprs = detail::parse_expr_list(lj.at("lambda"), sc.grid.dim(), sc.leg_params);
      sc.X_exprs = detail::parse_expr_list(lj.at("X"), sc.grid.dim(), sc.leg_params);
    } else {
      throw DomainError("unknown legendrian type: " + sc.leg_type);
    }
  } else {
    require(sc.kind == "degenerate", "config needs a legendrian section");
  }

  if (cfg.contains("integrator")) {
    const auto& ij = cfg.at("integrator");
    sc.integ.rel_tol = ij.value("rel_tol", sc.integ.rel_tol);
    sc.integ.abs_tol = ij.value("abs_tol", sc.integ.abs_tol);
    sc.integ.max_step = ij.value("max_step", sc.integ.max_step);
    sc.integ.initial_step = ij.value("initial_step", sc.integ.initial_step);
    sc.integ.max_steps = ij.value("max_steps", sc.integ.max_steps);
    sc.integ.renormalize_null = ij.value("renormalize_null", sc.integ.renormalize_null);
  }

  if (cfg.contains("slices"))
    for (const auto& sj : cfg.at("slices"))
      sc.slices.push_back(GraphSlice::from_text(
          sc.m, sj.at("f").get<std::string>(),
          sj.contains("params") ? detail::to_env(sj.at("params")) : Env{}));

  if (cfg.contains("thresholds"))
    for (auto it = cfg.at("thresholds").begin(); it != cfg.at("thresholds").end(); ++it)
      sc.thresholds[it.key()] = it.value().get<double>();
  sc.residual_fd_step = cfg.value("residual_fd_step", 0.0);
  sc.cusp_tol = cfg.value("cusp_tol", 0.05);
  sc.rank_tol = cfg.value("rank_tol", 1e-3);
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file: " + path);
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config parse error in " + path + ": " + e.what());
  }
  try {
    return load_scenario(cfg);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("config schema error in " + path + ": " + e.what());
  }
}

// --------------------------------------------------------------- running

struct Check {
  std::string name;
  double max = 0.0;
  double rms = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunResult {
  std::string scenario;
  std::vector<Check> checks;
  NullCongruence nc;
  std::vector<SlicedLegendrian> sliced;
  std::vector<std::vector<CuspPoint>> cusp_loci;  // per slice, saucer kind
  std::vector<std::string> warnings;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(const std::string& name, double max, double rms, double threshold) {
    checks.push_back({name, max, rms, threshold, max <= threshold});
  }
};

inline LegendrianMap build_legendrian(const Scenario& sc, const Immersion& host) {
  if (sc.leg_type == "fiber") return fiber_legendrian(sc.model, host, sc.fiber_point, sc.grid);
  if (sc.leg_type == "saucer_profile") return saucer_legendrian(sc.profile, host, sc.grid);
  if (sc.leg_type == "explicit") {
    const int d = sc.grid.dim();
    auto eval_list = [d, params = sc.leg_params](const std::vector<ExprPtr>& exprs,
                                                 const Vec& l) {
      Env env = params;
      for (int i = 0; i < d; ++i) env["l" + std::to_string(i)] = l[i];
      Vec out(exprs.size());
      for (std::size_t i = 0; i < exprs.size(); ++i) out[i] = eval_expr(exprs[i], env);
      return out;
    };
    auto lambda = [le = sc.lambda_exprs, eval_list](const Vec& l) { return eval_list(le, l); };
    auto X = [xe = sc.X_exprs, eval_list](const Vec& l) { return eval_list(xe, l); };
    return LegendrianMap{sc.grid, host, lambda, X};
  }
  throw DomainError("unknown legendrian type: " + sc.leg_type);
}

inline NullCongruence build_congruence(const Scenario& sc) {
  if (sc.kind == "degenerate") {
    const int n = sc.m + 1;
    auto nu = [n](const Vec&, double t) {
      Vec x = Vec::Zero(n);
      x[0] = t;
      x[n - 1] = t;
      return x;
    };
    auto N = [n](const Vec&, double) {
      Vec v = Vec::Zero(n);
      v[0] = 1.0;
      v[n - 1] = 1.0;
      return v;
    };
    std::vector<double> tg(sc.window.steps + 1);
    for (int k = 0; k <= sc.window.steps; ++k)
      tg[k] = sc.window.t_min + (sc.window.t_max - sc.window.t_min) * k / sc.window.steps;
    return make_direct_congruence(sc.model, sc.grid, tg, nu, N);
  }
  Immersion host = slice_as_immersion(sc.surface);
  LegendrianMap lm = build_legendrian(sc, host);
  return build_front(sc.model, host, lm, sc.window.t_min, sc.window.t_max, sc.window.steps,
                     sc.integ);
}

inline RunResult run_scenario(const Scenario& sc, bool do_slices = true) {
  RunResult res;
  res.scenario = sc.name;
  res.nc = build_congruence(sc);

  for (const auto& ray : res.nc.rays)
    if (ray.failed) throw DomainError("ray integration failed: " + ray.error);

  FrontResidualReport fr = mapped_null_residual(res.nc, {sc.residual_fd_step});
  res.add("mapped_null_orth", fr.orth.max, fr.orth.rms(), sc.threshold("mapped_null_orth", 1e-6));
  res.add("mapped_null_null", fr.null_dev.max, fr.null_dev.rms(),
          sc.threshold("mapped_null_null", 1e-8));
  res.add("tangency", fr.tangency.max, fr.tangency.rms(), sc.threshold("tangency", 1e-2));

  {
    int expected = sc.kind == "degenerate" ? 1 : sc.m;
    double worst = 0.0, ssq = 0.0;
    std::size_t cnt = 0;
    for (std::size_t r = 0; r < res.nc.grid.size(); ++r) {
      auto idx = res.nc.grid.unflatten(r);
      for (int k = 0; k < static_cast<int>(res.nc.tgrid.size()); ++k) {
        if (!res.nc.covered(r, k)) continue;
        double err = std::abs(lift_rank(res.nc, idx, k, sc.rank_tol) - expected);
        worst = std::max(worst, err);
        ssq += err * err;
        ++cnt;
      }
    }
    res.add("lift_rank_err", worst, cnt ? std::sqrt(ssq / cnt) : 0.0,
            sc.threshold("lift_rank_err", 0.5));
  }

  if (!do_slices || sc.slices.empty()) return res;

  // large finite sentinel for "no data" so failures stay JSON-representable
  const double inf = 1e300;
  double min_phi_ratio = inf;
  Vec vertex_spatial;
  double vertex_time = 0.0;
  if (sc.kind == "cone") {
    vertex_spatial = sc.fiber_point;
    vertex_time = sc.surface.height(vertex_spatial);
  }

  for (std::size_t si = 0; si < sc.slices.size(); ++si) {
    std::string tag = "_s" + std::to_string(si);
    SliceOptions sopt;
    sopt.cross_tol = sc.threshold("cross_tol", 1e-10);
    sopt.trans_tol = sc.threshold("trans_tol", 1e-2);
    SlicedLegendrian sl = slice_front(res.nc, sc.slices[si], sopt);

    TransversalityReport tr = transversality_check(sl);
    double tv = tr.crossing_count ? sopt.trans_tol / tr.min_margin : inf;
    res.add("transversality" + tag, tv, tv, 1.0);

    ResidualStat rs = sliced_legendrian_residual(sl, 0, {sc.residual_fd_step});
    res.add("sliced_legendrian" + tag, rs.max, rs.rms(),
            sc.threshold("sliced_legendrian" + tag, sc.threshold("sliced_legendrian", 1e-6)));

    {  // image membership: crossing points satisfy t = f(x) to cross_tol
      double worst = 0.0, ssq = 0.0;
      std::size_t cnt = 0;
      for (const auto& cs : sl.crossings)
        for (const auto& c : cs) {
          double err = std::abs(c.point[sc.m] - sc.slices[si].height(c.m_params));
          worst = std::max(worst, err);
          ssq += err * err;
          ++cnt;
          min_phi_ratio = std::min(min_phi_ratio, c.phi.norm() / c.N_cross.norm());
        }
      res.add("slice_membership" + tag, worst, cnt ? std::sqrt(ssq / cnt) : 0.0, sopt.cross_tol);
    }

    {  // sliced-map rank on interior sheet-0 samples
      int expected = sc.kind == "degenerate" ? 0 : sc.m - 1;
      double worst = 0.0, ssq = 0.0;
      std::size_t cnt = 0;
      for (std::size_t r = 0; r < sl.grid.size(); ++r) {
        auto idx = sl.grid.unflatten(r);
        if (!sl.grid.interior(idx) || sl.crossings[r].empty()) continue;
        double err = std::abs(sliced_rank(sl, idx, 0, sc.rank_tol) - expected);
        worst = std::max(worst, err);
        ssq += err * err;
        ++cnt;
      }
      res.add("sliced_rank" + tag, worst, cnt ? std::sqrt(ssq / cnt) : 0.0,
              sc.threshold("sliced_rank", 0.5));
    }

    if (sc.kind == "cone") {
      std::vector<Vec> pts;
      for (const auto& cs : sl.crossings)
        if (!cs.empty()) pts.push_back(cs[0].m_params);
      SphereFit fit = fit_sphere(pts);
      double tau = sc.slices[si].height(vertex_spatial) - vertex_time;
      res.add("sphere_radius" + tag, std::abs(fit.radius - std::abs(tau)), fit.rms,
              sc.threshold("sphere_radius" + tag, sc.threshold("sphere_radius", 1e-9)));
      res.add("sphere_center" + tag, (fit.center - vertex_spatial).norm(), fit.rms,
              sc.threshold("sphere_center" + tag, sc.threshold("sphere_center", 1e-9)));
      res.add("sphere_rms" + tag, fit.rms, fit.rms,
              sc.threshold("sphere_rms" + tag, sc.threshold("sphere_rms", 1e-9)));
    }

    if (sc.kind == "saucer") {
      auto locus = detect_cusp_locus(sl, 0, sc.cusp_tol);
      res.cusp_loci.push_back(locus);
      if (locus.empty()) {
        res.add("cusp_radius" + tag, inf, inf, sc.threshold("cusp_radius" + tag, 1e-3));
        res.add("cusp_height" + tag, inf, inf, sc.threshold("cusp_height" + tag, 1e-6));
      } else {
        std::vector<Vec> pts;
        for (const auto& cp : locus) pts.push_back(cp.m_params);
        CircleFit fit = fit_horizontal_circle(pts);
        double tau = sc.slices[si].height(Vec::Zero(sc.m));
        res.add("cusp_radius" + tag, std::abs(fit.radius - 1.0), fit.rms,
                sc.threshold("cusp_radius" + tag, 1e-3));
        res.add("cusp_height" + tag, std::abs(fit.height - tau), fit.rms,
                sc.threshold("cusp_height" + tag, 1e-6));
        res.add("cusp_center" + tag, fit.center.norm(), fit.rms,
                sc.threshold("cusp_center" + tag, sc.threshold("cusp_radius" + tag, 1e-3)));
      }
    }

    for (const auto& w : sl.warnings) res.warnings.push_back("slice " + std::to_string(si) + ": " + w);
    res.sliced.push_back(std::move(sl));
  }

  if (min_phi_ratio < inf) {
    double req = sc.threshold("phi_ratio_min", 0.05);
    res.add("phi_ratio", req / min_phi_ratio, req / min_phi_ratio, 1.0);
  }
  return res;
}

inline nlohmann::json report_json(const RunResult& res) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : res.checks)
    checks.push_back({{"name", c.name},
                      {"max", c.max},
                      {"rms", c.rms},
                      {"threshold", c.threshold},
                      {"pass", c.pass}});
  return {{"scenario", res.scenario}, {"checks", checks}, {"version", kVersion}};
}

}  // namespace nullfront
