// End-to-end acceptance gate: one pass/fail line per criterion.
#include "nullfront/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>

using namespace nullfront;

namespace {

struct Criterion {
  int id;
  std::string label;
  bool pass = true;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

const Check* find_check(const RunResult& res, const std::string& name) {
  for (const auto& c : res.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// "the named scenario check exists and passed its stored threshold"
void require_check(Criterion& cr, const RunResult& res, const std::string& name) {
  const Check* c = find_check(res, name);
  if (!c) {
    cr.require(false, res.scenario + ": check '" + name + "' missing");
    return;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s: %s max %.3e > %.3e", res.scenario.c_str(), name.c_str(),
                c->max, c->threshold);
  cr.require(c->pass, buf);
}

MetricModel exp_time_model() {
  MetricModel model;
  model.dim = 3;
  model.metric = [](const Vec& x) {
    Mat g = Mat::Identity(4, 4);
    g(3, 3) = -std::exp(2.0 * x(0));
    return g;
  };
  model.metric_deriv = [](const Vec& x) {
    std::vector<Mat> d(4, Mat::Zero(4, 4));
    d[0](3, 3) = -2.0 * std::exp(2.0 * x(0));
    return d;
  };
  return model;
}

double max_null_drift(const MetricModel& model, const Trajectory& traj, double t_lo,
                      double t_hi) {
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    double t = t_lo + (t_hi - t_lo) * k / 200.0;
    GeodesicState s = traj.sample(t);
    worst = std::max(worst, std::abs(inner(model, s.x, s.v, s.v)));
  }
  return worst;
}

}  // namespace

int main() {
  std::map<std::string, RunResult> runs;
  for (const char* name : {"expanding_circle", "cone", "cone_conformal", "saucer",
                           "saucer_generic", "curved_front", "degenerate"}) {
    try {
      runs.emplace(name, run_scenario(load_scenario_file(std::string("configs/") + name + ".json")));
    } catch (const std::exception& e) {
      std::printf("FAIL criterion 0: scenario %s did not run (%s)\n", name, e.what());
      return 1;
    }
  }

  std::vector<Criterion> crits;

  {
    Criterion cr{1, "null-norm conservation along geodesics"};
    MetricModel mink = minkowski_model(3);
    Vec x0 = Vec::Zero(4);
    Vec v0(4);
    v0 << 1.0, 0.0, 0.0, 1.0;
    Trajectory flat = integrate(mink, x0, v0, 0.0, 10.0, {});
    double drift = max_null_drift(mink, flat, 0.0, 10.0);
    cr.require(drift <= 1e-12, "flat drift " + std::to_string(drift));

    MetricModel curved = exp_time_model();
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    Trajectory out = integrate(curved, x0, v0, 0.0, 10.0, cfg);
    double cdrift = max_null_drift(curved, out, 0.0, 10.0);
    cr.require(cdrift <= 1e-8, "curved drift " + std::to_string(cdrift));
    crits.push_back(cr);
  }

  {
    Criterion cr{2, "orthogonality residual of the null field"};
    require_check(cr, runs.at("expanding_circle"), "mapped_null_orth");
    require_check(cr, runs.at("saucer"), "mapped_null_orth");
    require_check(cr, runs.at("curved_front"), "mapped_null_orth");

    // quadratic FD convergence: halve the grid spacing, table-mode residual.
    // The curved sphere front is smooth everywhere on its window, so the
    // grid-spacing FD error dominates and must shrink by ~4x.
    Scenario coarse = load_scenario_file("configs/curved_front.json");
    Scenario fine = coarse;
    for (auto& ax : fine.grid.axes) {
      ax.step /= 2.0;
      ax.count = ax.periodic ? ax.count * 2 : ax.count * 2 - 1;
    }
    double r_coarse = mapped_null_residual(build_congruence(coarse)).orth.max;
    double r_fine = mapped_null_residual(build_congruence(fine)).orth.max;
    double ratio = r_coarse / r_fine;
    cr.require(ratio >= 3.5, "refinement ratio " + std::to_string(ratio) + " < 3.5");
    crits.push_back(cr);
  }

  {
    Criterion cr{3, "cone slices are round spheres of radius |tau|"};
    for (const char* name : {"sphere_radius_s0", "sphere_center_s0", "sphere_radius_s1",
                             "sphere_center_s1"})
      require_check(cr, runs.at("cone"), name);
    require_check(cr, runs.at("cone_conformal"), "sphere_radius_s0");
    crits.push_back(cr);
  }

  {
    Criterion cr{4, "sliced maps are Legendrian on the slice"};
    require_check(cr, runs.at("cone"), "sliced_legendrian_s0");
    require_check(cr, runs.at("cone"), "sliced_legendrian_s1");
    require_check(cr, runs.at("expanding_circle"), "sliced_legendrian_s0");
    for (int s = 0; s < 3; ++s) {
      require_check(cr, runs.at("saucer"), "sliced_legendrian_s" + std::to_string(s));
      require_check(cr, runs.at("saucer"), "slice_membership_s" + std::to_string(s));
    }
    require_check(cr, runs.at("cone"), "slice_membership_s0");
    require_check(cr, runs.at("saucer"), "phi_ratio");
    crits.push_back(cr);
  }

  {
    Criterion cr{5, "immersion ranks of the lifts"};
    require_check(cr, runs.at("cone"), "lift_rank_err");
    require_check(cr, runs.at("saucer"), "lift_rank_err");
    for (int s = 0; s < 2; ++s)
      require_check(cr, runs.at("cone"), "sliced_rank_s" + std::to_string(s));
    for (int s = 0; s < 3; ++s)
      require_check(cr, runs.at("saucer"), "sliced_rank_s" + std::to_string(s));
    // the projected-curve family must NOT look like an immersion (rank 1, not m)
    require_check(cr, runs.at("degenerate"), "lift_rank_err");
    require_check(cr, runs.at("degenerate"), "sliced_rank_s0");
    crits.push_back(cr);
  }

  {
    Criterion cr{6, "saucer cusp circles (pinned and generic profiles)"};
    for (int s = 0; s < 3; ++s) {
      require_check(cr, runs.at("saucer"), "cusp_radius_s" + std::to_string(s));
      require_check(cr, runs.at("saucer"), "cusp_height_s" + std::to_string(s));
      require_check(cr, runs.at("saucer_generic"), "cusp_radius_s" + std::to_string(s));
      require_check(cr, runs.at("saucer_generic"), "cusp_height_s" + std::to_string(s));
    }
    crits.push_back(cr);
  }

  {
    Criterion cr{7, "deterministic expression engine and CLI output"};
    struct G {
      const char* text;
      double value;
    };
    const G exact[] = {{"1+2*3", 7.0},   {"(1+2)*3", 9.0}, {"2-3-4", -5.0},
                       {"2^-2", 0.25},   {"-2^2", -4.0},   {"2+3*4^2", 50.0},
                       {"1e3+1", 1001.0}, {".5+1", 1.5}};
    for (const auto& g : exact) {
      double v = eval_expr(parse_expr(g.text), {});
      cr.require(v == g.value, std::string(g.text) + " != frozen value");
      double v2 = eval_expr(parse_expr(print_expr(parse_expr(g.text))), {});
      cr.require(std::memcmp(&v, &v2, sizeof v) == 0, std::string(g.text) + " reparse drift");
    }
    auto run_once = [&]() {
      std::ostringstream out, err;
      int rc = run_cli({"verify", "--config", "configs/expanding_circle.json"}, out, err);
      cr.require(rc == 0, "CLI verify exited " + std::to_string(rc));
      return out.str();
    };
    std::string a = run_once(), b = run_once();
    cr.require(a == b, "CLI reruns differ byte-wise");
    crits.push_back(cr);
  }

  {
    Criterion cr{8, "frozen oracle fixtures"};
    // hand-contracted Christoffel symbols of diag(1,1,1,-e^{2 x0}) at the origin
    Christoffel G = christoffel(exp_time_model(), Vec::Zero(4));
    cr.require(std::abs(G(3, 0, 3) - 1.0) <= 1e-12, "Gamma^t_{x0 t}(0) != 1");
    cr.require(std::abs(G(0, 3, 3) - 1.0) <= 1e-12, "Gamma^{x0}_{tt}(0) != 1");

    // straight-ray arithmetic: tilted slice of the flat 2+1 cone,
    // t* = 2 / (1 - 0.1 cos theta), phi = (cos theta - 0.1, sin theta)
    {
      MetricModel mink = minkowski_model(2);
      Immersion host = slice_as_immersion(GraphSlice::from_text(2, "0"));
      LGrid grid = circle_grid(16);
      LegendrianMap lm = fiber_legendrian(mink, host, Vec::Zero(2), grid);
      NullCongruence nc = build_front(mink, host, lm, -0.5, 3.0, 35, {});
      SlicedLegendrian sl = slice_front(nc, GraphSlice::from_text(2, "2 + 0.1*x0"));
      double worst = 0.0;
      for (std::size_t r = 0; r < grid.size(); ++r) {
        double th = grid.point(grid.unflatten(r))(0);
        if (sl.crossings[r].size() != 1) {
          worst = 1.0;
          break;
        }
        const Crossing& c = sl.crossings[r][0];
        worst = std::max(worst, std::abs(c.t_star - 2.0 / (1.0 - 0.1 * std::cos(th))));
        worst = std::max(worst, std::abs(c.phi(0) - (std::cos(th) - 0.1)));
        worst = std::max(worst, std::abs(c.phi(1) - std::sin(th)));
      }
      cr.require(worst <= 1e-8, "tilted-slice closed form error " + std::to_string(worst));
    }

    // conformal invariance of null images: conformal cone slice radius 2 at t = 2
    require_check(cr, runs.at("cone_conformal"), "sphere_radius_s0");

    // frozen cusp radii of the generic profile at tau = 0.5, 1, 2
    {
      const double frozen[] = {1.034499, 1.131494, 1.461389};
      const RunResult& res = runs.at("saucer_generic");
      for (int s = 0; s < 3; ++s) {
        const Check* c = find_check(res, "cusp_radius_s" + std::to_string(s));
        if (!c) {
          cr.require(false, "generic cusp_radius_s" + std::to_string(s) + " missing");
          continue;
        }
        double fitted = 1.0 + c->max;  // check stores |radius - 1|; all fixtures exceed 1
        cr.require(std::abs(fitted - frozen[s]) <= 2e-3,
                   "generic cusp radius s" + std::to_string(s) + " = " + std::to_string(fitted));
      }
    }

    // pinned profile: cusp radius exactly 1 to slicing accuracy
    for (int s = 0; s < 3; ++s) {
      const Check* c = find_check(runs.at("saucer"), "cusp_radius_s" + std::to_string(s));
      cr.require(c && c->max <= 1e-6, "pinned cusp radius drifted at slice " + std::to_string(s));
    }

    // brute-force rank fixture: the degenerate family collapses to one ray
    {
      const NullCongruence& nc = runs.at("degenerate").nc;
      cr.require(lift_rank(nc, {4, 4}, 15) == 1, "degenerate lift rank != 1");
    }
    crits.push_back(cr);
  }

  bool all = true;
  for (const auto& cr : crits) {
    std::printf("%s criterion %d: %s\n", cr.pass ? "PASS" : "FAIL", cr.id, cr.label.c_str());
    for (const auto& f : cr.failures) std::printf("       %s\n", f.c_str());
    all = all && cr.pass;
  }
  return all ? 0 : 1;
}
