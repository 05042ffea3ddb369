#pragma once

// Metrics as data: an upper-triangular table of DSL expressions compiled
// into a MetricModel. Variables are the chart coordinates x0..x{m-1}, t,
// plus named scenario parameters.

#include "nullfront/chart.hpp"
#include "nullfront/expr.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nullfront {

inline std::vector<std::string> chart_variable_names(int m) {
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back("x" + std::to_string(i));
  names.push_back("t");
  return names;
}

struct MetricProgram {
  int dim = 0;
  // entries keyed by (i, j) with i <= j; absent entries are 0
  std::map<std::pair<int, int>, ExprPtr> entries;
  Env params;
  std::vector<ExprPtr> orientation_exprs;  // empty => e_t
  // optional analytic derivative table: derivs[k][(i,j)] = d g_ij / d coord_k
  std::vector<std::map<std::pair<int, int>, ExprPtr>> derivs;
  std::vector<Vec> sample_points;  // validation points for compile_metric

  static std::set<std::string> allowed_names(int m, const Env& params) {
    std::set<std::string> ok;
    for (const auto& v : chart_variable_names(m)) ok.insert(v);
    for (const auto& [k, _] : params) ok.insert(k);
    return ok;
  }

  void set_entry(int i, int j, std::string_view text) {
    require(0 <= i && i <= dim && 0 <= j && j <= dim, "set_entry: index out of range");
    if (i > j) std::swap(i, j);
    auto ok = allowed_names(dim, params);
    entries[{i, j}] = parse_expr(text, &ok);
  }

  void set_diag(const std::vector<std::string>& texts) {
    require(static_cast<int>(texts.size()) == dim + 1,
            "set_diag: expected " + std::to_string(dim + 1) + " entries");
    for (int i = 0; i <= dim; ++i) set_entry(i, i, texts[i]);
  }

  void set_deriv(int k, int i, int j, std::string_view text) {
    if (derivs.empty()) derivs.resize(dim + 1);
    if (i > j) std::swap(i, j);
    auto ok = allowed_names(dim, params);
    derivs[k][{i, j}] = parse_expr(text, &ok);
  }
};

// "minkowski(m)" shortcut
inline MetricProgram minkowski_program(int m) {
  MetricProgram p;
  p.dim = m;
  for (int i = 0; i < m; ++i) p.set_entry(i, i, "1");
  p.set_entry(m, m, "-1");
  return p;
}

namespace detail {

inline Env chart_env(int m, const Vec& x, const Env& params) {
  Env env = params;
  auto names = chart_variable_names(m);
  for (int i = 0; i <= m; ++i) env[names[i]] = x[i];
  return env;
}

}  // namespace detail

inline MetricModel compile_metric(const MetricProgram& p) {
  require(p.dim >= 1, "compile_metric: dim must be >= 1");
  const int m = p.dim;
  const int n = m + 1;
  auto entries = p.entries;
  auto params = p.params;

  MetricModel model;
  model.dim = m;
  model.metric = [m, n, entries, params](const Vec& x) {
    Env env = detail::chart_env(m, x, params);
    Mat g = Mat::Zero(n, n);
    for (const auto& [ij, e] : entries) {
      double v = eval_expr(e, env);
      g(ij.first, ij.second) = v;
      g(ij.second, ij.first) = v;
    }
    return g;
  };
  if (!p.orientation_exprs.empty()) {
    require(static_cast<int>(p.orientation_exprs.size()) == n,
            "compile_metric: orientation needs m+1 components");
    auto oexprs = p.orientation_exprs;
    model.orientation = [m, n, oexprs, params](const Vec& x) {
      Env env = detail::chart_env(m, x, params);
      Vec T(n);
      for (int i = 0; i < n; ++i) T[i] = eval_expr(oexprs[i], env);
      return T;
    };
  }
  if (!p.derivs.empty()) {
    require(static_cast<int>(p.derivs.size()) == n,
            "compile_metric: derivative table needs m+1 slots");
    auto dtab = p.derivs;
    model.metric_deriv = [m, n, dtab, params](const Vec& x) {
      Env env = detail::chart_env(m, x, params);
      std::vector<Mat> d(n, Mat::Zero(n, n));
      for (int k = 0; k < n; ++k)
        for (const auto& [ij, e] : dtab[k]) {
          double v = eval_expr(e, env);
          d[k](ij.first, ij.second) = v;
          d[k](ij.second, ij.first) = v;
        }
      return d;
    };
  }
  if (!p.sample_points.empty()) {
    auto report = validate_lorentzian(model, p.sample_points);
    if (!report.pass())
      throw DomainError("compile_metric: Lorentzian validation failed at a sample point: " +
                        report.violations.front().what);
  }
  return model;
}

}  // namespace nullfront
