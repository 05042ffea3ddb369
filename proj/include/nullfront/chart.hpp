#pragma once

// Lorentzian metric evaluation on a single coordinate chart of R^{m+1}.
// Convention: coordinates (x0, ..., x{m-1}, t); time is the LAST index.
// A vector v is future pointing iff g(v, T(x)) < 0 for the reference
// timelike field T (default e_t).

#include "nullfront/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nullfront {

struct MetricModel {
  int dim = 0;  // m: spatial dimension; chart dimension is m+1
  std::function<Mat(const Vec&)> metric;                 // x -> (m+1)x(m+1)
  std::function<Vec(const Vec&)> orientation;            // x -> T(x); empty => e_t
  std::function<std::vector<Mat>(const Vec&)> metric_deriv;  // optional: x -> {d_k g}
  double fd_step = 1e-5;

  int n() const { return dim + 1; }

  Vec reference_field(const Vec& x) const {
    if (orientation) return orientation(x);
    Vec t = Vec::Zero(n());
    t[dim] = 1.0;
    return t;
  }
};

inline MetricModel minkowski_model(int m) {
  MetricModel model;
  model.dim = m;
  model.metric = [m](const Vec&) {
    Vec d = Vec::Ones(m + 1);
    d[m] = -1.0;
    return Mat(d.asDiagonal());
  };
  model.metric_deriv = [m](const Vec&) {
    return std::vector<Mat>(m + 1, Mat::Zero(m + 1, m + 1));
  };
  return model;
}

inline Mat metric_at(const MetricModel& model, const Vec& x) {
  if (x.size() != model.n())
    throw DimensionError("metric_at: point has dimension " + std::to_string(x.size()) +
                         ", expected " + std::to_string(model.n()));
  if (!all_finite(x)) throw DomainError("metric_at: non-finite point");
  Mat g = model.metric(x);
  if (g.rows() != model.n() || g.cols() != model.n())
    throw DimensionError("metric_at: evaluator returned wrong shape");
  if (!all_finite(g)) throw DomainError("metric_at: non-finite metric output");
  return 0.5 * (g + g.transpose());
}

inline double inner(const MetricModel& model, const Vec& x, const Vec& u, const Vec& v) {
  if (u.size() != model.n() || v.size() != model.n())
    throw DimensionError("inner: vector dimension mismatch");
  Mat g = metric_at(model, x);
  return u.dot(g * v);
}

enum class CausalKind { spacelike, null, timelike, zero };
enum class TimeSense { future, past, none };

struct CausalClass {
  CausalKind kind;
  TimeSense time_sense;
};

inline const char* to_string(CausalKind k) {
  switch (k) {
    case CausalKind::spacelike: return "spacelike";
    case CausalKind::null: return "null";
    case CausalKind::timelike: return "timelike";
    case CausalKind::zero: return "zero";
  }
  return "?";
}

inline CausalClass classify(const MetricModel& model, const Vec& x, const Vec& v,
                            double null_tol = 1e-9) {
  require(null_tol >= 0.0, "classify: null_tol must be >= 0");
  double n2 = v.squaredNorm();
  if (n2 == 0.0) return {CausalKind::zero, TimeSense::none};
  Mat g = metric_at(model, x);
  double q = v.dot(g * v);
  CausalKind kind;
  if (std::abs(q) <= null_tol * n2)
    kind = CausalKind::null;
  else if (q > 0.0)
    return {CausalKind::spacelike, TimeSense::none};
  else
    kind = CausalKind::timelike;
  double s = v.dot(g * model.reference_field(x));
  TimeSense sense = s < 0.0 ? TimeSense::future : TimeSense::past;
  return {kind, sense};
}

// d_k g evaluated analytically when the model carries derivatives, else by
// central differences with step fd_step.
inline std::vector<Mat> metric_derivatives(const MetricModel& model, const Vec& x) {
  const int n = model.n();
  if (model.metric_deriv) {
    auto d = model.metric_deriv(x);
    if (static_cast<int>(d.size()) != n)
      throw DimensionError("metric_derivatives: analytic table has wrong arity");
    for (auto& gk : d) gk = 0.5 * (gk + gk.transpose()).eval();
    return d;
  }
  std::vector<Mat> d(n);
  const double h = model.fd_step;
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    d[k] = (metric_at(model, xp) - metric_at(model, xm)) / (2.0 * h);
  }
  return d;
}

// Gamma^k_{ij} = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
struct Christoffel {
  int n;
  std::vector<Mat> comp;  // comp[k](i,j)

  double operator()(int k, int i, int j) const { return comp[k](i, j); }
};

inline Christoffel christoffel(const MetricModel& model, const Vec& x) {
  const int n = model.n();
  Mat g = metric_at(model, x);
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible())
    throw DomainError("christoffel: singular metric matrix");
  Mat ginv = lu.inverse();
  auto dg = metric_derivatives(model, x);
  Christoffel out{n, std::vector<Mat>(n, Mat::Zero(n, n))};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out.comp[k](i, j) = 0.5 * s;
        out.comp[k](j, i) = out.comp[k](i, j);
      }
  return out;
}

struct LorentzViolation {
  Vec point;
  std::string what;
};

struct LorentzReport {
  std::vector<LorentzViolation> violations;
  std::vector<LorentzViolation> warnings;
  bool pass() const { return violations.empty(); }
};

// Signature check (exactly one negative eigenvalue) and g(T,T) < 0 at each
// point. A past-directed reference field is legal Lorentzian data but breaks
// the +t-future convention, so it is reported as a warning.
inline LorentzReport validate_lorentzian(const MetricModel& model,
                                         const std::vector<Vec>& points) {
  LorentzReport report;
  for (const Vec& x : points) {
    Mat g;
    try {
      g = metric_at(model, x);
    } catch (const Error& e) {
      report.violations.push_back({x, e.what()});
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    int neg = 0, zero = 0;
    double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double ev = es.eigenvalues()[i];
      if (std::abs(ev) <= 1e-12 * scale)
        ++zero;
      else if (ev < 0.0)
        ++neg;
    }
    if (zero > 0)
      report.violations.push_back({x, "degenerate metric (near-zero eigenvalue)"});
    else if (neg != 1)
      report.violations.push_back(
          {x, "signature has " + std::to_string(neg) + " negative eigenvalues, expected 1"});
    Vec T = model.reference_field(x);
    double gtt = T.dot(g * T);
    if (!(gtt < 0.0))
      report.violations.push_back({x, "orientation field is not timelike (g(T,T) >= 0)"});
    Vec et = Vec::Zero(model.n());
    et[model.dim] = 1.0;
    if (gtt < 0.0 && T.dot(g * et) > 0.0)
      report.warnings.push_back({x, "orientation field is past directed relative to e_t"});
  }
  return report;
}

}  // namespace nullfront
