#include "ghostbench/recon_gics.hpp"

#include "ghostbench/keyvalue.hpp"

#include <algorithm>
#include <cmath>

namespace ghost {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd SensingSystem::original_rows() const {
  MatrixXd out = rows * col_scale.asDiagonal();
  out.rowwise() += col_mean;
  return out;
}

VectorXd SensingSystem::original_rhs() const { return rhs.array() + rhs_mean; }

SensingSystem build_sensing(const MeasurementSet& ms, bool centered, bool scale_columns) {
  if (ms.m() < 1) throw ConfigError("sensing system needs at least one record");
  const auto& first = ms.records.front().frame.intensity;
  const Eigen::Index n_pix = first.size();

  SensingSystem s;
  s.grid_n = static_cast<int>(first.rows());
  s.centered = centered;
  s.rows.resize(static_cast<Eigen::Index>(ms.m()), n_pix);
  s.rhs.resize(static_cast<Eigen::Index>(ms.m()));
  for (std::size_t r = 0; r < ms.m(); ++r) {
    const auto& f = ms.records[r].frame.intensity;
    if (f.rows() != first.rows() || f.cols() != first.cols()) throw ConfigError("frames have mixed geometry");
    s.rows.row(static_cast<Eigen::Index>(r)) = flatten(f).transpose();
    s.rhs(static_cast<Eigen::Index>(r)) = ms.records[r].bucket;
  }

  s.col_mean = Eigen::RowVectorXd::Zero(n_pix);
  if (centered) {
    s.col_mean = s.rows.colwise().mean();
    s.rows.rowwise() -= s.col_mean;
    s.rhs_mean = s.rhs.mean();
    s.rhs.array() -= s.rhs_mean;
  }

  s.col_scale = VectorXd::Ones(n_pix);
  if (scale_columns) {
    const double root_m = std::sqrt(static_cast<double>(ms.m()));
    for (Eigen::Index j = 0; j < n_pix; ++j) {
      const double sc = s.rows.col(j).norm() / root_m;
      if (sc > 0.0) {
        s.col_scale(j) = sc;
        s.rows.col(j) /= sc;
      } else {
        ++s.dead_columns;
      }
    }
  }
  return s;
}

SensingSystem make_system(MatrixXd rows, VectorXd rhs) {
  if (rows.rows() != rhs.size() || rows.rows() < 1) throw ConfigError("system dimensions disagree");
  SensingSystem s;
  s.rows = std::move(rows);
  s.rhs = std::move(rhs);
  s.col_scale = VectorXd::Ones(s.rows.cols());
  s.col_mean = Eigen::RowVectorXd::Zero(s.rows.cols());
  return s;
}

void GicsParams::validate() const {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be a non-negative finite number");
  if (max_iters < 1) throw ConfigError("max_iters must be positive");
  if (!(tol_rel_obj > 0.0)) throw ConfigError("tol_rel_obj must be positive");
  if (!(tol_kkt_rel >= 0.0)) throw ConfigError("tol_kkt_rel must be non-negative");
  if (!(bb_step_min > 0.0) || !(bb_step_min < bb_step_max)) throw ConfigError("need 0 < bb_step_min < bb_step_max");
}

std::string GicsParams::digest() const {
  return "gpsr tau=" + format_double(tau) + " max_iters=" + std::to_string(max_iters) +
         " tol=" + format_double(tol_rel_obj) + " kkt_tol=" + format_double(tol_kkt_rel) + " debias=" + (debias ? "1" : "0") + " nonneg=" + (nonneg ? "1" : "0");
}

std::string SolveReport::trace_csv() const {
  std::string out = "iter,objective,kkt_residual\n";
  for (const auto& t : trace) {
    out += std::to_string(t.iter) + "," + format_double(t.objective) + "," + format_double(t.kkt_residual) + "\n";
  }
  return out;
}

namespace {

double kkt_from_gradient(const VectorXd& x, const VectorXd& g, double tau) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double v;
    if (x(j) > 0.0) {
      v = std::abs(g(j) + tau);
    } else if (x(j) < 0.0) {
      v = std::abs(g(j) - tau);
    } else {
      v = std::max(0.0, std::abs(g(j)) - tau);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

void require_finite(const VectorXd& v, const char* what) {
  if (!v.allFinite()) throw NumericError(std::string("non-finite values in ") + what + " (check column scaling)");
}

// Least-squares polish on the support of x by conjugate gradients on the
// restricted normal equations.
void debias(const SensingSystem& s, VectorXd& x) {
  VectorXd mask = (x.array() != 0.0).cast<double>().matrix();
  if (mask.sum() == 0.0) return;
  VectorXd r = (s.rows.transpose() * (s.rhs - s.rows * x)).cwiseProduct(mask);  // negative gradient
  VectorXd p = r;
  double rr = r.squaredNorm();
  const double stop = 1e-20 * std::max(rr, 1e-300);
  const Eigen::Index max_cg = std::min<Eigen::Index>(static_cast<Eigen::Index>(mask.sum()), 500);
  for (Eigen::Index it = 0; it < max_cg && rr > stop; ++it) {
    const VectorXd ap = s.rows * p;
    const double denom = ap.squaredNorm();
    if (!(denom > 0.0)) break;
    const double alpha = rr / denom;
    x += alpha * p;
    r -= alpha * (s.rows.transpose() * ap).cwiseProduct(mask);
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
}

}  // namespace

double lasso_objective(const SensingSystem& s, const VectorXd& x, double tau) {
  return 0.5 * (s.rhs - s.rows * x).squaredNorm() + tau * x.lpNorm<1>();
}

double kkt_residual(const SensingSystem& s, const VectorXd& x, double tau) {
  const VectorXd g = s.rows.transpose() * (s.rows * x - s.rhs);
  return kkt_from_gradient(x, g, tau);
}

double zero_solution_threshold(const SensingSystem& s) {
  return (s.rows.transpose() * s.rhs).lpNorm<Eigen::Infinity>();
}

SolveResult gpsr_solve(const SensingSystem& s, const GicsParams& p) {
  p.validate();
  const Eigen::Index n = s.n();
  require_finite(s.rhs, "rhs");
  if (!s.rows.allFinite()) throw NumericError("non-finite values in sensing rows (check column scaling)");

  SolveResult out;
  out.x = VectorXd::Zero(n);
  const VectorXd atb = s.rows.transpose() * s.rhs;
  if (p.tau >= atb.lpNorm<Eigen::Infinity>()) {
    // x = 0 satisfies the optimality conditions exactly.
    out.report.final_objective = 0.5 * s.rhs.squaredNorm();
    out.report.kkt_residual = kkt_from_gradient(out.x, -atb, p.tau);
    out.report.converged = true;
    out.report.trace.push_back({0, out.report.final_objective, out.report.kkt_residual});
    return out;
  }

  const double tau = p.tau;
  const double kkt_target = p.tol_kkt_rel * atb.lpNorm<Eigen::Infinity>();
  VectorXd u = VectorXd::Zero(n);
  VectorXd v = VectorXd::Zero(n);
  VectorXd resid = s.rhs;  // rhs - rows * (u - v)
  VectorXd g = -atb;       // rows^T (rows x - rhs)
  double f = 0.5 * resid.squaredNorm();
  out.report.trace.push_back({0, f, kkt_from_gradient(u - v, g, tau)});

  // Initial step: exact minimizer along the projected gradient.
  double alpha;
  {
    VectorXd gu = (tau + g.array()).matrix();
    VectorXd gv = (tau - g.array()).matrix();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(u(j) > 0.0 || gu(j) < 0.0)) gu(j) = 0.0;
      if (p.nonneg || !(v(j) > 0.0 || gv(j) < 0.0)) gv(j) = 0.0;
    }
    const double num = gu.squaredNorm() + gv.squaredNorm();
    const double den = (s.rows * (gu - gv)).squaredNorm();
    alpha = den > 0.0 ? num / den : p.bb_step_max;
    alpha = std::clamp(alpha, p.bb_step_min, p.bb_step_max);
  }

  VectorXd du(n), dv(n);
  constexpr std::size_t kMemory = 10;
  std::vector<double> recent{f};
  int iter = 0;
  bool converged = false;
  while (iter < p.max_iters) {
    ++iter;
    for (Eigen::Index j = 0; j < n; ++j) {
      du(j) = std::max(u(j) - alpha * (tau + g(j)), 0.0) - u(j);
      dv(j) = p.nonneg ? 0.0 : std::max(v(j) - alpha * (tau - g(j)), 0.0) - v(j);
    }
    const double step_sq = du.squaredNorm() + dv.squaredNorm();
    if (step_sq == 0.0) {
      converged = true;  // projected-gradient fixed point
      out.report.trace.push_back({iter, f, kkt_from_gradient(u - v, g, tau)});
      break;
    }
    const VectorXd adx = s.rows * (du - dv);
    const double curvature = adx.squaredNorm();
    const double slope = (tau + g.array()).matrix().dot(du) + (tau - g.array()).matrix().dot(dv);
    // Nonmonotone acceptance: keep the full BB step unless it rises above the
    // worst of the recent objectives; otherwise fall back to the exact
    // minimizer along the step.
    double lambda = 1.0;
    const double f_full = 0.5 * (resid - adx).squaredNorm() + tau * ((u + du).sum() + (v + dv).sum());
    const double f_ref = *std::max_element(recent.begin(), recent.end());
    if (!(f_full <= f_ref + 1e-4 * slope) && curvature > 0.0) lambda = std::clamp(-slope / curvature, 0.0, 1.0);

    u += lambda * du;
    v += lambda * dv;
    if (iter % 100 == 0) {
      resid = s.rhs - s.rows * (u - v);  // refresh the running residual
    } else {
      resid -= lambda * adx;
    }
    g = -(s.rows.transpose() * resid);
    require_finite(g, "gradient");

    alpha = curvature > 0.0 ? step_sq / curvature : p.bb_step_max;
    alpha = std::clamp(alpha, p.bb_step_min, p.bb_step_max);

    const double f_new = 0.5 * resid.squaredNorm() + tau * (u.sum() + v.sum());
    const double change = std::abs(f - f_new) / std::max(std::abs(f_new), std::numeric_limits<double>::min());
    f = f_new;
    if (recent.size() == kMemory) recent.erase(recent.begin());
    recent.push_back(f);
    const double kkt = kkt_from_gradient(u - v, g, tau);
    out.report.trace.push_back({iter, f, kkt});
    if (f == 0.0 || (change < p.tol_rel_obj && kkt <= kkt_target)) {
      converged = true;
      break;
    }
  }

  out.x = u - v;
  if (p.debias) debias(s, out.x);
  require_finite(out.x, "solution");
  out.report.iterations = iter;
  out.report.converged = converged;
  out.report.final_objective = lasso_objective(s, out.x, tau);
  out.report.kkt_residual = kkt_residual(s, out.x, tau);
  return out;
}

namespace {

// Largest eigenvalue of rows^T rows by power iteration, from a fixed start.
double gram_spectral_bound(const SensingSystem& s) {
  VectorXd w = VectorXd::Ones(s.n()) / std::sqrt(static_cast<double>(s.n()));
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const VectorXd next = s.rows.transpose() * (s.rows * w);
    const double est = w.dot(next);
    const double norm = next.norm();
    if (!(norm > 0.0)) return 0.0;
    w = next / norm;
    if (std::abs(est - lambda) <= 1e-12 * est) {
      lambda = est;
      break;
    }
    lambda = est;
  }
  return lambda * 1.01;  // Rayleigh quotients approach from below
}

}  // namespace

SolveResult ista_reference(const SensingSystem& s, double tau, double kkt_tol, int max_iters, bool record_trace) {
  if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
  SolveResult out;
  out.x = VectorXd::Zero(s.n());
  VectorXd g = -(s.rows.transpose() * s.rhs);
  double kkt = kkt_from_gradient(out.x, g, tau);
  if (record_trace) out.report.trace.push_back({0, lasso_objective(s, out.x, tau), kkt});

  const double lip = gram_spectral_bound(s);
  int iter = 0;
  if (lip > 0.0) {
    const double step = 1.0 / lip;
    const double shrink = tau * step;
    while (kkt > kkt_tol && iter < max_iters) {
      ++iter;
      out.x -= step * g;
      out.x = out.x.unaryExpr([shrink](double z) {
        return z > shrink ? z - shrink : (z < -shrink ? z + shrink : 0.0);
      });
      const VectorXd resid = s.rows * out.x - s.rhs;
      g = s.rows.transpose() * resid;
      kkt = kkt_from_gradient(out.x, g, tau);
      if (record_trace)
        out.report.trace.push_back({iter, 0.5 * resid.squaredNorm() + tau * out.x.lpNorm<1>(), kkt});
    }
  }
  require_finite(out.x, "ISTA solution");
  out.report.iterations = iter;
  out.report.kkt_residual = kkt;
  out.report.converged = kkt <= kkt_tol;
  out.report.final_objective = lasso_objective(s, out.x, tau);
  return out;
}

GicsResult gics_reconstruct(const MeasurementSet& ms, const GicsParams& p) {
  const SensingSystem s = build_sensing(ms, /*centered=*/true, /*scale_columns=*/true);
  SolveResult sol = gpsr_solve(s, p);
  const VectorXd t = s.to_mask_units(sol.x).cwiseMax(0.0);

  GicsResult out;
  out.image.provenance = Method::GICS;
  out.image.params_digest = p.digest() + " m=" + std::to_string(ms.m());
  out.image.values = Eigen::Map<const Grid>(t.data(), s.grid_n, s.grid_n);
  out.report = std::move(sol.report);
  return out;
}

}  // namespace ghost
