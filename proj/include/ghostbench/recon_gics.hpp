#pragma once

#include "ghostbench/forward.hpp"
#include "ghostbench/metrics.hpp"

#include <string>
#include <vector>

namespace ghost {

/// Linear model rhs = rows * x of the bucket data, one row per record.
///
/// When centered, column means and the bucket mean have been removed; when
/// scaled, column j has been divided by col_scale[j]. Solver variables x relate
/// to transmittance t by t = x / col_scale.
struct SensingSystem {
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  Eigen::VectorXd col_scale;
  Eigen::RowVectorXd col_mean;  // zeros unless centered
  double rhs_mean = 0.0;
  bool centered = false;
  int dead_columns = 0;  // zero-variance columns left unscaled
  int grid_n = 0;        // 0 for systems not tied to an image grid

  Eigen::Index m() const { return rows.rows(); }
  Eigen::Index n() const { return rows.cols(); }

  Eigen::VectorXd to_mask_units(const Eigen::VectorXd& x) const { return x.cwiseQuotient(col_scale); }
  Eigen::MatrixXd original_rows() const;
  Eigen::VectorXd original_rhs() const;
};

SensingSystem build_sensing(const MeasurementSet& ms, bool centered, bool scale_columns);

/// Plain system with unit scales, for solver use outside the imaging pipeline.
SensingSystem make_system(Eigen::MatrixXd rows, Eigen::VectorXd rhs);

struct GicsParams {
  double tau = 1e-3;
  int max_iters = 2000;
  double tol_rel_obj = 1e-8;
  /// Convergence additionally requires kkt_residual <= tol_kkt_rel * ||rows^T rhs||_inf.
  double tol_kkt_rel = 1e-9;
  double bb_step_min = 1e-30;
  double bb_step_max = 1e30;
  bool debias = false;
  bool nonneg = false;

  void validate() const;
  std::string digest() const;
};

struct SolveTracePoint {
  int iter = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
};

struct SolveReport {
  int iterations = 0;
  double final_objective = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
  std::vector<SolveTracePoint> trace;

  /// `iter,objective,kkt_residual` with a header line.
  std::string trace_csv() const;
};

/// Solver output in system variables (see SensingSystem::to_mask_units).
struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

/// 0.5 ||rhs - rows x||^2 + tau ||x||_1
double lasso_objective(const SensingSystem& s, const Eigen::VectorXd& x, double tau);

/// Infinity norm of the subgradient optimality violation at x.
double kkt_residual(const SensingSystem& s, const Eigen::VectorXd& x, double tau);

/// ||rows^T rhs||_inf: the smallest tau for which x = 0 is optimal.
double zero_solution_threshold(const SensingSystem& s);

/// Gradient projection with Barzilai-Borwein steps on the split x = u - v,
/// u, v >= 0, and an exact line search along each projected step. Stops once
/// the relative objective change drops below tol_rel_obj while the KKT
/// residual is within tol_kkt_rel of the zero-solution threshold, or at max_iters.
SolveResult gpsr_solve(const SensingSystem& s, const GicsParams& p);

/// Proximal-gradient (soft-thresholding) iterations with step 1/L, run until
/// the KKT residual reaches kkt_tol or max_iters. Independent check on gpsr_solve.
SolveResult ista_reference(const SensingSystem& s, double tau, double kkt_tol, int max_iters = 1'000'000,
                           bool record_trace = false);

struct GicsResult {
  ReconImage image;
  SolveReport report;
};

/// Centered, column-scaled GPSR solve mapped back to transmittance units,
/// negatives clamped to zero.
GicsResult gics_reconstruct(const MeasurementSet& ms, const GicsParams& p);

}  // namespace ghost
