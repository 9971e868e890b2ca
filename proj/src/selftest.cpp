#include "ghostbench/selftest.hpp"

#include "ghostbench/forward.hpp"
#include "ghostbench/recon_gics.hpp"
#include "ghostbench/rng.hpp"

#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace ghost {

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  GaussianStream rng(seed);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
  return a;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  struct Check {
    std::string name;
    std::function<bool()> run;
  };
  const std::vector<Check> checks{
      {"coherence length of 650nm, 400mm, 0.9397mm is 276.7um",
       [] {
         auto c = OpticalConfig::for_coherence_length(276.7e-6);
         c.source_width = 0.9397e-3;
         return std::abs(coherence_length(c) - 276.7e-6) < 0.05e-6;
       }},
      {"speckle frames are reproducible from (seed, index)",
       [] {
         const auto c = OpticalConfig::for_coherence_length(135.5e-6);
         const auto a = synthesize_frame(c, 7, 3);
         const auto b = synthesize_frame(c, 7, 3);
         return (a.intensity == b.intensity).all() && a.intensity.minCoeff() >= 0.0;
       }},
      {"bucket equals brute-force re-summation",
       [] {
         const auto c = OpticalConfig::for_coherence_length(68.8e-6);
         const auto mask = make_double_slit(c, {});
         const auto f = synthesize_frame(c, 11, 1);
         double sum = 0.0;
         for (int y = 0; y < c.grid_n; ++y)
           for (int x = 0; x < c.grid_n; ++x) sum += f.intensity(y, x) * mask.values()(y, x);
         return std::abs(bucket_measure(f, mask) - sum) <= 1e-12 * sum;
       }},
      {"tau above ||A^T b||_inf gives the zero solution",
       [] {
         const auto s = make_system(gaussian_matrix(30, 60, 1), gaussian_matrix(30, 1, 2).col(0));
         GicsParams p;
         p.tau = zero_solution_threshold(s) * 1.0001;
         return gpsr_solve(s, p).x.isZero(0.0);
       }},
      {"tau = 0 matches the normal-equations least-squares solution",
       [] {
         const Eigen::MatrixXd a = gaussian_matrix(20, 5, 3);
         const Eigen::VectorXd b = gaussian_matrix(20, 1, 4).col(0);
         const Eigen::VectorXd ls = (a.transpose() * a).ldlt().solve(a.transpose() * b);
         GicsParams p;
         p.tau = 0.0;
         const auto sol = gpsr_solve(make_system(a, b), p);
         return (sol.x - ls).norm() <= 1e-6 * ls.norm();
       }},
      {"GPSR objective agrees with the ISTA oracle",
       [] {
         const Eigen::MatrixXd a = gaussian_matrix(50, 200, 5);
         Eigen::VectorXd truth = Eigen::VectorXd::Zero(200);
         for (int k = 0; k < 10; ++k) truth(k * 19) = (k % 2 ? 1.0 : -1.0) * (1.0 + 0.1 * k);
         const auto s = make_system(a, a * truth);
         const double tau = 0.01 * zero_solution_threshold(s);
         GicsParams p;
         p.tau = tau;
         const auto g = gpsr_solve(s, p);
         const auto r = ista_reference(s, tau, 1e-8);
         return std::abs(g.report.final_objective - r.report.final_objective) <= 1e-6 * r.report.final_objective;
       }},
  };

  bool ok = true;
  for (const auto& c : checks) {
    bool pass = false;
    std::string err;
    try {
      pass = c.run();
    } catch (const std::exception& e) {
      err = e.what();
    }
    out << (pass ? "PASS " : "FAIL ") << c.name;
    if (!err.empty()) out << " (" << err << ")";
    out << "\n";
    ok = ok && pass;
  }
  return ok;
}

}  // namespace ghost
