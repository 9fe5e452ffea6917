#include "dynprobit/mf_vb.hpp"

#include <chrono>
#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/truncnorm.hpp"

namespace dynprobit {

namespace {

Eigen::VectorXd default_init(const DesignMatrices& design) {
  Eigen::VectorXd z(design.n);
  for (int i = 0; i < design.n; ++i) z[i] = trunc_norm_mean(0.0, 1.0, design.sign[i]);
  return z;
}

}  // namespace

MfSolution mf_fit(const PriorCovariance& prior, const DesignMatrices& design,
                  const CaviConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(config.tolerance > 0.0)) throw domain_error("mf_fit: tolerance must be positive");
  if (config.max_sweeps < 1) throw domain_error("mf_fit: max_sweeps must be >= 1");
  const int n = design.n, p = design.p;

  MfSolution sol;
  sol.V = compute_V(prior, design);
  const Eigen::MatrixXd XV = design.X * sol.V;

  sol.z_bar = config.init_z_bar ? *config.init_z_bar : default_init(design);
  if (sol.z_bar.size() != n) throw domain_error("mf_fit: init_z_bar must have length n");
  sol.m.setZero(n);

  // Unlike the PFM updates, m_i keeps the own-observation term: m_i = X_[i] V X' z_bar.
  Eigen::VectorXd w = design.X.transpose() * sol.z_bar;
  for (long sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (int i = 0; i < n; ++i) {
      sol.m[i] = XV.row(i).dot(w);
      const double z_new = trunc_norm_mean(sol.m[i], 1.0, design.sign[i]);
      const double delta = z_new - sol.z_bar[i];
      if (delta != 0.0) {
        w.segment(i * p, p) += delta * design.covariates.row(i).transpose();
        sol.z_bar[i] = z_new;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    sol.iterations = sweep;
    if (max_delta < config.tolerance) {
      sol.converged = true;
      break;
    }
  }

  // Fixed-point residual in the location parameter: max_i |m_i - X_[i] V X' z_bar|.
  double residual = 0.0;
  for (int i = 0; i < n; ++i) {
    residual = std::max(residual, std::abs(sol.m[i] - XV.row(i).dot(w)));
  }
  sol.residual = residual;
  sol.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

MomentSummary mf_moments(const MfSolution& sol, const DesignMatrices& design) {
  MomentSummary out;
  out.method = Method::kMf;
  out.mean = sol.V * (design.X.transpose() * sol.z_bar);
  out.sd = sol.V.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.wall_time_seconds = sol.elapsed_seconds;
  return out;
}

}  // namespace dynprobit
