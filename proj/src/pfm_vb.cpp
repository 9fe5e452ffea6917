#include "dynprobit/pfm_vb.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/rng.hpp"
#include "dynprobit/truncnorm.hpp"

namespace dynprobit {

namespace {

constexpr std::uint64_t kTagPfmDraws = 0x70666d2d64726177ULL;

Eigen::VectorXd default_init(const DesignMatrices& design) {
  Eigen::VectorXd z(design.n);
  for (int i = 0; i < design.n; ++i) z[i] = trunc_norm_mean(0.0, 1.0, design.sign[i]);
  return z;
}

}  // namespace

Eigen::MatrixXd compute_V(const PriorCovariance& prior, const DesignMatrices& design) {
  if (design.X.cols() != prior.Omega.rows())
    throw invalid_spec_error("compute_V: design and prior dimensions disagree");
  const Eigen::MatrixXd B = design.X * prior.Omega;  // n x pn
  Eigen::MatrixXd M = B * design.X.transpose();
  M.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw domain_error("compute_V: I + X Omega X' is not positive definite; Omega is invalid");
  Eigen::MatrixXd V = prior.Omega - B.transpose() * llt.solve(B);
  V = 0.5 * (V + V.transpose()).eval();
  return V;
}

PfmSolution cavi_fit(const PriorCovariance& prior, const DesignMatrices& design,
                     const CaviConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(config.tolerance > 0.0)) throw domain_error("cavi_fit: tolerance must be positive");
  if (config.max_sweeps < 1) throw domain_error("cavi_fit: max_sweeps must be >= 1");
  const int n = design.n, p = design.p;

  PfmSolution sol;
  sol.V = compute_V(prior, design);

  // Row i of XV is X_[i] V; the diagonal h_i = X_[i] V X_[i]' gives the conditional scales.
  const Eigen::MatrixXd XV = design.X * sol.V;  // n x pn
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i)
    h[i] = XV.row(i).segment(i * p, p).dot(design.covariates.row(i));
  if ((h.array() >= 1.0).any())
    throw domain_error("cavi_fit: leverage X_[i] V X_[i]' reached 1; system is degenerate");
  sol.sigma_star_sq = (1.0 - h.array()).inverse();
  const Eigen::VectorXd sigma_star = sol.sigma_star_sq.cwiseSqrt();

  sol.z_bar = config.init_z_bar ? *config.init_z_bar : default_init(design);
  if (sol.z_bar.size() != n) throw domain_error("cavi_fit: init_z_bar must have length n");
  sol.mu_star.setZero(n);

  // w = X' z_bar is maintained incrementally: only block i of X's row i is nonzero, so each
  // coordinate update costs O(p) for w plus O(pn) for the coupling term.
  Eigen::VectorXd w = design.X.transpose() * sol.z_bar;
  for (long sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (int i = 0; i < n; ++i) {
      const double coupling = XV.row(i).dot(w) - h[i] * sol.z_bar[i];  // X_[i] V X_[-i]' z_{-i}
      sol.mu_star[i] = sol.sigma_star_sq[i] * coupling;
      const double z_new = trunc_norm_mean(sol.mu_star[i], sigma_star[i], design.sign[i]);
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

  // Fixed-point residual: recompute each mu from the settled z_bar and compare against the
  // stored mu*, i.e. max_i |mu*_i - sigma*^2_i X_[i] V X_[-i]' z_bar_{-i}|.
  double residual = 0.0;
  for (int i = 0; i < n; ++i) {
    const double mu = sol.sigma_star_sq[i] * (XV.row(i).dot(w) - h[i] * sol.z_bar[i]);
    residual = std::max(residual, std::abs(sol.mu_star[i] - mu));
  }
  sol.residual = residual;
  sol.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

Eigen::MatrixXd pfm_covariance(const PfmSolution& sol, const DesignMatrices& design) {
  const Eigen::VectorXd d =
      sol.sigma_star_sq.array() -
      (sol.z_bar.array() - sol.mu_star.array()) * sol.z_bar.array();
  const Eigen::MatrixXd XV = design.X * sol.V;
  Eigen::MatrixXd cov = sol.V + XV.transpose() * d.asDiagonal() * XV;
  return 0.5 * (cov + cov.transpose()).eval();
}

MomentSummary pfm_moments(const PfmSolution& sol, const DesignMatrices& design) {
  MomentSummary out;
  out.method = Method::kPfm;
  out.mean = sol.V * (design.X.transpose() * sol.z_bar);
  out.sd = pfm_covariance(sol, design).diagonal().cwiseMax(0.0).cwiseSqrt();
  out.wall_time_seconds = sol.elapsed_seconds;
  return out;
}

Eigen::MatrixXd sample_pfm(const PfmSolution& sol, const DesignMatrices& design, int R,
                           std::uint64_t seed) {
  if (R < 1) throw domain_error("sample_pfm: R must be >= 1");
  const int n = design.n;
  const Eigen::Index pn = sol.V.rows();
  const Eigen::VectorXd sigma_star = sol.sigma_star_sq.cwiseSqrt();
  const Eigen::MatrixXd VXt = (design.X * sol.V).transpose();  // pn x n

  Eigen::LLT<Eigen::MatrixXd> llt(sol.V);
  Eigen::MatrixXd Vj;
  for (double jitter = 1e-10; llt.info() != Eigen::Success && jitter <= 1.1e-6; jitter *= 10.0) {
    Vj = sol.V;
    Vj.diagonal().array() += jitter;
    llt.compute(Vj);
  }
  if (llt.info() != Eigen::Success) throw domain_error("sample_pfm: V is not positive definite");

  Eigen::MatrixXd draws(R, pn);
  Eigen::VectorXd z(n);
  for (int r = 0; r < R; ++r) {
    Rng rng = make_stream(seed, kTagPfmDraws, static_cast<std::uint64_t>(r));
    for (int i = 0; i < n; ++i)
      z[i] = sample_trunc_norm(sol.mu_star[i], sigma_star[i], design.sign[i], rng);
    draws.row(r) = (VXt * z + llt.matrixL() * rng.normal_vector(pn)).transpose();
  }
  return draws;
}

}  // namespace dynprobit
