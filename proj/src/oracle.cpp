#include "dynprobit/oracle.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/rng.hpp"
#include "dynprobit/truncnorm.hpp"

namespace dynprobit {

namespace {

constexpr std::uint64_t kTagOracle = 0x6f7261636c652d69ULL;

}  // namespace

OracleResult is_moments(const PriorCovariance& prior, const DesignMatrices& design, int S,
                        std::uint64_t seed) {
  if (S < 2) throw domain_error("is_moments: S must be >= 2");
  if (design.X.cols() != prior.Omega.rows())
    throw invalid_spec_error("is_moments: design and prior dimensions disagree");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index pn = prior.Omega.rows();
  const Eigen::Index n = design.D.rows();

  Eigen::LLT<Eigen::MatrixXd> llt(prior.Omega);
  Eigen::MatrixXd Oj;
  for (double jitter = 1e-10; llt.info() != Eigen::Success && jitter <= 1.1e-6; jitter *= 10.0) {
    Oj = prior.Omega;
    Oj.diagonal().array() += jitter;
    llt.compute(Oj);
  }
  if (llt.info() != Eigen::Success)
    throw domain_error("is_moments: Omega is not positive definite");

  Eigen::MatrixXd theta(S, pn);
  Eigen::VectorXd log_w(S);
  for (int s = 0; s < S; ++s) {
    Rng rng = make_stream(seed, kTagOracle, static_cast<std::uint64_t>(s));
    const Eigen::VectorXd draw = llt.matrixL() * rng.normal_vector(pn);
    theta.row(s) = draw.transpose();
    const Eigen::VectorXd lin = design.D * draw;
    double lw = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) lw += log_normal_cdf(lin[t]);
    log_w[s] = lw;
  }

  // Self-normalized weights on the shifted scale; all ratios below are shift-invariant.
  const double lmax = log_w.maxCoeff();
  if (!std::isfinite(lmax))
    throw degenerate_weights_error("is_moments: all importance weights are zero; increase S "
                                   "or check the model scale");
  const Eigen::VectorXd v = (log_w.array() - lmax).exp();
  const double v_sum = v.sum();
  const Eigen::VectorXd wt = v / v_sum;  // normalized weights

  const double ess = 1.0 / wt.squaredNorm();
  if (ess < 50.0)
    throw degenerate_weights_error("is_moments: effective sample size " + std::to_string(ess) +
                                   " is below 50; increase S");

  OracleResult out;
  out.draws = S;
  out.ess = ess;
  out.mean = theta.transpose() * wt;
  const Eigen::MatrixXd centered = theta.rowwise() - out.mean.transpose();
  out.sd = (centered.array().square().matrix().transpose() * wt).cwiseSqrt();
  // Delta-method SE of a self-normalized mean: sqrt(sum_s wt_s^2 (theta_s - mean)^2).
  out.mc_se_mean =
      (centered.array().square().matrix().transpose() * wt.cwiseAbs2()).cwiseSqrt();

  out.log_marginal_likelihood = lmax + std::log(v_sum) - std::log(static_cast<double>(S));
  const double v_mean = v_sum / static_cast<double>(S);
  const double v_var = (v.array() - v_mean).square().sum() / static_cast<double>(S - 1);
  out.log_marginal_likelihood_se =
      std::sqrt(v_var / static_cast<double>(S)) / v_mean;

  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

MomentSummary oracle_moments(const OracleResult& oracle) {
  MomentSummary out;
  out.method = Method::kOracle;
  out.mean = oracle.mean;
  out.sd = oracle.sd;
  out.mc_se_mean = oracle.mc_se_mean;
  out.draws = oracle.draws;
  out.wall_time_seconds = oracle.elapsed_seconds;
  return out;
}

}  // namespace dynprobit
