#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "dynprobit/model.hpp"
#include "dynprobit/sun_smoother.hpp"

namespace dynprobit {

struct OracleResult {
  Eigen::VectorXd mean;       // pn self-normalized posterior means
  Eigen::VectorXd sd;         // pn posterior sd's
  Eigen::VectorXd mc_se_mean; // pn delta-method standard errors of the means
  double log_marginal_likelihood = 0.0;
  double log_marginal_likelihood_se = 0.0;
  double ess = 0.0;           // effective sample size (sum w)^2 / sum w^2
  long draws = 0;
  double elapsed_seconds = 0.0;
};

// Reference moments by prior importance sampling: theta_s ~ N(0, Omega), weights
// w_s = prod_t Phi((D theta_s)_t) accumulated in log space. Used as an independent check on
// both the exact sampler and the variational fits. Throws degenerate_weights_error when the
// weights collapse (all numerically zero, or ESS below 50).
OracleResult is_moments(const PriorCovariance& prior, const DesignMatrices& design, int S,
                        std::uint64_t seed);

MomentSummary oracle_moments(const OracleResult& oracle);

}  // namespace dynprobit
