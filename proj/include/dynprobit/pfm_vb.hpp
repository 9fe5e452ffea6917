#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>

#include "dynprobit/model.hpp"
#include "dynprobit/sun_smoother.hpp"

namespace dynprobit {

// Smoothing covariance of the Gaussian pseudo-regression, V = (Omega^{-1} + X'X)^{-1},
// evaluated by the Woodbury identity V = Omega - Omega X' (I_n + X Omega X')^{-1} X Omega so
// Omega itself is never inverted.
Eigen::MatrixXd compute_V(const PriorCovariance& prior, const DesignMatrices& design);

struct CaviConfig {
  double tolerance = 1e-6;  // on max_i |delta z_bar_i| over a full sweep
  long max_sweeps = 10000;
  // Optional warm start for z_bar; defaults to the truncated-normal means at mu = 0.
  std::optional<Eigen::VectorXd> init_z_bar;
};

// Partially factorized variational fit. q(theta | z) stays the exact conditional
// N(V X' z, V); the z_i marginals are truncated normals TN(mu_i, sigma_i^2) with
//   sigma_i^2 = 1 / (1 - X_[i] V X_[i]')
//   mu_i      = sigma_i^2 * X_[i] V X_[-i]' z_bar_{-i}
// solved for by coordinate ascent on the mu/z_bar system.
struct PfmSolution {
  Eigen::MatrixXd V;               // pn x pn
  Eigen::VectorXd sigma_star_sq;   // n, each > 1
  Eigen::VectorXd mu_star;         // n
  Eigen::VectorXd z_bar;           // n truncated-normal means at the fixed point
  long iterations = 0;             // full sweeps performed
  bool converged = false;
  double residual = 0.0;           // max fixed-point violation at exit
  double elapsed_seconds = 0.0;
};

PfmSolution cavi_fit(const PriorCovariance& prior, const DesignMatrices& design,
                     const CaviConfig& config = {});

// Closed-form posterior covariance of the PFM approximation:
//   V + V X' diag(sigma_i^2 - (z_bar_i - mu_i) z_bar_i) X V.
Eigen::MatrixXd pfm_covariance(const PfmSolution& sol, const DesignMatrices& design);

// Closed-form mean V X' z_bar and the sd's from pfm_covariance; no Monte Carlo error.
MomentSummary pfm_moments(const PfmSolution& sol, const DesignMatrices& design);

// i.i.d. draws from the fitted approximation (R x pn): z_i ~ TN(mu_i, sigma_i^2) on the side
// given by design.sign, then theta | z ~ N(V X' z, V).
Eigen::MatrixXd sample_pfm(const PfmSolution& sol, const DesignMatrices& design, int R,
                           std::uint64_t seed);

}  // namespace dynprobit
