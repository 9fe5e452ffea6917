#pragma once

#include <Eigen/Core>
#include <optional>

#include "dynprobit/model.hpp"
#include "dynprobit/truncnorm.hpp"

namespace dynprobit {

enum class Method { kIid, kPfm, kMf, kOracle };

const char* method_name(Method m);

// Unified-skew-normal parameters of the smoothing distribution p(theta | y). With
// Omega = omega OmegaBar omega and the signed design D:
//   s     = sqrt(diag(D Omega D' + I_n))
//   Gamma = s^{-1} (D Omega D' + I_n) s^{-1}
//   Delta = omega^{-1} Omega D' s^{-1}
// Location xi and truncation shift gamma are identically zero under the N(0, Omega) prior, so
// they are not stored.
struct SunParams {
  Eigen::VectorXd omega;     // pn marginal prior sd's
  Eigen::MatrixXd OmegaBar;  // pn x pn prior correlation
  Eigen::VectorXd s;         // n conditional scales
  Eigen::MatrixXd Gamma;     // n x n latent correlation
  Eigen::MatrixXd Delta;     // pn x n cross term
};

// Throws degenerate_model_error if some coordinate has (numerically) zero prior variance.
SunParams compute_sun_params(const PriorCovariance& prior, const DesignMatrices& design);

struct SmootherDiagnostics {
  OrthantDiagnostics orthant;
  // Jitter used on the Gaussian-part covariance OmegaBar - A Delta' (0 when none was needed).
  double gaussian_jitter = 0.0;
  double elapsed_seconds = 0.0;
};

// R exact i.i.d. draws from the smoothing distribution, one per row (R x pn):
//   theta = omega .* (U0 + A U1),  A = Delta Gamma^{-1},
//   U0 ~ N(0, OmegaBar - A Delta'),  U1 ~ N(0, Gamma) truncated to the positive orthant.
// Orthant draws and per-replicate U0 streams both derive from config.seed.
Eigen::MatrixXd sample_smoothing_iid(const SunParams& params, int R,
                                     const OrthantSamplerConfig& config,
                                     SmootherDiagnostics* diagnostics = nullptr);

struct MomentSummary {
  Eigen::VectorXd mean;  // pn
  Eigen::VectorXd sd;    // pn
  std::optional<Eigen::VectorXd> mc_se_mean;  // set for sampling-based summaries
  Method method = Method::kIid;
  std::optional<long> draws;
  double wall_time_seconds = 0.0;
};

// Column moments of a draws matrix (R x pn); sd uses the R-1 divisor, mc_se = sd / sqrt(R).
MomentSummary estimate_moments(const Eigen::MatrixXd& draws, Method method,
                               double wall_time_seconds = 0.0);

}  // namespace dynprobit
