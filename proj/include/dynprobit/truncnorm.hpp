#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>

#include "dynprobit/rng.hpp"

namespace dynprobit {

// Standard normal density.
double normal_pdf(double x);

// Standard normal CDF via erfc; relative error below 1e-12 for |x| <= 8.
double normal_cdf(double x);

// log Phi(x), finite and accurate down to x ~ -1e7: erfc-based for x > -10, Mills-ratio
// asymptotic series below that (absolute error <= 1e-10 everywhere on the supported range).
double log_normal_cdf(double x);

// Inverse Mills ratio zeta(x) = phi(x) / Phi(x); series evaluation in the deep left tail so
// the ratio never under/overflows.
double mills_inverse(double x);

// Mean of N(mu, sigma^2) truncated to sign * x > 0 (sign must be +1 or -1, sigma > 0):
// mu + sign * sigma * zeta(sign * mu / sigma).
double trunc_norm_mean(double mu, double sigma, int sign);

// Exact draw from N(mu, sigma^2) truncated to sign * x > 0. Inverse-CDF when the truncation
// point is within 5 sd of mu, exponential-proposal rejection (Robert 1995) in the far tail.
// The returned value strictly satisfies the sign constraint.
double sample_trunc_norm(double mu, double sigma, int sign, Rng& rng);

enum class OrthantStrategy { kRejection, kGibbs, kAuto };

struct OrthantSamplerConfig {
  OrthantStrategy strategy = OrthantStrategy::kAuto;
  // Gibbs burn-in in full sweeps; defaults to 50 * k when unset.
  std::optional<int> burn_in;
  int thinning = 5;
  // Per-retained-draw cap on rejection proposals.
  long max_rejection_attempts = 1000000;
  std::uint64_t seed = 0;
};

struct OrthantDiagnostics {
  OrthantStrategy strategy_used = OrthantStrategy::kRejection;
  // Pilot estimate of P(X > 0); NaN unless the auto policy ran a pilot.
  double estimated_orthant_probability = std::numeric_limits<double>::quiet_NaN();
  // Accepted fraction over all proposals; NaN for Gibbs.
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  long total_proposals = 0;
  // Diagonal jitter added to make the Cholesky succeed; 0 when none was needed.
  double gamma_jitter = 0.0;
  int burn_in_sweeps = 0;
  int thinning = 0;
};

// Draws `count` samples from N(0, Gamma) conditioned on the positive orthant {x : x > 0}.
// Gamma must be a correlation matrix (unit diagonal to 1e-8, symmetric, PSD to relative
// tolerance 1e-8). Rejection gives exact i.i.d. rows; Gibbs runs one systematic-scan chain
// with burn-in and thinning; auto picks by a pilot acceptance estimate (>= 1e-3 -> rejection).
// Returns count x k, one draw per row. Fully deterministic given config.seed.
Eigen::MatrixXd sample_orthant_tmvn(const Eigen::MatrixXd& Gamma, int count,
                                    const OrthantSamplerConfig& config,
                                    OrthantDiagnostics* diagnostics = nullptr);

}  // namespace dynprobit
