#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace dynprobit {

// Univariate dynamic probit:
//   y_t = 1(z_t > 0),  z_t = x_t' theta_t + eta_t,        eta_t ~ N(0, 1)
//   theta_t = G_t theta_{t-1} + eps_t,                    eps_t ~ N(0, W_t)
//   theta_0 ~ N(0, P0)
// States are stacked as theta = (theta_1', ..., theta_n')' of length p*n.
struct ModelSpec {
  int n = 0;
  int p = 0;
  std::vector<Eigen::VectorXd> x;  // n covariate vectors, each length p
  std::vector<Eigen::MatrixXd> G;  // n transition matrices, each p x p
  std::vector<Eigen::MatrixXd> W;  // n innovation covariances, each p x p, PSD
  Eigen::MatrixXd P0;              // p x p, PD

  // Convenience builder for time-invariant G/W.
  static ModelSpec homogeneous(int n, std::vector<Eigen::VectorXd> x, Eigen::MatrixXd G,
                               Eigen::MatrixXd W, Eigen::MatrixXd P0);
};

// Throws invalid_spec_error on dimension mismatches or covariances outside tolerance
// (W_t symmetric PSD, P0 symmetric PD; relative eigenvalue tolerance 1e-8).
void validate(const ModelSpec& spec);

struct PriorCovariance {
  Eigen::MatrixXd Omega;  // pn x pn, marginal prior covariance of the stacked states
  int n = 0;
  int p = 0;

  Eigen::Ref<const Eigen::MatrixXd> block(int t, int l) const {
    return Omega.block(t * p, l * p, p, p);
  }
};

// Marginal covariance of the stacked state path: diagonal blocks follow the forward recursion
// var_t = G_t var_{t-1} G_t' + W_t (var_0 = P0), off-diagonal blocks Omega_[tl] = G_{l+1}^t
// Omega_[ll] for t > l, where G_{l+1}^t = G_t ... G_{l+1} (empty product = I).
PriorCovariance build_prior_covariance(const ModelSpec& spec);

struct BinarySeries {
  Eigen::VectorXi y;  // n entries in {0, 1}
};

// Throws invalid_input_error unless y has length n and only 0/1 entries.
void validate(const ModelSpec& spec, const BinarySeries& data);

struct DesignMatrices {
  Eigen::MatrixXd X;           // n x pn, row t carries x_t' in block t
  Eigen::MatrixXd D;           // n x pn, row t = (2 y_t - 1) x_t' in block t
  Eigen::MatrixXd covariates;  // n x p, row t is x_t' (dense copy for row-local work)
  Eigen::VectorXi sign;        // 2 y_t - 1
  int n = 0;
  int p = 0;
};

DesignMatrices build_design(const ModelSpec& spec, const BinarySeries& data);

struct SimulationResult {
  Eigen::MatrixXd theta;  // n x p, row t is theta_t'
  Eigen::VectorXd z;      // latent utilities
  Eigen::VectorXi y;      // observed binaries
};

// Forward-simulates states, latents, and binaries from the model. Deterministic in seed.
SimulationResult simulate_data(const ModelSpec& spec, std::uint64_t seed);

}  // namespace dynprobit
