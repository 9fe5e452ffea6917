#include "dynprobit/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <utility>

#include "dynprobit/errors.hpp"
#include "dynprobit/rng.hpp"

namespace dynprobit {

namespace {

constexpr std::uint64_t kTagSimulate = 0x73696d756c617465ULL;

bool symmetric_within(const Eigen::MatrixXd& M, double tol) {
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, M.cwiseAbs().maxCoeff());
}

void check_covariance(const Eigen::MatrixXd& M, int p, bool strictly_pd, const std::string& name) {
  if (M.rows() != p || M.cols() != p)
    throw invalid_spec_error(name + " must be " + std::to_string(p) + "x" + std::to_string(p));
  if (!M.allFinite()) throw invalid_spec_error(name + " has non-finite entries");
  if (!symmetric_within(M, 1e-8)) throw invalid_spec_error(name + " is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (strictly_pd) {
    if (!(lo > 0.0)) throw invalid_spec_error(name + " must be positive definite");
  } else if (lo < -1e-8 * std::max(hi, 1.0)) {
    throw invalid_spec_error(name + " must be positive semidefinite");
  }
}

// Symmetric PSD square root, tolerant of exact rank deficiency (W_t may be singular).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

ModelSpec ModelSpec::homogeneous(int n, std::vector<Eigen::VectorXd> x, Eigen::MatrixXd G,
                                 Eigen::MatrixXd W, Eigen::MatrixXd P0) {
  ModelSpec spec;
  spec.n = n;
  spec.p = static_cast<int>(P0.rows());
  spec.x = std::move(x);
  spec.G.assign(n, G);
  spec.W.assign(n, W);
  spec.P0 = std::move(P0);
  return spec;
}

void validate(const ModelSpec& spec) {
  if (spec.n < 1) throw invalid_spec_error("n must be >= 1");
  if (spec.p < 1) throw invalid_spec_error("p must be >= 1");
  const auto n = static_cast<std::size_t>(spec.n);
  if (spec.x.size() != n) throw invalid_spec_error("x must hold n covariate vectors");
  if (spec.G.size() != n) throw invalid_spec_error("G must hold n transition matrices");
  if (spec.W.size() != n) throw invalid_spec_error("W must hold n innovation covariances");
  for (int t = 0; t < spec.n; ++t) {
    const std::string at = " at t=" + std::to_string(t + 1);
    if (spec.x[t].size() != spec.p) throw invalid_spec_error("x has wrong length" + at);
    if (!spec.x[t].allFinite()) throw invalid_spec_error("x has non-finite entries" + at);
    if (spec.G[t].rows() != spec.p || spec.G[t].cols() != spec.p)
      throw invalid_spec_error("G has wrong shape" + at);
    if (!spec.G[t].allFinite()) throw invalid_spec_error("G has non-finite entries" + at);
    check_covariance(spec.W[t], spec.p, /*strictly_pd=*/false, "W" + at);
  }
  check_covariance(spec.P0, spec.p, /*strictly_pd=*/true, "P0");
}

PriorCovariance build_prior_covariance(const ModelSpec& spec) {
  validate(spec);
  const int n = spec.n, p = spec.p;
  PriorCovariance prior;
  prior.n = n;
  prior.p = p;
  prior.Omega.setZero(p * n, p * n);
  Eigen::MatrixXd& Omega = prior.Omega;

  // Diagonal blocks by the forward variance recursion, starting from theta_0 ~ N(0, P0).
  Eigen::MatrixXd var = spec.P0;
  for (int t = 0; t < n; ++t) {
    var = spec.G[t] * var * spec.G[t].transpose() + spec.W[t];
    var = 0.5 * (var + var.transpose());
    Omega.block(t * p, t * p, p, p) = var;
  }
  // Off-diagonal blocks: cov(theta_t, theta_l) = G_t ... G_{l+1} var(theta_l) for t > l.
  for (int l = 0; l < n; ++l) {
    Eigen::MatrixXd C = Omega.block(l * p, l * p, p, p);
    for (int t = l + 1; t < n; ++t) {
      C = spec.G[t] * C;
      Omega.block(t * p, l * p, p, p) = C;
      Omega.block(l * p, t * p, p, p) = C.transpose();
    }
  }
  return prior;
}

void validate(const ModelSpec& spec, const BinarySeries& data) {
  if (data.y.size() != spec.n) throw invalid_input_error("y must have length n");
  for (int t = 0; t < spec.n; ++t)
    if (data.y[t] != 0 && data.y[t] != 1)
      throw invalid_input_error("y must be 0/1; offending entry at t=" + std::to_string(t + 1));
}

DesignMatrices build_design(const ModelSpec& spec, const BinarySeries& data) {
  validate(spec);
  validate(spec, data);
  const int n = spec.n, p = spec.p;
  DesignMatrices d;
  d.n = n;
  d.p = p;
  d.X.setZero(n, p * n);
  d.D.setZero(n, p * n);
  d.covariates.resize(n, p);
  d.sign.resize(n);
  for (int t = 0; t < n; ++t) {
    d.sign[t] = 2 * data.y[t] - 1;
    d.covariates.row(t) = spec.x[t].transpose();
    d.X.block(t, t * p, 1, p) = spec.x[t].transpose();
    d.D.block(t, t * p, 1, p) = d.sign[t] * spec.x[t].transpose();
  }
  return d;
}

SimulationResult simulate_data(const ModelSpec& spec, std::uint64_t seed) {
  validate(spec);
  const int n = spec.n, p = spec.p;
  Rng rng = make_stream(seed, kTagSimulate);

  Eigen::LLT<Eigen::MatrixXd> p0_llt(spec.P0);
  if (p0_llt.info() != Eigen::Success)
    throw invalid_spec_error("P0 must be positive definite for simulation");

  SimulationResult sim;
  sim.theta.resize(n, p);
  sim.z.resize(n);
  sim.y.resize(n);

  Eigen::VectorXd theta = p0_llt.matrixL() * rng.normal_vector(p);
  for (int t = 0; t < n; ++t) {
    theta = spec.G[t] * theta + psd_sqrt(spec.W[t]) * rng.normal_vector(p);
    sim.theta.row(t) = theta.transpose();
    sim.z[t] = spec.x[t].dot(theta) + rng.normal();
    sim.y[t] = sim.z[t] > 0.0 ? 1 : 0;
  }
  return sim;
}

}  // namespace dynprobit
