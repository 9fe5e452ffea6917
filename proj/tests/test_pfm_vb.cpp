#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/model.hpp"
#include "dynprobit/oracle.hpp"
#include "dynprobit/pfm_vb.hpp"
#include "dynprobit/rng.hpp"
#include "oracles.hpp"

using namespace dynprobit;

namespace {

struct Problem {
  PriorCovariance prior;
  DesignMatrices design;
};

Problem random_problem(Rng& rng, int n, int p, bool pd_innovations = true) {
  testor::RandomModelOptions options;
  options.pd_innovations = pd_innovations;
  const ModelSpec spec = testor::random_model(rng, n, p, options);
  BinarySeries data;
  data.y = testor::random_binary(rng, n);
  return {build_prior_covariance(spec), build_design(spec, data)};
}

Problem unit_problem() {
  std::vector<Eigen::VectorXd> x(1, Eigen::VectorXd::Ones(1));
  const ModelSpec spec = ModelSpec::homogeneous(
      1, x, Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1),
      Eigen::MatrixXd::Identity(1, 1));
  BinarySeries data;
  data.y = Eigen::VectorXi::Ones(1);
  return {build_prior_covariance(spec), build_design(spec, data)};
}

}  // namespace

TEST_CASE("compute_V equals direct inversion on random problems", "[pfm]") {
  Rng rng = make_stream(1001, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform() * 19.0);
    const int p = 1 + static_cast<int>(rng.uniform() * 3.0);
    const Problem prob = random_problem(rng, n, p);
    const Eigen::MatrixXd V = compute_V(prob.prior, prob.design);
    const Eigen::MatrixXd ref = testor::direct_V(prob.prior.Omega, prob.design.X);
    const double scale = ref.cwiseAbs().maxCoeff();
    REQUIRE((V - ref).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, scale));
  }
}

TEST_CASE("compute_V works when Omega is singular (Woodbury, no prior inverse)", "[pfm]") {
  // W = 0, G = I makes Omega rank-1 (all blocks equal P0); the direct-inverse reference would
  // fail here, but V = (Omega^{-1} + X'X)^{-1} still has a well-defined Woodbury limit.
  std::vector<Eigen::VectorXd> x(3, Eigen::VectorXd::Ones(1));
  const ModelSpec spec = ModelSpec::homogeneous(
      3, x, Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Zero(1, 1),
      Eigen::MatrixXd::Identity(1, 1));
  BinarySeries data;
  data.y = Eigen::VectorXi::Ones(3);
  const PriorCovariance prior = build_prior_covariance(spec);
  const DesignMatrices design = build_design(spec, data);
  const Eigen::MatrixXd V = compute_V(prior, design);
  // theta_1 = theta_2 = theta_3 =: u with prior N(0,1) and three unit observations:
  // posterior variance of u is 1/(1 + 3) on every coordinate pair.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) REQUIRE(V(i, j) == Catch::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("unit case: every PFM quantity hits its closed form", "[pfm]") {
  const Problem prob = unit_problem();
  const PfmSolution sol = cavi_fit(prob.prior, prob.design);

  REQUIRE(sol.converged);
  REQUIRE(sol.V(0, 0) == Catch::Approx(0.5).epsilon(1e-14));
  REQUIRE(sol.sigma_star_sq[0] == Catch::Approx(2.0).epsilon(1e-14));
  REQUIRE(sol.mu_star[0] == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(sol.z_bar[0] == Catch::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-12));

  const MomentSummary mom = pfm_moments(sol, prob.design);
  REQUIRE(mom.mean[0] == Catch::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-8));
  REQUIRE(mom.sd[0] * mom.sd[0] == Catch::Approx(1.0 - 1.0 / M_PI).epsilon(1e-8));
}

TEST_CASE("conditional scales always exceed one", "[pfm]") {
  Rng rng = make_stream(1002, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Problem prob = random_problem(rng, 2 + rep, 1 + rep % 3);
    const PfmSolution sol = cavi_fit(prob.prior, prob.design);
    REQUIRE((sol.sigma_star_sq.array() > 1.0).all());
    // The covariance correction stays positive: sigma^2_i > (z_bar_i - mu_i) z_bar_i.
    const Eigen::ArrayXd d = sol.sigma_star_sq.array() -
                             (sol.z_bar.array() - sol.mu_star.array()) * sol.z_bar.array();
    REQUIRE((d > 0.0).all());
  }
}

TEST_CASE("CAVI converges and satisfies the fixed-point equations", "[pfm]") {
  Rng rng = make_stream(1003, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform() * 19.0);
    const int p = 1 + static_cast<int>(rng.uniform() * 3.0);
    const Problem prob = random_problem(rng, n, p);
    CaviConfig config;
    config.tolerance = 1e-8;
    const PfmSolution sol = cavi_fit(prob.prior, prob.design, config);
    REQUIRE(sol.converged);
    REQUIRE(sol.iterations >= 1);
    REQUIRE(sol.residual <= 10.0 * config.tolerance);
  }
}

TEST_CASE("non-convergence is reported, not thrown", "[pfm]") {
  Rng rng = make_stream(1004, 0);
  const Problem prob = random_problem(rng, 25, 2);
  CaviConfig config;
  config.tolerance = 1e-14;  // unreachable in one sweep
  config.max_sweeps = 1;
  const PfmSolution sol = cavi_fit(prob.prior, prob.design, config);
  REQUIRE_FALSE(sol.converged);
  REQUIRE(sol.iterations == 1);
}

TEST_CASE("warm starts land on the same fixed point", "[pfm]") {
  Rng rng = make_stream(1005, 0);
  const Problem prob = random_problem(rng, 12, 2);
  const PfmSolution cold = cavi_fit(prob.prior, prob.design);

  CaviConfig warm;
  warm.init_z_bar = cold.z_bar;
  const PfmSolution hot = cavi_fit(prob.prior, prob.design, warm);
  REQUIRE(hot.converged);
  REQUIRE(hot.iterations <= 2);
  REQUIRE((hot.z_bar - cold.z_bar).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("closed-form moments match empirical moments of sample_pfm", "[pfm]") {
  Rng rng = make_stream(1006, 0);
  const Problem prob = random_problem(rng, 4, 2);
  const PfmSolution sol = cavi_fit(prob.prior, prob.design);
  const MomentSummary mom = pfm_moments(sol, prob.design);

  const int R = 30000;
  const Eigen::MatrixXd draws = sample_pfm(sol, prob.design, R, 2027);
  for (int i = 0; i < 8; ++i) {
    const double se = mom.sd[i] / std::sqrt(static_cast<double>(R));
    REQUIRE(std::abs(draws.col(i).mean() - mom.mean[i]) < 3.0 * se);
    const double emp_sd =
        std::sqrt((draws.col(i).array() - draws.col(i).mean()).square().sum() / (R - 1));
    REQUIRE(std::abs(emp_sd - mom.sd[i]) < 3.0 * mom.sd[i] / std::sqrt(2.0 * R));
  }
}

TEST_CASE("PFM is exact for a single observation with two coefficients", "[pfm]") {
  // n = 1 keeps q(theta | z) un-factorized, so PFM must agree with the oracle.
  Rng rng = make_stream(1007, 0);
  const Problem prob = random_problem(rng, 1, 2);
  const PfmSolution sol = cavi_fit(prob.prior, prob.design);
  const MomentSummary mom = pfm_moments(sol, prob.design);
  const OracleResult oracle = is_moments(prob.prior, prob.design, 400000, 31);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(std::abs(mom.mean[i] - oracle.mean[i]) < 3.0 * oracle.mc_se_mean[i]);
    REQUIRE(mom.sd[i] == Catch::Approx(oracle.sd[i]).epsilon(0.02));
  }
}

TEST_CASE("sample_pfm is deterministic in the seed", "[pfm]") {
  Rng rng = make_stream(1008, 0);
  const Problem prob = random_problem(rng, 5, 1);
  const PfmSolution sol = cavi_fit(prob.prior, prob.design);
  REQUIRE(sample_pfm(sol, prob.design, 100, 1) == sample_pfm(sol, prob.design, 100, 1));
  REQUIRE(sample_pfm(sol, prob.design, 100, 1) != sample_pfm(sol, prob.design, 100, 2));
}

TEST_CASE("cavi_fit validates its configuration", "[pfm]") {
  const Problem prob = unit_problem();
  CaviConfig bad;
  bad.tolerance = 0.0;
  REQUIRE_THROWS_AS(cavi_fit(prob.prior, prob.design, bad), domain_error);
  bad = {};
  bad.max_sweeps = 0;
  REQUIRE_THROWS_AS(cavi_fit(prob.prior, prob.design, bad), domain_error);
  bad = {};
  bad.init_z_bar = Eigen::VectorXd::Ones(5);  // wrong length
  REQUIRE_THROWS_AS(cavi_fit(prob.prior, prob.design, bad), domain_error);
}
