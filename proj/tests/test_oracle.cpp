#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/model.hpp"
#include "dynprobit/oracle.hpp"
#include "dynprobit/rng.hpp"
#include "dynprobit/sun_smoother.hpp"
#include "oracles.hpp"

using namespace dynprobit;

namespace {

ModelSpec unit_model() {
  std::vector<Eigen::VectorXd> x(1, Eigen::VectorXd::Ones(1));
  return ModelSpec::homogeneous(1, x, Eigen::MatrixXd::Identity(1, 1),
                                Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Identity(1, 1));
}

struct Problem {
  PriorCovariance prior;
  DesignMatrices design;
};

Problem make_problem(const ModelSpec& spec, const Eigen::VectorXi& y) {
  BinarySeries data;
  data.y = y;
  return {build_prior_covariance(spec), build_design(spec, data)};
}

}  // namespace

TEST_CASE("importance sampler recovers the unit-information closed forms", "[oracle]") {
  const Problem prob = make_problem(unit_model(), Eigen::VectorXi::Ones(1));
  const OracleResult res = is_moments(prob.prior, prob.design, 200000, 7);

  const double pi = std::acos(-1.0);
  const double exact_mean = 1.0 / std::sqrt(pi);
  const double exact_sd = std::sqrt(1.0 - 1.0 / pi);

  REQUIRE(res.draws == 200000);
  REQUIRE(res.mc_se_mean[0] > 0.0);
  REQUIRE(res.mc_se_mean[0] < 0.01);
  CHECK(std::abs(res.mean[0] - exact_mean) <= 3.0 * res.mc_se_mean[0]);
  CHECK(res.sd[0] == Catch::Approx(exact_sd).margin(0.01));

  // Marginal likelihood P(y_1 = 1) = 1/2 exactly: z_1 ~ N(0, 2) under the prior.
  REQUIRE(res.log_marginal_likelihood_se > 0.0);
  REQUIRE(res.log_marginal_likelihood_se < 0.01);
  CHECK(std::abs(res.log_marginal_likelihood - std::log(0.5)) <=
        3.0 * res.log_marginal_likelihood_se);

  // Weights are Phi(theta) with theta ~ N(0,1): E w = 1/2, E w^2 = 1/3, so ESS ~= 3S/4.
  CHECK(res.ess > 0.5 * 200000);
  CHECK(res.ess < 200000);

  const MomentSummary mom = oracle_moments(res);
  REQUIRE(mom.method == Method::kOracle);
  REQUIRE(mom.mc_se_mean.has_value());
  REQUIRE(mom.draws.has_value());
  REQUIRE(*mom.draws == 200000);
}

TEST_CASE("importance sampler agrees with the exact smoother on a random model", "[oracle]") {
  Rng rng = make_stream(616, 1);
  testor::RandomModelOptions options;
  options.pd_innovations = true;
  const ModelSpec spec = testor::random_model(rng, 4, 1, options);
  const Problem prob = make_problem(spec, testor::random_binary(rng, 4));

  const OracleResult oracle = is_moments(prob.prior, prob.design, 100000, 616);

  const SunParams params = compute_sun_params(prob.prior, prob.design);
  OrthantSamplerConfig config;
  config.seed = 617;
  const Eigen::MatrixXd draws = sample_smoothing_iid(params, 20000, config);
  const MomentSummary iid = estimate_moments(draws, Method::kIid);

  for (Eigen::Index j = 0; j < oracle.mean.size(); ++j) {
    const double se =
        std::sqrt(oracle.mc_se_mean[j] * oracle.mc_se_mean[j] +
                  (*iid.mc_se_mean)[j] * (*iid.mc_se_mean)[j]);
    INFO("coordinate " << j);
    CHECK(std::abs(oracle.mean[j] - iid.mean[j]) <= 3.0 * se);
    CHECK(oracle.sd[j] == Catch::Approx(iid.sd[j]).margin(0.05));
  }
}

TEST_CASE("importance sampler is deterministic in the seed", "[oracle]") {
  Rng rng = make_stream(616, 2);
  testor::RandomModelOptions options;
  options.pd_innovations = true;
  const ModelSpec spec = testor::random_model(rng, 3, 2, options);
  const Problem prob = make_problem(spec, testor::random_binary(rng, 3));

  const OracleResult a = is_moments(prob.prior, prob.design, 5000, 99);
  const OracleResult b = is_moments(prob.prior, prob.design, 5000, 99);
  REQUIRE(a.mean == b.mean);
  REQUIRE(a.sd == b.sd);
  REQUIRE(a.log_marginal_likelihood == b.log_marginal_likelihood);
  REQUIRE(a.ess == b.ess);

  const OracleResult c = is_moments(prob.prior, prob.design, 5000, 100);
  REQUIRE(a.mean != c.mean);
}

TEST_CASE("importance sampler flags weight collapse", "[oracle]") {
  // Long series with large covariates: prior draws almost never match all the signs, the
  // weights span hundreds of log-units, and the effective sample size collapses.
  Rng rng = make_stream(616, 3);
  testor::RandomModelOptions options;
  options.pd_innovations = true;
  options.covariate_scale = 4.0;
  const ModelSpec spec = testor::random_model(rng, 30, 1, options);
  const Problem prob = make_problem(spec, testor::random_binary(rng, 30));
  REQUIRE_THROWS_AS(is_moments(prob.prior, prob.design, 500, 4), degenerate_weights_error);
}

TEST_CASE("importance sampler validates its inputs", "[oracle]") {
  const Problem prob = make_problem(unit_model(), Eigen::VectorXi::Ones(1));
  REQUIRE_THROWS_AS(is_moments(prob.prior, prob.design, 1, 0), domain_error);

  Rng rng = make_stream(616, 4);
  testor::RandomModelOptions options;
  options.pd_innovations = true;
  const ModelSpec other = testor::random_model(rng, 3, 2, options);
  const Problem mismatched = make_problem(other, testor::random_binary(rng, 3));
  REQUIRE_THROWS_AS(is_moments(prob.prior, mismatched.design, 100, 0), invalid_spec_error);
}
