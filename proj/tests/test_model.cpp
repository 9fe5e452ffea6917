#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/model.hpp"
#include "dynprobit/rng.hpp"
#include "oracles.hpp"

using namespace dynprobit;

namespace {

ModelSpec unit_model(int n) {
  std::vector<Eigen::VectorXd> x(n, Eigen::VectorXd::Ones(1));
  return ModelSpec::homogeneous(n, x, Eigen::MatrixXd::Identity(1, 1),
                                Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Identity(1, 1));
}

}  // namespace

TEST_CASE("validate rejects malformed specs", "[model]") {
  ModelSpec ok = unit_model(3);
  REQUIRE_NOTHROW(validate(ok));

  ModelSpec bad = ok;
  bad.n = 0;
  REQUIRE_THROWS_AS(validate(bad), invalid_spec_error);

  bad = ok;
  bad.x.pop_back();
  REQUIRE_THROWS_AS(validate(bad), invalid_spec_error);

  bad = ok;
  bad.W[1](0, 0) = -1.0;  // negative innovation variance
  REQUIRE_THROWS_AS(validate(bad), invalid_spec_error);

  bad = ok;
  bad.P0(0, 0) = 0.0;  // singular initial covariance
  REQUIRE_THROWS_AS(validate(bad), invalid_spec_error);

  ModelSpec asym = ok;
  asym.p = 2;
  asym.x.assign(3, Eigen::VectorXd::Ones(2));
  asym.G.assign(3, Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd W(2, 2);
  W << 1.0, 0.4, 0.1, 1.0;  // not symmetric
  asym.W.assign(3, W);
  asym.P0 = Eigen::MatrixXd::Identity(2, 2);
  REQUIRE_THROWS_AS(validate(asym), invalid_spec_error);
}

TEST_CASE("random-walk prior covariance has the expected closed form", "[model]") {
  // G = I, W = w I, P0 = p0 I: Omega_[tl] = (p0 + w * min(t, l)) I.
  const int n = 5;
  const double w = 0.3, p0 = 2.0;
  std::vector<Eigen::VectorXd> x(n, Eigen::VectorXd::Ones(1));
  const ModelSpec spec = ModelSpec::homogeneous(
      n, x, Eigen::MatrixXd::Identity(1, 1), w * Eigen::MatrixXd::Identity(1, 1),
      p0 * Eigen::MatrixXd::Identity(1, 1));
  const PriorCovariance prior = build_prior_covariance(spec);
  for (int t = 1; t <= n; ++t)
    for (int l = 1; l <= n; ++l)
      REQUIRE(prior.Omega(t - 1, l - 1) ==
              Catch::Approx(p0 + w * std::min(t, l)).epsilon(1e-14));
}

TEST_CASE("prior covariance equals the product-sum reference on random specs", "[model]") {
  Rng rng = make_stream(2718, 1);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
    const int p = 1 + static_cast<int>(rng.uniform() * 3.0);
    const ModelSpec spec = testor::random_model(rng, n, p);
    const PriorCovariance prior = build_prior_covariance(spec);
    const Eigen::MatrixXd ref = testor::prior_cov_reference(spec);
    REQUIRE((prior.Omega - ref).cwiseAbs().maxCoeff() < 1e-12);
    // And the result is a valid covariance matrix.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(prior.Omega, Eigen::EigenvaluesOnly);
    REQUIRE(es.eigenvalues().minCoeff() >
            -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()));
  }
}

TEST_CASE("zero innovations leave the prior pinned to the initial draw", "[model]") {
  // W = 0 and G = I: theta_t = theta_0 for all t, so every block equals P0.
  const ModelSpec spec = unit_model(4);
  const PriorCovariance prior = build_prior_covariance(spec);
  for (int t = 0; t < 4; ++t)
    for (int l = 0; l < 4; ++l) REQUIRE(prior.Omega(t, l) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("stacked-path Monte Carlo covariance matches build_prior_covariance", "[model]") {
  // Simulate the state recursion directly (independently of simulate_data) and compare
  // empirical second moments of the stacked path against Omega.
  Rng rng = make_stream(31415, 2);
  const ModelSpec spec = testor::random_model(rng, 4, 2);
  const PriorCovariance prior = build_prior_covariance(spec);
  const int pn = 8;

  Eigen::LLT<Eigen::MatrixXd> p0(spec.P0);
  std::vector<Eigen::LLT<Eigen::MatrixXd>> wf;
  std::vector<bool> w_ok;
  for (const auto& W : spec.W) {
    Eigen::LLT<Eigen::MatrixXd> f(W + 1e-14 * Eigen::MatrixXd::Identity(2, 2));
    wf.push_back(f);
    w_ok.push_back(f.info() == Eigen::Success);
  }

  const int M = 200000;
  Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(pn, pn);
  Eigen::VectorXd path(pn);
  Rng sim = make_stream(31415, 3);
  for (int m = 0; m < M; ++m) {
    Eigen::VectorXd theta = p0.matrixL() * sim.normal_vector(2);
    for (int t = 0; t < 4; ++t) {
      theta = spec.G[t] * theta;
      if (w_ok[t]) theta += wf[t].matrixL() * sim.normal_vector(2);
      path.segment(2 * t, 2) = theta;
    }
    sum2.noalias() += path * path.transpose();
  }
  const Eigen::MatrixXd emp = sum2 / M;
  // Entry-wise 5-sigma band; var of an empirical second moment is bounded by
  // (Omega_ii Omega_jj + Omega_ij^2) / M <= 2 * max_diag^2 / M.
  const double scale = prior.Omega.diagonal().maxCoeff();
  const double tol = 5.0 * std::sqrt(2.0) * scale / std::sqrt(static_cast<double>(M));
  REQUIRE((emp - prior.Omega).cwiseAbs().maxCoeff() < tol);
}

TEST_CASE("design matrices carry block-diagonal covariate rows", "[model]") {
  Rng rng = make_stream(99, 4);
  const ModelSpec spec = testor::random_model(rng, 3, 2);
  BinarySeries data;
  data.y = Eigen::VectorXi(3);
  data.y << 1, 0, 1;
  const DesignMatrices d = build_design(spec, data);

  REQUIRE(d.X.rows() == 3);
  REQUIRE(d.X.cols() == 6);
  for (int t = 0; t < 3; ++t) {
    REQUIRE((d.X.block(t, 2 * t, 1, 2).transpose() - spec.x[t]).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(d.sign[t] == 2 * data.y[t] - 1);
    REQUIRE((d.D.row(t) - d.sign[t] * d.X.row(t)).cwiseAbs().maxCoeff() == 0.0);
    // All entries outside the block are exactly zero.
    double off = 0.0;
    for (int c = 0; c < 6; ++c)
      if (c / 2 != t) off += std::abs(d.X(t, c));
    REQUIRE(off == 0.0);
  }
}

TEST_CASE("build_design rejects non-binary responses", "[model]") {
  const ModelSpec spec = unit_model(2);
  BinarySeries data;
  data.y = Eigen::VectorXi(2);
  data.y << 1, 2;
  REQUIRE_THROWS_AS(build_design(spec, data), invalid_input_error);
  data.y = Eigen::VectorXi(1);
  data.y << 1;
  REQUIRE_THROWS_AS(build_design(spec, data), invalid_input_error);
}

TEST_CASE("simulate_data is deterministic and self-consistent", "[model]") {
  Rng rng = make_stream(7, 5);
  const ModelSpec spec = testor::random_model(rng, 50, 2);
  const SimulationResult a = simulate_data(spec, 17);
  const SimulationResult b = simulate_data(spec, 17);
  REQUIRE(a.theta == b.theta);
  REQUIRE(a.z == b.z);
  REQUIRE(a.y == b.y);
  for (int t = 0; t < 50; ++t) REQUIRE(a.y[t] == (a.z[t] > 0.0 ? 1 : 0));

  const SimulationResult c = simulate_data(spec, 18);
  REQUIRE(a.z != c.z);
}

TEST_CASE("simulated latents center on the linear predictor", "[model]") {
  // Across replicated simulations, z_t - x_t' theta_t should be N(0, 1).
  Rng rng = make_stream(8, 6);
  const ModelSpec spec = testor::random_model(rng, 20, 2);
  double sum = 0.0, sum2 = 0.0;
  const int reps = 3000;
  for (int r = 0; r < reps; ++r) {
    const SimulationResult sim = simulate_data(spec, 1000 + r);
    for (int t = 0; t < spec.n; ++t) {
      const double e = sim.z[t] - spec.x[t].dot(sim.theta.row(t).transpose());
      sum += e;
      sum2 += e * e;
    }
  }
  const double count = static_cast<double>(reps) * spec.n;
  REQUIRE(std::abs(sum / count) < 3.0 / std::sqrt(count));
  REQUIRE(std::abs(sum2 / count - 1.0) < 3.0 * std::sqrt(2.0 / count));
}
