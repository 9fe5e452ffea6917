#include "dynprobit/sun_smoother.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>

#include "dynprobit/errors.hpp"
#include "dynprobit/rng.hpp"

namespace dynprobit {

namespace {

constexpr std::uint64_t kTagGaussPart = 0x73756e2d67617573ULL;

// Cholesky with the same escalating-jitter policy as the orthant sampler; reports the jitter
// actually used so callers can surface it in diagnostics.
Eigen::LLT<Eigen::MatrixXd> jittered_llt(const Eigen::MatrixXd& M, double* jitter_used) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  *jitter_used = 0.0;
  if (llt.info() == Eigen::Success) return llt;
  Eigen::MatrixXd J = M;
  for (double jitter = 1e-10; jitter <= 1.1e-6; jitter *= 10.0) {
    J.diagonal() = M.diagonal().array() + jitter;
    llt.compute(J);
    if (llt.info() == Eigen::Success) {
      *jitter_used = jitter;
      return llt;
    }
  }
  throw domain_error("sample_smoothing_iid: covariance factorization failed even with jitter");
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::kIid: return "iid";
    case Method::kPfm: return "pfm";
    case Method::kMf: return "mf";
    case Method::kOracle: return "oracle";
  }
  return "unknown";
}

SunParams compute_sun_params(const PriorCovariance& prior, const DesignMatrices& design) {
  const Eigen::Index pn = prior.Omega.rows();
  if (design.X.cols() != pn)
    throw invalid_spec_error("compute_sun_params: design and prior dimensions disagree");

  SunParams params;
  const Eigen::VectorXd d = prior.Omega.diagonal();
  if ((d.array() <= 0.0).any() || !d.allFinite())
    throw degenerate_model_error(
        "prior covariance has a coordinate with zero (or negative) marginal variance");
  params.omega = d.cwiseSqrt();

  const Eigen::VectorXd omega_inv = params.omega.cwiseInverse();
  params.OmegaBar = omega_inv.asDiagonal() * prior.Omega * omega_inv.asDiagonal();
  params.OmegaBar.diagonal().setOnes();

  // B = D Omega appears in both the latent covariance and the cross term.
  const Eigen::MatrixXd B = design.D * prior.Omega;
  Eigen::MatrixXd M = B * design.D.transpose();
  M.diagonal().array() += 1.0;
  params.s = M.diagonal().cwiseSqrt();
  const Eigen::VectorXd s_inv = params.s.cwiseInverse();
  params.Gamma = s_inv.asDiagonal() * M * s_inv.asDiagonal();
  params.Gamma = 0.5 * (params.Gamma + params.Gamma.transpose()).eval();
  params.Gamma.diagonal().setOnes();
  params.Delta = omega_inv.asDiagonal() * B.transpose() * s_inv.asDiagonal();
  return params;
}

Eigen::MatrixXd sample_smoothing_iid(const SunParams& params, int R,
                                     const OrthantSamplerConfig& config,
                                     SmootherDiagnostics* diagnostics) {
  if (R < 1) throw domain_error("sample_smoothing_iid: R must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index pn = params.OmegaBar.rows();

  SmootherDiagnostics diag;

  // A = Delta Gamma^{-1}, so that A U1 is the truncated contribution to theta.
  double gamma_jitter = 0.0;
  const Eigen::LLT<Eigen::MatrixXd> gamma_llt = jittered_llt(params.Gamma, &gamma_jitter);
  const Eigen::MatrixXd A = gamma_llt.solve(params.Delta.transpose()).transpose();

  Eigen::MatrixXd C0 = params.OmegaBar - A * params.Delta.transpose();
  C0 = 0.5 * (C0 + C0.transpose()).eval();
  const Eigen::LLT<Eigen::MatrixXd> c0_llt = jittered_llt(C0, &diag.gaussian_jitter);

  const Eigen::MatrixXd U1 = sample_orthant_tmvn(params.Gamma, R, config, &diag.orthant);

  Eigen::MatrixXd draws(R, pn);
  for (int r = 0; r < R; ++r) {
    Rng rng = make_stream(config.seed, kTagGaussPart, static_cast<std::uint64_t>(r));
    const Eigen::VectorXd u0 = c0_llt.matrixL() * rng.normal_vector(pn);
    draws.row(r) =
        (params.omega.array() * (u0 + A * U1.row(r).transpose()).array()).transpose();
  }

  diag.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (diagnostics) *diagnostics = diag;
  return draws;
}

MomentSummary estimate_moments(const Eigen::MatrixXd& draws, Method method,
                               double wall_time_seconds) {
  const Eigen::Index R = draws.rows();
  if (R < 2) throw domain_error("estimate_moments: need at least 2 draws");
  MomentSummary out;
  out.method = method;
  out.draws = static_cast<long>(R);
  out.wall_time_seconds = wall_time_seconds;
  out.mean = draws.colwise().mean();
  const Eigen::MatrixXd centered = draws.rowwise() - out.mean.transpose();
  out.sd = (centered.colwise().squaredNorm() / static_cast<double>(R - 1))
               .cwiseSqrt()
               .transpose();
  out.mc_se_mean = out.sd / std::sqrt(static_cast<double>(R));
  return out;
}

}  // namespace dynprobit
