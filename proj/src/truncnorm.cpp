#include "dynprobit/truncnorm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "dynprobit/errors.hpp"

namespace dynprobit {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;      // 1/sqrt(2)
constexpr double kLogSqrt2Pi = 0.91893853320467274178;   // log(sqrt(2*pi))
constexpr double kSqrt2OverPi = 0.79788456080286535588;  // sqrt(2/pi) = E|N(0,1)|

// Substream tags for the orthant sampler (arbitrary fixed 64-bit constants).
constexpr std::uint64_t kTagRejection = 0x6f727468616e7452ULL;
constexpr std::uint64_t kTagGibbs = 0x6f727468616e7447ULL;
constexpr std::uint64_t kTagPilot = 0x6f727468616e7450ULL;

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw domain_error(std::string(what) + ": argument must be finite");
}

// Mills-ratio asymptotic series S(x) = 1 - 1/x^2 + 3/x^4 - 15/x^6 + ... for x << 0, truncated
// at the smallest term; zeta(x) = -x / S(x) and log Phi(x) = log phi(x) - log(-x) + log S(x).
double mills_series(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 60; ++k) {
    const double next = -term * (2.0 * k - 1.0) * inv_x2;
    if (std::abs(next) >= std::abs(term)) break;  // series started diverging
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double normal_pdf(double x) {
  check_finite(x, "normal_pdf");
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double normal_cdf(double x) {
  check_finite(x, "normal_cdf");
  return 0.5 * std::erfc(-x * kSqrt1_2);
}

double log_normal_cdf(double x) {
  check_finite(x, "log_normal_cdf");
  if (x >= -10.0) {
    if (x > 0.0) return std::log1p(-0.5 * std::erfc(x * kSqrt1_2));
    return std::log(0.5 * std::erfc(-x * kSqrt1_2));
  }
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(mills_series(x));
}

double mills_inverse(double x) {
  check_finite(x, "mills_inverse");
  if (x >= -8.0) return normal_pdf(x) / normal_cdf(x);
  return -x / mills_series(x);
}

double trunc_norm_mean(double mu, double sigma, int sign) {
  check_finite(mu, "trunc_norm_mean");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw domain_error("trunc_norm_mean: sigma must be positive and finite");
  if (sign != 1 && sign != -1) throw domain_error("trunc_norm_mean: sign must be +1 or -1");
  return mu + sign * sigma * mills_inverse(sign * mu / sigma);
}

namespace {

// Standard normal truncated below at a, i.e. X | X > a.
double sample_std_lower_trunc(double a, Rng& rng) {
  if (a <= 5.0) {
    // Inverse CDF on the survival scale: exact for any a, stable because Phi(-a) is computed
    // from erfc and the quantile is taken in the tail where PPND16 keeps full precision.
    const double tail = normal_cdf(-a);
    double x = -norm_quantile(rng.uniform() * tail);
    if (!(x > a)) x = std::nextafter(a, std::numeric_limits<double>::infinity());
    return x;
  }
  // Robert's translated-exponential rejection for the far tail; acceptance > 0.99 for a > 5.
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a - std::log(rng.uniform()) / alpha;
    const double d = x - alpha;
    if (std::log(rng.uniform()) <= -0.5 * d * d) return x;
  }
}

}  // namespace

double sample_trunc_norm(double mu, double sigma, int sign, Rng& rng) {
  check_finite(mu, "sample_trunc_norm");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw domain_error("sample_trunc_norm: sigma must be positive and finite");
  if (sign != 1 && sign != -1) throw domain_error("sample_trunc_norm: sign must be +1 or -1");
  const double a = -sign * mu / sigma;  // bound for the standardized half-line draw
  const double u = sample_std_lower_trunc(a, rng);
  double x = mu + sign * sigma * u;
  if (!(sign * x > 0.0)) {
    // Guard against rounding at the boundary when |mu| >> sigma.
    x = sign * std::numeric_limits<double>::min();
  }
  return x;
}

namespace {

struct GammaFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

void validate_correlation(const Eigen::MatrixXd& Gamma) {
  const Eigen::Index k = Gamma.rows();
  if (k < 1 || Gamma.cols() != k)
    throw domain_error("sample_orthant_tmvn: Gamma must be square and non-empty");
  if (!Gamma.allFinite()) throw domain_error("sample_orthant_tmvn: Gamma has non-finite entries");
  if ((Gamma - Gamma.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw domain_error("sample_orthant_tmvn: Gamma is not symmetric");
  if ((Gamma.diagonal().array() - 1.0).abs().maxCoeff() > 1e-8)
    throw domain_error("sample_orthant_tmvn: Gamma must have unit diagonal");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Gamma, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -1e-8 * std::max(hi, 1.0))
    throw domain_error("sample_orthant_tmvn: Gamma is not positive semidefinite");
}

GammaFactor factor_correlation(const Eigen::MatrixXd& Gamma) {
  GammaFactor f;
  f.llt.compute(Gamma);
  if (f.llt.info() == Eigen::Success) return f;
  // PSD within tolerance but rank-deficient: lift the diagonal just enough for the Cholesky.
  Eigen::MatrixXd G = Gamma;
  for (double jitter = 1e-10; jitter <= 1.1e-6; jitter *= 10.0) {
    G.diagonal() = Gamma.diagonal().array() + jitter;
    f.llt.compute(G);
    if (f.llt.info() == Eigen::Success) {
      f.jitter = jitter;
      return f;
    }
  }
  throw domain_error("sample_orthant_tmvn: Cholesky of Gamma failed even with jitter");
}

Eigen::MatrixXd rejection_sample(const GammaFactor& f, int count,
                                 const OrthantSamplerConfig& config,
                                 OrthantDiagnostics& diag) {
  const Eigen::Index k = f.llt.matrixL().rows();
  Eigen::MatrixXd out(count, k);
  long proposals = 0;
  for (int r = 0; r < count; ++r) {
    // Dedicated substream per retained draw so the output is independent of batching.
    Rng rng = make_stream(config.seed, kTagRejection, static_cast<std::uint64_t>(r));
    long attempts = 0;
    for (;;) {
      if (attempts >= config.max_rejection_attempts)
        throw capacity_error(
            "sample_orthant_tmvn: rejection exceeded max_rejection_attempts; the orthant "
            "probability is tiny - use the Gibbs strategy");
      ++attempts;
      Eigen::VectorXd x = f.llt.matrixL() * rng.normal_vector(k);
      if ((x.array() > 0.0).all()) {
        out.row(r) = x.transpose();
        break;
      }
    }
    proposals += attempts;
  }
  diag.total_proposals = proposals;
  diag.acceptance_rate = static_cast<double>(count) / static_cast<double>(proposals);
  return out;
}

Eigen::MatrixXd gibbs_sample(const Eigen::MatrixXd& Gamma, const GammaFactor& f, int count,
                             const OrthantSamplerConfig& config, OrthantDiagnostics& diag) {
  const Eigen::Index k = Gamma.rows();
  // Full conditionals come from the precision matrix Q = Gamma^{-1}:
  //   x_j | x_{-j} ~ N(x_j - (Q x)_j / Q_jj, 1 / Q_jj) truncated to (0, inf).
  const Eigen::MatrixXd Q =
      f.llt.solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd cond_sd = Q.diagonal().cwiseInverse().cwiseSqrt();

  const int burn_in = config.burn_in.value_or(50 * static_cast<int>(k));
  const int thinning = std::max(1, config.thinning);
  if (burn_in < 0) throw domain_error("sample_orthant_tmvn: burn_in must be >= 0");

  Rng rng = make_stream(config.seed, kTagGibbs);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(k, kSqrt2OverPi);
  Eigen::VectorXd qx = Q * x;  // maintained incrementally across coordinate updates

  Eigen::MatrixXd out(count, k);
  int kept = 0;
  const long sweeps_needed = static_cast<long>(burn_in) + static_cast<long>(count) * thinning;
  for (long sweep = 1; sweep <= sweeps_needed; ++sweep) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double m = x[j] - qx[j] / Q(j, j);
      const double xj = sample_trunc_norm(m, cond_sd[j], 1, rng);
      const double delta = xj - x[j];
      if (delta != 0.0) {
        qx += delta * Q.col(j);
        x[j] = xj;
      }
    }
    if (sweep > burn_in && (sweep - burn_in) % thinning == 0) out.row(kept++) = x.transpose();
  }
  diag.burn_in_sweeps = burn_in;
  diag.thinning = thinning;
  return out;
}

double pilot_acceptance(const GammaFactor& f, const OrthantSamplerConfig& config) {
  const Eigen::Index k = f.llt.matrixL().rows();
  constexpr int kPilotProposals = 2048;
  Rng rng = make_stream(config.seed, kTagPilot);
  int hits = 0;
  for (int i = 0; i < kPilotProposals; ++i) {
    Eigen::VectorXd x = f.llt.matrixL() * rng.normal_vector(k);
    if ((x.array() > 0.0).all()) ++hits;
  }
  return static_cast<double>(hits) / kPilotProposals;
}

}  // namespace

Eigen::MatrixXd sample_orthant_tmvn(const Eigen::MatrixXd& Gamma, int count,
                                    const OrthantSamplerConfig& config,
                                    OrthantDiagnostics* diagnostics) {
  validate_correlation(Gamma);
  if (count < 1) throw domain_error("sample_orthant_tmvn: count must be >= 1");

  const GammaFactor f = factor_correlation(Gamma);
  OrthantDiagnostics diag;
  diag.gamma_jitter = f.jitter;

  OrthantStrategy strategy = config.strategy;
  if (strategy == OrthantStrategy::kAuto) {
    const double p_hat = pilot_acceptance(f, config);
    diag.estimated_orthant_probability = p_hat;
    strategy = (p_hat >= 1e-3) ? OrthantStrategy::kRejection : OrthantStrategy::kGibbs;
  }
  diag.strategy_used = strategy;

  Eigen::MatrixXd out = (strategy == OrthantStrategy::kRejection)
                            ? rejection_sample(f, count, config, diag)
                            : gibbs_sample(Gamma, f, count, config, diag);
  if (diagnostics) *diagnostics = diag;
  return out;
}

}  // namespace dynprobit
