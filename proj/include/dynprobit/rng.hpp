#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace dynprobit {

// splitmix64 step; used to derive independent substream seeds from (seed, tag, index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Inverse standard-normal CDF (Wichura's PPND16 rational approximations, ~1e-15 relative
// accuracy over the full open interval). Throws domain_error unless 0 < p < 1.
double norm_quantile(double p);

// Deterministic random stream. All variates are produced by fixed arithmetic on the raw
// mt19937_64 output (uniforms from the top 53 bits, normals by inverse CDF), so a given seed
// yields the same sequence on every platform and the draw count per variate is constant.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return norm_quantile(uniform()); }

  Eigen::VectorXd normal_vector(Eigen::Index k) {
    Eigen::VectorXd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

// Substream keyed by (seed, tag, index): distinct keys give statistically independent streams,
// and the mapping is pure, so per-replicate streams do not depend on evaluation order.
Rng make_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0);

}  // namespace dynprobit
