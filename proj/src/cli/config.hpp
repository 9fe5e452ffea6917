#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynprobit/pfm_vb.hpp"
#include "dynprobit/truncnorm.hpp"

namespace dynprobit::cli {

inline constexpr int kSchemaVersion = 1;

// How `simulate` generates covariate rows when none are given explicitly.
enum class CovariateScheme { kInterceptBinary, kExplicit };

struct RunConfig {
  // Model block. n/p may be 0 for fit/compare (then inferred from the data file).
  int n = 0;
  int p = 0;
  // Empty => identity / 0.01 I / 3 I defaults, resolved once p is known.
  std::vector<Eigen::MatrixXd> G;  // size 1 (shared) or n
  std::vector<Eigen::MatrixXd> W;  // size 1 (shared) or n
  Eigen::MatrixXd P0;              // empty => 3 I

  std::string method = "all";  // iid | pfm | mf | all
  long draws = 10000;
  std::uint64_t seed = 0;

  OrthantSamplerConfig sampler;
  CaviConfig cavi;

  CovariateScheme covariates = CovariateScheme::kInterceptBinary;
  std::vector<Eigen::VectorXd> x_explicit;  // used when covariates == kExplicit

  std::string data_path;  // input CSV for fit/compare
  std::string out_dir;    // output directory for all commands
};

// Parses and validates a config file against the versioned schema. Unknown keys anywhere in
// the document raise config_error naming the key.
RunConfig load_config(const std::string& path);

// Command-line overrides applied on top of the file (empty/absent means "keep").
struct ConfigOverrides {
  std::optional<std::string> data_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> method;
  std::optional<long> draws;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);

// Materializes the hyperparameter blocks for known n/p: checks shapes, fills defaults
// (G = I, W = 0.01 I, P0 = 3 I) and expands shared matrices to length n.
struct ResolvedModel {
  std::vector<Eigen::MatrixXd> G, W;
  Eigen::MatrixXd P0;
};

ResolvedModel resolve_model(const RunConfig& config, int n, int p);

}  // namespace dynprobit::cli
