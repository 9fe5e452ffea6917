#pragma once

#include <stdexcept>
#include <string>

namespace dynprobit {

// Malformed model/config inputs: bad dimensions, non-PSD covariances, invalid labels.
struct invalid_spec_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed data inputs: ragged CSV rows, non-binary responses, non-finite covariates.
struct invalid_input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric precondition failed at runtime (non-PSD correlation, sigma <= 0, p outside (0,1)).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// A resource cap was hit (e.g. rejection sampler exceeded max attempts).
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Prior covariance is numerically degenerate (zero marginal variance on some coordinate).
struct degenerate_model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Importance weights collapsed (all numerically zero, or ESS below the floor).
struct degenerate_weights_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem/serialization failure in the CLI layer.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config file violates the schema (unknown key, wrong type, unsupported version).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dynprobit
