#pragma once

#include "config.hpp"

namespace dynprobit::cli {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;
inline constexpr int kExitNumericalError = 4;

// simulate: draw states/latents/binaries from the configured model; writes data.csv,
// truth.csv, metadata.json into the output directory.
void run_simulate(const RunConfig& config);

// fit: smooth the data with the selected method(s); writes results.csv, metadata.json.
void run_fit(const RunConfig& config);

// compare: fit all methods, score against the i.i.d. reference; writes results.csv,
// bands.csv, comparison.json, metadata.json.
void run_compare(const RunConfig& config);

// Maps thrown errors onto the exit-code contract and prints the message to stderr.
int dispatch(const std::string& command, const RunConfig& config);

}  // namespace dynprobit::cli
