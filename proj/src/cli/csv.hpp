#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dynprobit/model.hpp"
#include "dynprobit/sun_smoother.hpp"

namespace dynprobit::cli {

// %.17g — the shortest format that round-trips every double exactly.
std::string format_double(double x);

struct DataSet {
  int n = 0;
  int p = 0;
  Eigen::VectorXi y;                // n responses in {0, 1}
  std::vector<Eigen::VectorXd> x;   // n covariate vectors
};

// Strict reader for the data layout: header "t,y,x1,...,xp"; rows carry a 1-based sequential
// t, a 0/1 response, and finite covariates. Any violation raises invalid_input_error with the
// offending row number.
DataSet read_data_csv(const std::string& path);

void write_data_csv(const std::string& path, const DataSet& data);

// truth.csv: header "t,coord,theta", one row per (t, coordinate).
void write_truth_csv(const std::string& path, const Eigen::MatrixXd& theta);

// results.csv: header "t,coord,method,mean,sd"; summaries are stacked in call order.
void write_results_csv(const std::string& path,
                       const std::vector<dynprobit::MomentSummary>& summaries, int n, int p);

// bands.csv: header "t,coord,method,mean,lower,upper" with one-sd bands (lower = mean - sd).
void write_bands_csv(const std::string& path,
                     const std::vector<dynprobit::MomentSummary>& summaries, int n, int p);

}  // namespace dynprobit::cli
