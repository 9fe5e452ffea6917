#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dynprobit/errors.hpp"

namespace dynprobit::cli {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, int row, const std::string& what) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw invalid_input_error("row " + std::to_string(row) + ": " + what +
                              " is not a number: \"" + field + "\"");
  if (!std::isfinite(value))
    throw invalid_input_error("row " + std::to_string(row) + ": " + what + " is not finite");
  return value;
}

long parse_long(const std::string& field, int row, const std::string& what) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw invalid_input_error("row " + std::to_string(row) + ": " + what +
                              " is not an integer: \"" + field + "\"");
  return value;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

// One (t, coord)-major pass over a stacked pn summary vector.
template <typename RowFn>
void for_each_cell(int n, int p, RowFn&& fn) {
  for (int t = 0; t < n; ++t)
    for (int j = 0; j < p; ++j) fn(t, j, t * p + j);
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

DataSet read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("cannot open data file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw invalid_input_error("data file is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 3 || header[0] != "t" || header[1] != "y")
    throw invalid_input_error("header must be t,y,x1,...,xp");
  const int p = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < p; ++j)
    if (header[2 + j] != "x" + std::to_string(j + 1))
      throw invalid_input_error("header must be t,y,x1,...,xp (got \"" + header[2 + j] +
                                "\" in position " + std::to_string(j + 3) + ")");

  DataSet data;
  data.p = p;
  std::vector<int> ys;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty())
      throw invalid_input_error("row " + std::to_string(row) + ": empty line");
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw invalid_input_error("row " + std::to_string(row) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
    const long t = parse_long(fields[0], row, "t");
    if (t != row - 1)
      throw invalid_input_error("row " + std::to_string(row) + ": t must be sequential from 1");
    const long y = parse_long(fields[1], row, "y");
    if (y != 0 && y != 1)
      throw invalid_input_error("row " + std::to_string(row) + ": y must be 0 or 1");
    ys.push_back(static_cast<int>(y));
    Eigen::VectorXd xt(p);
    for (int j = 0; j < p; ++j)
      xt[j] = parse_double(fields[2 + j], row, "x" + std::to_string(j + 1));
    data.x.push_back(std::move(xt));
  }
  if (ys.empty()) throw invalid_input_error("data file has a header but no rows: " + path);

  data.n = static_cast<int>(ys.size());
  data.y = Eigen::Map<const Eigen::VectorXi>(ys.data(), data.n);
  return data;
}

void write_data_csv(const std::string& path, const DataSet& data) {
  std::ofstream out = open_out(path);
  out << "t,y";
  for (int j = 1; j <= data.p; ++j) out << ",x" << j;
  out << "\n";
  for (int t = 0; t < data.n; ++t) {
    out << (t + 1) << ',' << data.y[t];
    for (int j = 0; j < data.p; ++j) out << ',' << format_double(data.x[t][j]);
    out << "\n";
  }
  if (!out) throw io_error("failed writing " + path);
}

void write_truth_csv(const std::string& path, const Eigen::MatrixXd& theta) {
  std::ofstream out = open_out(path);
  out << "t,coord,theta\n";
  for (Eigen::Index t = 0; t < theta.rows(); ++t)
    for (Eigen::Index j = 0; j < theta.cols(); ++j)
      out << (t + 1) << ',' << (j + 1) << ',' << format_double(theta(t, j)) << "\n";
  if (!out) throw io_error("failed writing " + path);
}

void write_results_csv(const std::string& path,
                       const std::vector<dynprobit::MomentSummary>& summaries, int n, int p) {
  std::ofstream out = open_out(path);
  out << "t,coord,method,mean,sd\n";
  for (const auto& s : summaries) {
    for_each_cell(n, p, [&](int t, int j, int idx) {
      out << (t + 1) << ',' << (j + 1) << ',' << method_name(s.method) << ','
          << format_double(s.mean[idx]) << ',' << format_double(s.sd[idx]) << "\n";
    });
  }
  if (!out) throw io_error("failed writing " + path);
}

void write_bands_csv(const std::string& path,
                     const std::vector<dynprobit::MomentSummary>& summaries, int n, int p) {
  std::ofstream out = open_out(path);
  out << "t,coord,method,mean,lower,upper\n";
  for (const auto& s : summaries) {
    for_each_cell(n, p, [&](int t, int j, int idx) {
      out << (t + 1) << ',' << (j + 1) << ',' << method_name(s.method) << ','
          << format_double(s.mean[idx]) << ',' << format_double(s.mean[idx] - s.sd[idx]) << ','
          << format_double(s.mean[idx] + s.sd[idx]) << "\n";
    });
  }
  if (!out) throw io_error("failed writing " + path);
}

}  // namespace dynprobit::cli
