#include "config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "dynprobit/errors.hpp"

namespace dynprobit::cli {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw config_error("unknown key \"" + item.key() + "\" in " + where);
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw config_error(where + " must be a number");
  return j.get<double>();
}

long require_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw config_error(where + " must be an integer");
  return j.get<long>();
}

std::string require_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw config_error(where + " must be a string");
  return j.get<std::string>();
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw config_error(where + " must be a non-empty 2-d array");
  const auto rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd M;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty())
      throw config_error(where + " must be a 2-d array of numbers");
    if (r == 0) {
      cols = row.size();
      M.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      throw config_error(where + " has ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c)
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          require_number(row[c], where + " entries");
  }
  return M;
}

// A hyperparameter matrix entry is a scalar c (meaning c * I), one p x p matrix (shared across
// t), or an array of n matrices.
std::vector<Eigen::MatrixXd> parse_matrix_list(const json& j, const std::string& where) {
  std::vector<Eigen::MatrixXd> out;
  if (j.is_number()) {
    Eigen::MatrixXd tag(1, 1);
    tag(0, 0) = j.get<double>();
    out.push_back(std::move(tag));  // scalar marker; expanded to c * I in resolve_model
    return out;
  }
  if (!j.is_array() || j.empty()) throw config_error(where + " must be a scalar or array");
  if (j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
    for (std::size_t t = 0; t < j.size(); ++t)
      out.push_back(parse_matrix(j[t], where + "[" + std::to_string(t) + "]"));
  } else {
    out.push_back(parse_matrix(j, where));
  }
  return out;
}

OrthantStrategy parse_strategy(const std::string& s) {
  if (s == "rejection") return OrthantStrategy::kRejection;
  if (s == "gibbs") return OrthantStrategy::kGibbs;
  if (s == "auto") return OrthantStrategy::kAuto;
  throw config_error("sampler.strategy must be one of rejection|gibbs|auto, got \"" + s + "\"");
}

Eigen::MatrixXd scaled_identity(double c, int p) {
  return c * Eigen::MatrixXd::Identity(p, p);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw config_error("config root must be a JSON object");

  reject_unknown_keys(doc,
                      {"schema_version", "model", "method", "draws", "seed", "sampler", "cavi",
                       "covariates", "data", "out"},
                      "config root");
  if (!doc.contains("schema_version")) throw config_error("config is missing schema_version");
  if (require_integer(doc["schema_version"], "schema_version") != kSchemaVersion)
    throw config_error("unsupported schema_version (expected " +
                       std::to_string(kSchemaVersion) + ")");

  RunConfig cfg;

  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (!m.is_object()) throw config_error("model must be an object");
    reject_unknown_keys(m, {"n", "p", "G", "W", "P0"}, "model");
    if (m.contains("n")) {
      cfg.n = static_cast<int>(require_integer(m["n"], "model.n"));
      if (cfg.n < 1) throw config_error("model.n must be >= 1");
    }
    if (m.contains("p")) {
      cfg.p = static_cast<int>(require_integer(m["p"], "model.p"));
      if (cfg.p < 1) throw config_error("model.p must be >= 1");
    }
    if (m.contains("G")) cfg.G = parse_matrix_list(m["G"], "model.G");
    if (m.contains("W")) cfg.W = parse_matrix_list(m["W"], "model.W");
    if (m.contains("P0")) {
      if (m["P0"].is_number())
        cfg.P0 = scaled_identity(m["P0"].get<double>(), std::max(cfg.p, 1));
      else
        cfg.P0 = parse_matrix(m["P0"], "model.P0");
    }
  }

  if (doc.contains("method")) {
    cfg.method = require_string(doc["method"], "method");
    if (cfg.method != "iid" && cfg.method != "pfm" && cfg.method != "mf" && cfg.method != "all")
      throw config_error("method must be one of iid|pfm|mf|all");
  }
  if (doc.contains("draws")) {
    cfg.draws = require_integer(doc["draws"], "draws");
    if (cfg.draws < 2) throw config_error("draws must be >= 2");
  }
  if (doc.contains("seed")) {
    const long s = require_integer(doc["seed"], "seed");
    if (s < 0) throw config_error("seed must be >= 0");
    cfg.seed = static_cast<std::uint64_t>(s);
  }

  if (doc.contains("sampler")) {
    const json& s = doc["sampler"];
    if (!s.is_object()) throw config_error("sampler must be an object");
    reject_unknown_keys(s, {"strategy", "burn_in", "thinning", "max_rejection_attempts"},
                        "sampler");
    if (s.contains("strategy"))
      cfg.sampler.strategy = parse_strategy(require_string(s["strategy"], "sampler.strategy"));
    if (s.contains("burn_in")) {
      const long b = require_integer(s["burn_in"], "sampler.burn_in");
      if (b < 0) throw config_error("sampler.burn_in must be >= 0");
      cfg.sampler.burn_in = static_cast<int>(b);
    }
    if (s.contains("thinning")) {
      const long th = require_integer(s["thinning"], "sampler.thinning");
      if (th < 1) throw config_error("sampler.thinning must be >= 1");
      cfg.sampler.thinning = static_cast<int>(th);
    }
    if (s.contains("max_rejection_attempts")) {
      const long cap = require_integer(s["max_rejection_attempts"], "sampler.max_rejection_attempts");
      if (cap < 1) throw config_error("sampler.max_rejection_attempts must be >= 1");
      cfg.sampler.max_rejection_attempts = cap;
    }
  }

  if (doc.contains("cavi")) {
    const json& c = doc["cavi"];
    if (!c.is_object()) throw config_error("cavi must be an object");
    reject_unknown_keys(c, {"tolerance", "max_sweeps"}, "cavi");
    if (c.contains("tolerance")) {
      cfg.cavi.tolerance = require_number(c["tolerance"], "cavi.tolerance");
      if (!(cfg.cavi.tolerance > 0.0)) throw config_error("cavi.tolerance must be positive");
    }
    if (c.contains("max_sweeps")) {
      cfg.cavi.max_sweeps = require_integer(c["max_sweeps"], "cavi.max_sweeps");
      if (cfg.cavi.max_sweeps < 1) throw config_error("cavi.max_sweeps must be >= 1");
    }
  }

  if (doc.contains("covariates")) {
    const json& c = doc["covariates"];
    if (!c.is_object()) throw config_error("covariates must be an object");
    reject_unknown_keys(c, {"type", "values"}, "covariates");
    const std::string type = c.contains("type") ? require_string(c["type"], "covariates.type") : "";
    if (type == "intercept_binary") {
      cfg.covariates = CovariateScheme::kInterceptBinary;
      if (c.contains("values"))
        throw config_error("covariates.values is only valid with type \"explicit\"");
    } else if (type == "explicit") {
      cfg.covariates = CovariateScheme::kExplicit;
      if (!c.contains("values")) throw config_error("covariates.values is required for explicit");
      const Eigen::MatrixXd vals = parse_matrix(c["values"], "covariates.values");
      for (Eigen::Index t = 0; t < vals.rows(); ++t)
        cfg.x_explicit.push_back(vals.row(t).transpose());
    } else {
      throw config_error("covariates.type must be intercept_binary|explicit");
    }
  }

  if (doc.contains("data")) cfg.data_path = require_string(doc["data"], "data");
  if (doc.contains("out")) cfg.out_dir = require_string(doc["out"], "out");
  return cfg;
}

void apply_overrides(RunConfig& config, const ConfigOverrides& overrides) {
  if (overrides.data_path) config.data_path = *overrides.data_path;
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.method) {
    if (*overrides.method != "iid" && *overrides.method != "pfm" && *overrides.method != "mf" &&
        *overrides.method != "all")
      throw config_error("--method must be one of iid|pfm|mf|all");
    config.method = *overrides.method;
  }
  if (overrides.draws) {
    if (*overrides.draws < 2) throw config_error("--draws must be >= 2");
    config.draws = *overrides.draws;
  }
  if (overrides.seed) config.seed = *overrides.seed;
}

ResolvedModel resolve_model(const RunConfig& config, int n, int p) {
  if (n < 1 || p < 1) throw config_error("model dimensions must be positive");
  ResolvedModel out;

  auto expand = [&](const std::vector<Eigen::MatrixXd>& src, double default_scale,
                    const std::string& name) {
    std::vector<Eigen::MatrixXd> result;
    if (src.empty()) {
      result.assign(n, scaled_identity(default_scale, p));
      return result;
    }
    if (src.size() == 1) {
      Eigen::MatrixXd M = src[0];
      if (M.rows() == 1 && M.cols() == 1 && p != 1) M = scaled_identity(M(0, 0), p);
      if (M.rows() != p || M.cols() != p)
        throw config_error("model." + name + " must be " + std::to_string(p) + "x" +
                           std::to_string(p));
      result.assign(n, M);
      return result;
    }
    if (src.size() != static_cast<std::size_t>(n))
      throw config_error("model." + name + " must have 1 or n entries");
    for (const auto& M : src)
      if (M.rows() != p || M.cols() != p)
        throw config_error("model." + name + " entries must be " + std::to_string(p) + "x" +
                           std::to_string(p));
    result = src;
    return result;
  };

  out.G = expand(config.G, 1.0, "G");
  out.W = expand(config.W, 0.01, "W");

  if (config.P0.size() == 0) {
    out.P0 = scaled_identity(3.0, p);
  } else {
    out.P0 = config.P0;
    if (out.P0.rows() == 1 && out.P0.cols() == 1 && p != 1)
      out.P0 = scaled_identity(out.P0(0, 0), p);
    if (out.P0.rows() != p || out.P0.cols() != p)
      throw config_error("model.P0 must be " + std::to_string(p) + "x" + std::to_string(p));
  }
  return out;
}

}  // namespace dynprobit::cli
