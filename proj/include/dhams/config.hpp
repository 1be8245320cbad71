#pragma once

// JSON experiment configuration: schema, strict parsing (unknown keys are
// rejected with their full key path), and target construction.
//
// Top-level keys:
//   target        object, required: {"kind": ..., kind-specific keys}
//   sampler       object, required: {"kind": ..., "delta", "epsilon",
//                 "phi", "beta", "window_r"} (parameters optional, defaulted)
//   chains        integer >= 1 (default 1)
//   burn_in       integer >= 0 (default 0)
//   draws         integer >= 1 (default 1000)
//   seed          unsigned integer (default 0)
//   out_dir       string (default "out"; CLI --out overrides)
//   threads       integer >= 1 (default 1; CLI --threads overrides)
//   enumeration_cap  integer (default 10^7)
//   diagnostics   array of "tv" | "ess" | "pip" (default empty)
//   tv            object: {"subsets": [[1-based coords]...],
//                 "draw_counts": [...]} (optional)
//   tune          object (required by the tune subcommand), either
//                 {"method": "stepsize", "kind", "init_delta",
//                  "target_alpha", "a_exp", "m_max", "probe_len"} or
//                 {"method": "dhams_grid", "beta" (optional: present ->
//                  over-relaxed kernel), "epsilon", "delta_grid",
//                  "phi_grid", "criterion": "ess_potential"|"average_flips",
//                  "chains", "burn_in", "draws"}
//
// Target kinds:
//   discrete_gaussian: {"d", "k", "sigma", "rho"} — support {-k..k}^d.
//   quadratic_mixture: {"k", "means": [[...]...], "covariances":
//                      [[[...]...]...]} — support {-k..k}^d.
//   linear_product:    {"a": [...], "half_width" (optional; absent -> {0,1})}
//   regression:        {"synthetic": {"n","d","signal_col","duplicate_col",
//                      "noise_sd","levels","x_seed"}} or {"design_csv",
//                      "response_csv"}; plus optional "hyper" overrides
//                      {"alpha_psi","beta_psi","alpha_sigma","beta_sigma",
//                      "g","kappa","lambda"} (g defaults to n, lambda to
//                      (1-kappa) tr(X'X)/d) and "gradient_mode":
//                      "column_restricted" (default) | "full".
//
// All user-facing coordinate and column indices are 1-based; the library
// converts to 0-based internally.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dhams/analysis.hpp"
#include "dhams/core.hpp"
#include "dhams/rng.hpp"
#include "dhams/samplers.hpp"
#include "dhams/targets/gaussian.hpp"
#include "dhams/targets/mixture.hpp"
#include "dhams/targets/regression.hpp"

namespace dhams {

// Configuration-file problems map to CLI exit code 2; everything else is a
// runtime error (exit code 3).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfg_detail {

using json = nlohmann::json;

inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline void require_object(const json& node, const std::string& path) {
  if (!node.is_object())
    throw ConfigError("expected an object at " + (path.empty() ? "<root>" : path));
}

// Every key of `node` must appear in `allowed`.
inline void reject_unknown_keys(const json& node, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  require_object(node, path);
  for (const auto& item : node.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key: " + join_path(path, item.key()));
  }
}

inline const json& require_key(const json& node, const std::string& path,
                               const std::string& key) {
  if (!node.contains(key))
    throw ConfigError("missing key: " + join_path(path, key));
  return node.at(key);
}

template <typename T>
T get_as(const json& node, const std::string& full_path) {
  try {
    return node.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type at " + full_path);
  }
}

template <typename T>
T get_req(const json& node, const std::string& path, const std::string& key) {
  return get_as<T>(require_key(node, path, key), join_path(path, key));
}

template <typename T>
T get_or(const json& node, const std::string& path, const std::string& key,
         T fallback) {
  if (!node.contains(key)) return fallback;
  return get_as<T>(node.at(key), join_path(path, key));
}

inline Vec to_vec(const json& node, const std::string& full_path) {
  const auto v = get_as<std::vector<double>>(node, full_path);
  Vec out(static_cast<long>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<long>(i)] = v[i];
  return out;
}

inline Mat to_mat(const json& node, const std::string& full_path) {
  const auto rows = get_as<std::vector<std::vector<double>>>(node, full_path);
  if (rows.empty()) throw ConfigError("empty matrix at " + full_path);
  Mat out(static_cast<long>(rows.size()), static_cast<long>(rows[0].size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != rows[0].size())
      throw ConfigError("ragged matrix at " + full_path);
    for (std::size_t i = 0; i < rows[j].size(); ++i)
      out(static_cast<long>(j), static_cast<long>(i)) = rows[j][i];
  }
  return out;
}

}  // namespace cfg_detail

// ---------------------------------------------------------------------------
// Parsed configuration

struct RegressionSynthConfig {
  long n = 0;
  long d = 0;
  int signal_col = 0;     // 0-based internally
  int duplicate_col = 0;  // 0-based internally
  double noise_sd = 0.1;
  std::vector<double> levels{0.0, 1.0, 2.0};
  std::uint64_t x_seed = 0;
};

struct TargetConfig {
  std::string kind;
  // discrete_gaussian
  EquiCorrGaussianSpec gaussian;
  // quadratic_mixture
  int mixture_half_width = 1;
  std::vector<Vec> mixture_means;
  std::vector<Mat> mixture_covs;
  // linear_product
  Vec linear_a;
  std::optional<int> linear_half_width;
  // regression
  std::optional<RegressionSynthConfig> reg_synth;
  std::string design_csv;
  std::string response_csv;
  RegressionHyper reg_hyper;  // g/lambda <= 0 mean "derive from data"
  RegressionGradientMode reg_grad_mode =
      RegressionGradientMode::kColumnRestricted;
};

struct TuneStepsizeConfig {
  std::string kind = "ncg";
  double init_delta = 1.0;
  double target_alpha = 0.5;
  double a_exp = 0.5;
  int m_max = 30;
  long probe_len = 2000;
};

struct TuneGridConfig {
  std::optional<double> beta;  // present -> over-relaxed kernel
  double epsilon = 0.9;
  std::vector<double> delta_grid;
  std::vector<double> phi_grid;
  TuneCriterion criterion = TuneCriterion::kEssPotential;
  int chains = 4;
  long burn_in = 500;
  long draws = 2000;
};

struct TuneConfig {
  std::string method;  // "stepsize" | "dhams_grid"
  TuneStepsizeConfig stepsize;
  TuneGridConfig grid;
};

struct ExperimentConfig {
  TargetConfig target;
  std::string sampler_kind;
  SamplerParams params;
  int chains = 1;
  long burn_in = 0;
  long draws = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int threads = 1;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  std::vector<std::string> diagnostics;
  std::vector<std::vector<int>> tv_subsets;  // 0-based internally
  std::vector<long> tv_draw_counts;
  std::optional<TuneConfig> tune;
  nlohmann::json raw;  // echo for the run manifest
};

// ---------------------------------------------------------------------------
// Parsing

namespace cfg_detail {

inline TargetConfig parse_target(const json& node) {
  TargetConfig out;
  const std::string path = "target";
  require_object(node, path);
  out.kind = get_req<std::string>(node, path, "kind");
  if (out.kind == "discrete_gaussian") {
    reject_unknown_keys(node, path, {"kind", "d", "k", "sigma", "rho"});
    out.gaussian.d = get_req<int>(node, path, "d");
    out.gaussian.k = get_req<int>(node, path, "k");
    out.gaussian.sigma = get_or<double>(node, path, "sigma", 1.0);
    out.gaussian.rho = get_or<double>(node, path, "rho", 0.0);
  } else if (out.kind == "quadratic_mixture") {
    reject_unknown_keys(node, path, {"kind", "k", "means", "covariances"});
    out.mixture_half_width = get_req<int>(node, path, "k");
    const auto& means = require_key(node, path, "means");
    if (!means.is_array() || means.empty())
      throw ConfigError("target.means must be a nonempty array");
    for (std::size_t m = 0; m < means.size(); ++m)
      out.mixture_means.push_back(
          to_vec(means.at(m), path + ".means[" + std::to_string(m) + "]"));
    const auto& covs = require_key(node, path, "covariances");
    if (!covs.is_array() || covs.size() != means.size())
      throw ConfigError("target.covariances must match target.means in length");
    for (std::size_t m = 0; m < covs.size(); ++m)
      out.mixture_covs.push_back(to_mat(
          covs.at(m), path + ".covariances[" + std::to_string(m) + "]"));
  } else if (out.kind == "linear_product") {
    reject_unknown_keys(node, path, {"kind", "a", "half_width"});
    out.linear_a = to_vec(require_key(node, path, "a"), "target.a");
    if (node.contains("half_width"))
      out.linear_half_width = get_req<int>(node, path, "half_width");
  } else if (out.kind == "regression") {
    reject_unknown_keys(node, path,
                        {"kind", "synthetic", "design_csv", "response_csv",
                         "hyper", "gradient_mode"});
    const bool has_synth = node.contains("synthetic");
    const bool has_csv = node.contains("design_csv");
    if (has_synth == has_csv)
      throw ConfigError(
          "target: provide exactly one of 'synthetic' or 'design_csv'");
    if (has_synth) {
      const auto& sy = node.at("synthetic");
      const std::string spath = path + ".synthetic";
      reject_unknown_keys(sy, spath,
                          {"n", "d", "signal_col", "duplicate_col", "noise_sd",
                           "levels", "x_seed"});
      RegressionSynthConfig s;
      s.n = get_req<long>(sy, spath, "n");
      s.d = get_req<long>(sy, spath, "d");
      const int sig = get_req<int>(sy, spath, "signal_col");
      const int dup = get_req<int>(sy, spath, "duplicate_col");
      if (sig < 1 || dup < 1 || sig > s.d || dup > s.d)
        throw ConfigError(spath + ": column indices are 1-based in [1, d]");
      s.signal_col = sig - 1;
      s.duplicate_col = dup - 1;
      s.noise_sd = get_or<double>(sy, spath, "noise_sd", 0.1);
      s.levels = get_or<std::vector<double>>(sy, spath, "levels",
                                             {0.0, 1.0, 2.0});
      s.x_seed = get_or<std::uint64_t>(sy, spath, "x_seed", 0);
      out.reg_synth = s;
    } else {
      out.design_csv = get_req<std::string>(node, path, "design_csv");
      out.response_csv = get_req<std::string>(node, path, "response_csv");
    }
    out.reg_hyper.g = 0.0;       // derive from n unless overridden
    out.reg_hyper.lambda = 0.0;  // derive from X unless overridden
    if (node.contains("hyper")) {
      const auto& hy = node.at("hyper");
      const std::string hpath = path + ".hyper";
      reject_unknown_keys(hy, hpath,
                          {"alpha_psi", "beta_psi", "alpha_sigma", "beta_sigma",
                           "g", "kappa", "lambda"});
      out.reg_hyper.alpha_psi =
          get_or<double>(hy, hpath, "alpha_psi", out.reg_hyper.alpha_psi);
      out.reg_hyper.beta_psi =
          get_or<double>(hy, hpath, "beta_psi", out.reg_hyper.beta_psi);
      out.reg_hyper.alpha_sigma =
          get_or<double>(hy, hpath, "alpha_sigma", out.reg_hyper.alpha_sigma);
      out.reg_hyper.beta_sigma =
          get_or<double>(hy, hpath, "beta_sigma", out.reg_hyper.beta_sigma);
      out.reg_hyper.g = get_or<double>(hy, hpath, "g", 0.0);
      out.reg_hyper.kappa =
          get_or<double>(hy, hpath, "kappa", out.reg_hyper.kappa);
      out.reg_hyper.lambda = get_or<double>(hy, hpath, "lambda", 0.0);
    }
    const std::string mode =
        get_or<std::string>(node, path, "gradient_mode", "column_restricted");
    if (mode == "column_restricted")
      out.reg_grad_mode = RegressionGradientMode::kColumnRestricted;
    else if (mode == "full")
      out.reg_grad_mode = RegressionGradientMode::kFullMatrix;
    else
      throw ConfigError("target.gradient_mode must be 'column_restricted' or 'full'");
  } else {
    throw ConfigError("target.kind: unknown target '" + out.kind + "'");
  }
  return out;
}

inline TuneConfig parse_tune(const json& node) {
  TuneConfig out;
  const std::string path = "tune";
  require_object(node, path);
  out.method = get_req<std::string>(node, path, "method");
  if (out.method == "stepsize") {
    reject_unknown_keys(node, path,
                        {"method", "kind", "init_delta", "target_alpha",
                         "a_exp", "m_max", "probe_len"});
    out.stepsize.kind = get_or<std::string>(node, path, "kind", "ncg");
    out.stepsize.init_delta = get_or<double>(node, path, "init_delta", 1.0);
    out.stepsize.target_alpha =
        get_or<double>(node, path, "target_alpha", 0.5);
    out.stepsize.a_exp = get_or<double>(node, path, "a_exp", 0.5);
    out.stepsize.m_max = get_or<int>(node, path, "m_max", 30);
    out.stepsize.probe_len = get_or<long>(node, path, "probe_len", 2000);
  } else if (out.method == "dhams_grid") {
    reject_unknown_keys(node, path,
                        {"method", "beta", "epsilon", "delta_grid", "phi_grid",
                         "criterion", "chains", "burn_in", "draws"});
    if (node.contains("beta"))
      out.grid.beta = get_req<double>(node, path, "beta");
    out.grid.epsilon = get_or<double>(node, path, "epsilon", 0.9);
    out.grid.delta_grid =
        get_req<std::vector<double>>(node, path, "delta_grid");
    out.grid.phi_grid = get_req<std::vector<double>>(node, path, "phi_grid");
    const std::string crit =
        get_or<std::string>(node, path, "criterion", "ess_potential");
    if (crit == "ess_potential")
      out.grid.criterion = TuneCriterion::kEssPotential;
    else if (crit == "average_flips")
      out.grid.criterion = TuneCriterion::kAverageFlips;
    else
      throw ConfigError(
          "tune.criterion must be 'ess_potential' or 'average_flips'");
    out.grid.chains = get_or<int>(node, path, "chains", 4);
    out.grid.burn_in = get_or<long>(node, path, "burn_in", 500);
    out.grid.draws = get_or<long>(node, path, "draws", 2000);
  } else {
    throw ConfigError("tune.method must be 'stepsize' or 'dhams_grid'");
  }
  return out;
}

}  // namespace cfg_detail

inline ExperimentConfig parse_config(const std::string& path) {
  namespace cd = cfg_detail;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  cd::json root;
  try {
    root = cd::json::parse(in);
  } catch (const cd::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  cd::reject_unknown_keys(
      root, "",
      {"target", "sampler", "chains", "burn_in", "draws", "seed", "out_dir",
       "threads", "enumeration_cap", "diagnostics", "tv", "tune"});

  ExperimentConfig out;
  out.raw = root;
  out.target = cd::parse_target(cd::require_key(root, "", "target"));

  const auto& sm = cd::require_key(root, "", "sampler");
  cd::reject_unknown_keys(
      sm, "sampler",
      {"kind", "delta", "epsilon", "phi", "beta", "window_r"});
  out.sampler_kind = cd::get_req<std::string>(sm, "sampler", "kind");
  try {
    sampler_kind_from_string(out.sampler_kind);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("sampler.kind: ") + e.what());
  }
  out.params.delta = cd::get_or<double>(sm, "sampler", "delta", 1.0);
  out.params.epsilon = cd::get_or<double>(sm, "sampler", "epsilon", 0.0);
  out.params.phi = cd::get_or<double>(sm, "sampler", "phi", 0.0);
  out.params.beta = cd::get_or<double>(sm, "sampler", "beta", 1.0);
  out.params.window_r = cd::get_or<int>(sm, "sampler", "window_r", 1);
  try {
    out.params.validate();
  } catch (const ContractError& e) {
    throw ConfigError(std::string("sampler: ") + e.what());
  }

  out.chains = cd::get_or<int>(root, "", "chains", 1);
  out.burn_in = cd::get_or<long>(root, "", "burn_in", 0);
  out.draws = cd::get_or<long>(root, "", "draws", 1000);
  out.seed = cd::get_or<std::uint64_t>(root, "", "seed", 0);
  out.out_dir = cd::get_or<std::string>(root, "", "out_dir", "out");
  out.threads = cd::get_or<int>(root, "", "threads", 1);
  out.enumeration_cap = cd::get_or<std::uint64_t>(root, "", "enumeration_cap",
                                                  kDefaultEnumerationCap);
  if (out.chains < 1) throw ConfigError("chains must be >= 1");
  if (out.burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (out.draws < 1) throw ConfigError("draws must be >= 1");
  if (out.threads < 1) throw ConfigError("threads must be >= 1");

  out.diagnostics =
      cd::get_or<std::vector<std::string>>(root, "", "diagnostics", {});
  for (const auto& d : out.diagnostics)
    if (d != "tv" && d != "ess" && d != "pip")
      throw ConfigError("diagnostics: unknown entry '" + d + "'");

  if (root.contains("tv")) {
    const auto& tv = root.at("tv");
    cd::reject_unknown_keys(tv, "tv", {"subsets", "draw_counts"});
    if (tv.contains("subsets")) {
      const auto subs =
          cd::get_as<std::vector<std::vector<int>>>(tv.at("subsets"),
                                                    "tv.subsets");
      for (const auto& sub : subs) {
        if (sub.empty()) throw ConfigError("tv.subsets: empty subset");
        std::vector<int> zero_based;
        for (const int c : sub) {
          if (c < 1) throw ConfigError("tv.subsets: coordinates are 1-based");
          zero_based.push_back(c - 1);
        }
        out.tv_subsets.push_back(std::move(zero_based));
      }
    }
    if (tv.contains("draw_counts"))
      out.tv_draw_counts =
          cd::get_as<std::vector<long>>(tv.at("draw_counts"),
                                        "tv.draw_counts");
  }

  if (root.contains("tune")) out.tune = cd::parse_tune(root.at("tune"));

  // Referenced data files must exist at validation time.
  if (out.target.kind == "regression" && !out.target.design_csv.empty()) {
    if (!std::filesystem::exists(out.target.design_csv))
      throw ConfigError("target.design_csv does not exist: " +
                        out.target.design_csv);
    if (!std::filesystem::exists(out.target.response_csv))
      throw ConfigError("target.response_csv does not exist: " +
                        out.target.response_csv);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Target construction

// Single-column numeric CSV (or one value per line) for the response vector.
inline Vec load_response_vector(const std::string& path) {
  const Mat m = load_design_matrix(path);
  if (m.cols() != 1)
    throw ContractError("response CSV must have exactly one column: " + path);
  return m.col(0);
}

inline TargetModel build_target(const TargetConfig& cfg) {
  if (cfg.kind == "discrete_gaussian") return discrete_gaussian(cfg.gaussian);
  if (cfg.kind == "quadratic_mixture") {
    if (cfg.mixture_means.empty())
      throw ContractError("quadratic_mixture: no components");
    MixtureSpec spec;
    spec.lattice = LatticeSpec::integer_window(
        static_cast<int>(cfg.mixture_means.front().size()),
        cfg.mixture_half_width);
    spec.means = cfg.mixture_means;
    spec.covariances = cfg.mixture_covs;
    return quadratic_mixture(spec);
  }
  if (cfg.kind == "linear_product") {
    const int d = static_cast<int>(cfg.linear_a.size());
    const LatticeSpec lattice =
        cfg.linear_half_width
            ? LatticeSpec::integer_window(d, *cfg.linear_half_width)
            : LatticeSpec::binary(d);
    return linear_product(cfg.linear_a, lattice);
  }
  if (cfg.kind == "regression") {
    RegressionSpec spec;
    if (cfg.reg_synth) {
      const auto& sy = *cfg.reg_synth;
      RngStream rng(sy.x_seed, 0);
      const Mat raw = synth_design_matrix(static_cast<int>(sy.n),
                                          static_cast<int>(sy.d), sy.levels,
                                          rng);
      auto [xp, y] = synth_sparse_response(raw, sy.signal_col,
                                           sy.duplicate_col, sy.noise_sd, rng);
      spec.X = std::move(xp);
      spec.y = std::move(y);
    } else {
      spec.X = load_design_matrix(cfg.design_csv);
      spec.y = load_response_vector(cfg.response_csv);
    }
    spec.hyper = cfg.reg_hyper;
    if (spec.hyper.g <= 0)
      spec.hyper.g = static_cast<double>(spec.X.rows());
    if (spec.hyper.lambda <= 0)
      spec.hyper.lambda = calibrate_ridge_lambda(spec.X, spec.hyper.kappa);
    return regression_posterior(spec, cfg.reg_grad_mode);
  }
  throw ContractError("build_target: unknown kind " + cfg.kind);
}

}  // namespace dhams
