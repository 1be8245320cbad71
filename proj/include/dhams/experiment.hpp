#pragma once

// Config-driven experiment execution: chain running (parallel across chains,
// strictly sequential within), draws.csv emission and re-ingestion, the run
// manifest, and the drivers behind the CLI subcommands.
//
// Determinism: chain m always uses RngStream(seed, m), chains are written in
// chain order by a single collector after all workers finish, and floats are
// rendered with 17 significant digits — so identical (config, seed) produce
// byte-identical draws.csv regardless of the thread count.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dhams/analysis.hpp"
#include "dhams/config.hpp"
#include "dhams/core.hpp"
#include "dhams/rng.hpp"
#include "dhams/samplers.hpp"

namespace dhams {

struct RunSummary {
  std::vector<std::string> files_written;
  std::vector<double> acceptance_rates;  // per chain
  double wall_seconds = 0.0;
};

namespace detail {

inline std::string join_dir(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// draws.csv

inline void write_draws_csv(const std::string& path, const ChainMatrix& chains) {
  chains.validate();
  auto out = detail::open_csv(path);
  out << "chain,iter";
  for (int i = 1; i <= chains.dim(); ++i) out << ",s_" << i;
  out << ",f,accepted\n";
  for (int m = 0; m < chains.num_chains(); ++m) {
    const auto& st = chains.states[static_cast<std::size_t>(m)];
    const auto& ft = chains.f_trace[static_cast<std::size_t>(m)];
    const auto& ac = chains.accepted[static_cast<std::size_t>(m)];
    for (long t = 0; t < st.rows(); ++t) {
      out << (m + 1) << ',' << (t + 1);
      for (int i = 0; i < chains.dim(); ++i)
        out << ',' << format_sig17(st(t, i));
      out << ',' << format_sig17(ft[t]) << ',' << int(ac[static_cast<std::size_t>(t)])
          << '\n';
    }
  }
}

// Reads a draws.csv back into a ChainMatrix (chains grouped by their id, row
// order preserved).
inline ChainMatrix read_draws_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open draws file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ContractError("draws file is empty: " + path);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 4 || header[0] != "chain" || header[1] != "iter" ||
      header.back() != "accepted" || header[header.size() - 2] != "f")
    throw ContractError("unexpected draws.csv header in " + path);
  const int d = static_cast<int>(header.size()) - 4;
  for (int i = 0; i < d; ++i)
    if (header[static_cast<std::size_t>(i + 2)] != "s_" + std::to_string(i + 1))
      throw ContractError("unexpected draws.csv state columns in " + path);

  std::vector<long> chain_ids;
  std::vector<std::vector<Vec>> states;
  std::vector<std::vector<double>> fs;
  std::vector<std::vector<char>> accepts;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ContractError("draws.csv: non-numeric cell at line " +
                            std::to_string(line_no));
      }
    }
    if (static_cast<int>(row.size()) != d + 4)
      throw ContractError("draws.csv: wrong column count at line " +
                          std::to_string(line_no));
    const long chain_id = static_cast<long>(row[0]);
    std::size_t slot = 0;
    for (; slot < chain_ids.size(); ++slot)
      if (chain_ids[slot] == chain_id) break;
    if (slot == chain_ids.size()) {
      chain_ids.push_back(chain_id);
      states.emplace_back();
      fs.emplace_back();
      accepts.emplace_back();
    }
    Vec s(d);
    for (int i = 0; i < d; ++i) s[i] = row[static_cast<std::size_t>(i) + 2];
    states[slot].push_back(std::move(s));
    fs[slot].push_back(row[static_cast<std::size_t>(d) + 2]);
    accepts[slot].push_back(row[static_cast<std::size_t>(d) + 3] != 0.0);
  }
  if (states.empty()) throw ContractError("draws.csv has no data rows");

  ChainMatrix out;
  for (std::size_t m = 0; m < states.size(); ++m) {
    const long t = static_cast<long>(states[m].size());
    Mat sm(t, d);
    Vec fm(t);
    for (long r = 0; r < t; ++r) {
      sm.row(r) = states[m][static_cast<std::size_t>(r)].transpose();
      fm[r] = fs[m][static_cast<std::size_t>(r)];
    }
    out.states.push_back(std::move(sm));
    out.f_trace.push_back(std::move(fm));
    out.accepted.push_back(std::move(accepts[m]));
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Chain execution

// Runs config.chains chains of the configured sampler; chain m uses
// RngStream(config.seed, m).  Parallel across chains up to config.threads.
inline ChainMatrix run_chains(const ExperimentConfig& config,
                              const TargetModel& target,
                              bool keep_momenta = false) {
  const SamplerKind kind = sampler_kind_from_string(config.sampler_kind);
  const int m_total = config.chains;
  const int d = target.lattice().dim();
  std::vector<ChainRecorder> recorders;
  recorders.reserve(static_cast<std::size_t>(m_total));
  for (int m = 0; m < m_total; ++m)
    recorders.emplace_back(d, config.draws,
                           keep_momenta && uses_momentum(kind));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m_total));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int m = next.fetch_add(1);
      if (m >= m_total) return;
      try {
        RngStream rng(config.seed, static_cast<std::uint64_t>(m));
        run_chain(kind, target, config.params, config.burn_in, config.draws,
                  rng, recorders[static_cast<std::size_t>(m)]);
      } catch (...) {
        errors[static_cast<std::size_t>(m)] = std::current_exception();
      }
    }
  };

  const int n_threads = std::max(1, std::min(config.threads, m_total));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ChainMatrix chains;
  for (const auto& rec : recorders) chains.append_chain(rec);
  return chains;
}

namespace detail {

inline void write_diagnostics(const ExperimentConfig& config,
                              const TargetModel& target,
                              const ChainMatrix& chains, RunSummary& summary) {
  for (const auto& diag : config.diagnostics) {
    if (diag == "tv") {
      std::vector<long> counts = config.tv_draw_counts;
      if (counts.empty()) {
        const long t = chains.num_draws();
        for (int k = 1; k <= 10; ++k) counts.push_back(t * k / 10);
      }
      const auto curve = tv_curve(chains, target, config.tv_subsets, counts,
                                  config.enumeration_cap);
      const auto path = join_dir(config.out_dir, "tv_curve.csv");
      write_tv_curve_csv(path, curve);
      summary.files_written.push_back(path);
    } else if (diag == "ess") {
      const auto [per_coord, energy] = ess_per_coordinate(chains);
      const auto path = join_dir(config.out_dir, "ess.csv");
      write_ess_csv(path, per_coord, energy);
      summary.files_written.push_back(path);
    } else if (diag == "pip") {
      const Mat per_chain = pip_per_chain(chains);
      const Vec mean = per_chain.colwise().mean().transpose();
      Vec sd = Vec::Zero(per_chain.cols());
      if (per_chain.rows() > 1)
        sd = ((per_chain.rowwise() - mean.transpose())
                  .array()
                  .square()
                  .colwise()
                  .sum() /
              static_cast<double>(per_chain.rows() - 1))
                 .sqrt()
                 .transpose();
      const auto path = join_dir(config.out_dir, "pip.csv");
      write_pip_csv(path, mean, sd);
      summary.files_written.push_back(path);
    }
  }
}

inline void write_manifest(const ExperimentConfig& config,
                           const RunSummary& summary) {
  nlohmann::json manifest;
  manifest["config"] = config.raw;
  manifest["effective"] = {{"seed", config.seed},
                           {"chains", config.chains},
                           {"threads", config.threads},
                           {"out_dir", config.out_dir}};
  manifest["wall_seconds"] = summary.wall_seconds;
  manifest["acceptance_rates"] = summary.acceptance_rates;
  manifest["files_written"] = summary.files_written;
  std::ofstream out(join_dir(config.out_dir, "manifest.json"),
                    std::ios::binary);
  if (!out) throw ContractError("cannot write manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace detail

// The `sample` subcommand: run chains, write draws.csv, the selected
// diagnostics, and the run manifest.
inline RunSummary run_experiment(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const TargetModel target = build_target(config.target);
  std::filesystem::create_directories(config.out_dir);

  const ChainMatrix chains = run_chains(config, target);
  RunSummary summary;
  const auto draws_path = detail::join_dir(config.out_dir, "draws.csv");
  write_draws_csv(draws_path, chains);
  summary.files_written.push_back(draws_path);
  for (const auto& flags : chains.accepted) {
    double acc = 0.0;
    for (const char a : flags) acc += a;
    summary.acceptance_rates.push_back(acc /
                                       static_cast<double>(flags.size()));
  }
  detail::write_diagnostics(config, target, chains, summary);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  detail::write_manifest(config, summary);
  return summary;
}

// The `tune` subcommand: runs the configured tuning procedure and writes
// tuning.csv; prints the selected parameters on stdout.
inline RunSummary run_tune_command(const ExperimentConfig& config) {
  if (!config.tune)
    throw ConfigError("the tune subcommand needs a 'tune' config block");
  const auto t0 = std::chrono::steady_clock::now();
  const TargetModel target = build_target(config.target);
  std::filesystem::create_directories(config.out_dir);
  RunSummary summary;
  const auto path = detail::join_dir(config.out_dir, "tuning.csv");
  if (config.tune->method == "stepsize") {
    const auto& ts = config.tune->stepsize;
    SamplerKind kind;
    try {
      kind = sampler_kind_from_string(ts.kind);
      if (kind == SamplerKind::kMetropolis || kind == SamplerKind::kOrdinalGwg)
        throw ContractError("stepsize tuning needs a stepsize-driven kernel");
    } catch (const ContractError& e) {
      throw ConfigError(std::string("tune.kind: ") + e.what());
    }
    RngStream rng(config.seed, 0);
    std::vector<std::pair<double, double>> trace;
    const double best = tune_stepsize_target_acceptance(
        kind, target, ts.init_delta, ts.target_alpha, ts.a_exp, ts.m_max,
        ts.probe_len, rng, config.params, &trace);
    write_stepsize_tuning_csv(path, trace);
    std::cout << "tuned delta = " << format_sig17(best) << '\n';
  } else {
    const auto& gr = config.tune->grid;
    RngStream rng(config.seed, 0);
    TuneDhamsOptions opts;
    opts.chains = gr.chains;
    opts.n_burn = gr.burn_in;
    opts.n_keep = gr.draws;
    const auto result = tune_dhams(target, gr.beta, gr.epsilon, gr.delta_grid,
                                   gr.phi_grid, gr.criterion, rng, opts);
    write_tuning_csv(path, result.trace);
    std::cout << "tuned delta = " << format_sig17(result.params.delta)
              << ", phi = " << format_sig17(result.params.phi)
              << " (criterion " << format_sig17(result.criterion) << ")\n";
  }
  summary.files_written.push_back(path);
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return summary;
}

// The `tv`, `ess`, and `pip` subcommands re-ingest a previous run's
// draws.csv from the output directory and emit one diagnostic CSV each.
inline RunSummary run_tv_command(const ExperimentConfig& config) {
  const TargetModel target = build_target(config.target);
  const auto chains =
      read_draws_csv(detail::join_dir(config.out_dir, "draws.csv"));
  std::vector<long> counts = config.tv_draw_counts;
  if (counts.empty()) {
    const long t = chains.num_draws();
    for (int k = 1; k <= 10; ++k) counts.push_back(t * k / 10);
  }
  const auto curve = tv_curve(chains, target, config.tv_subsets, counts,
                              config.enumeration_cap);
  RunSummary summary;
  const auto path = detail::join_dir(config.out_dir, "tv_curve.csv");
  write_tv_curve_csv(path, curve);
  summary.files_written.push_back(path);
  return summary;
}

inline RunSummary run_ess_command(const ExperimentConfig& config) {
  const auto chains =
      read_draws_csv(detail::join_dir(config.out_dir, "draws.csv"));
  const auto [per_coord, energy] = ess_per_coordinate(chains);
  RunSummary summary;
  const auto path = detail::join_dir(config.out_dir, "ess.csv");
  write_ess_csv(path, per_coord, energy);
  summary.files_written.push_back(path);
  return summary;
}

inline RunSummary run_pip_command(const ExperimentConfig& config) {
  const auto chains =
      read_draws_csv(detail::join_dir(config.out_dir, "draws.csv"));
  const Mat per_chain = pip_per_chain(chains);
  const Vec mean = per_chain.colwise().mean().transpose();
  Vec sd = Vec::Zero(per_chain.cols());
  if (per_chain.rows() > 1)
    sd = ((per_chain.rowwise() - mean.transpose())
              .array()
              .square()
              .colwise()
              .sum() /
          static_cast<double>(per_chain.rows() - 1))
             .sqrt()
             .transpose();
  RunSummary summary;
  const auto path = detail::join_dir(config.out_dir, "pip.csv");
  write_pip_csv(path, mean, sd);
  summary.files_written.push_back(path);
  return summary;
}

}  // namespace dhams
