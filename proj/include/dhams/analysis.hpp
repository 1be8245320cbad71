#pragma once

// Diagnostics over recorded chains — exact-enumeration TV distance,
// multi-chain batch-mean ESS, acceptance rate, average flips, posterior
// inclusion probabilities, autocorrelation — plus the two offline tuning
// procedures (acceptance-targeting stepsize search and the two-stage
// delta/phi grid search) and the CSV emitters for the diagnostic reports.
//
// Conventions: chains are rectangular (same T and d across chains); all
// reductions are pure; degenerate ESS cases are mapped to sentinels (within-
// chain variance 0 -> 0, between-chain variance 0 -> +infinity) with a
// warning on stderr so batch jobs survive frozen chains.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dhams/core.hpp"
#include "dhams/proposal.hpp"
#include "dhams/rng.hpp"
#include "dhams/samplers.hpp"

namespace dhams {

// ---------------------------------------------------------------------------
// Chain container

struct ChainMatrix {
  std::vector<Mat> states;                  // per chain: T x d
  std::vector<Vec> f_trace;                 // per chain: T
  std::vector<std::vector<char>> accepted;  // per chain: T
  std::vector<Mat> momenta;                 // per chain: T x d, may be empty

  int num_chains() const { return static_cast<int>(states.size()); }
  long num_draws() const { return states.empty() ? 0 : states.front().rows(); }
  int dim() const {
    return states.empty() ? 0 : static_cast<int>(states.front().cols());
  }

  void append_chain(const ChainRecorder& rec) {
    states.push_back(rec.states());
    f_trace.push_back(rec.f_trace());
    accepted.push_back(rec.accepted());
    if (rec.momenta().rows() > 0) momenta.push_back(rec.momenta());
  }

  void validate() const {
    if (states.empty()) throw ContractError("ChainMatrix: no chains");
    const long t = states.front().rows();
    const long d = states.front().cols();
    if (t < 1 || d < 1) throw ContractError("ChainMatrix: empty chain");
    for (std::size_t m = 0; m < states.size(); ++m) {
      if (states[m].rows() != t || states[m].cols() != d)
        throw ContractError("ChainMatrix: ragged chain shapes");
      if (f_trace.size() != states.size() || f_trace[m].size() != t)
        throw ContractError("ChainMatrix: f trace shape mismatch");
      if (accepted.size() != states.size() ||
          static_cast<long>(accepted[m].size()) != t)
        throw ContractError("ChainMatrix: accept flag shape mismatch");
    }
    if (!momenta.empty())
      for (const auto& u : momenta)
        if (u.rows() != t || u.cols() != d)
          throw ContractError("ChainMatrix: momentum shape mismatch");
  }
};

// ---------------------------------------------------------------------------
// Probability tables over coordinate subsets

// Probabilities over the joint support of a coordinate subset, cells in
// lexicographic order with the last listed coordinate varying fastest.
class MarginalTable {
 public:
  MarginalTable(std::vector<int> coords, int num_levels, Vec probs)
      : coords_(std::move(coords)), num_levels_(num_levels),
        probs_(std::move(probs)) {
    if (coords_.empty()) throw ContractError("MarginalTable: empty subset");
    if (num_levels_ < 1) throw ContractError("MarginalTable: bad level count");
    double expect = 1.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) expect *= num_levels_;
    if (static_cast<double>(probs_.size()) != expect)
      throw ContractError("MarginalTable: cell count != K^|coords|");
    double sum = 0.0, comp = 0.0;
    for (long c = 0; c < probs_.size(); ++c) {
      if (!(probs_[c] >= 0))
        throw ContractError("MarginalTable: negative cell");
      const double y = probs_[c] - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    if (std::abs(sum - 1.0) > 1e-10)
      throw ContractError("MarginalTable: cells sum to " +
                          std::to_string(sum));
  }

  const std::vector<int>& coords() const { return coords_; }
  int num_levels() const { return num_levels_; }
  long size() const { return probs_.size(); }
  double prob(long cell) const { return probs_[cell]; }
  const Vec& probs() const { return probs_; }

  // Flat cell index from per-coordinate level indices (in coords() order).
  long cell_index(const std::vector<int>& levels) const {
    if (levels.size() != coords_.size())
      throw ContractError("MarginalTable: level count mismatch");
    long cell = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i] < 0 || levels[i] >= num_levels_)
        throw ContractError("MarginalTable: level index out of range");
      cell = cell * num_levels_ + levels[i];
    }
    return cell;
  }

 private:
  std::vector<int> coords_;
  int num_levels_;
  Vec probs_;
};

// Normalized exp(f) over the full lattice enumeration.
inline MarginalTable exact_joint(const TargetModel& target,
                                 std::uint64_t cap = kDefaultEnumerationCap) {
  const auto& lattice = target.lattice();
  const auto n = lattice.num_states_checked(cap);
  Vec vals(static_cast<long>(n));
  long row = 0;
  for_each_state(lattice, cap,
                 [&](const Vec& s) { vals[row++] = target.potential(s); });
  const double mx = vals.maxCoeff();
  if (!std::isfinite(mx))
    throw ContractError("exact_joint: potential is non-finite everywhere");
  double z = 0.0;
  for (long c = 0; c < vals.size(); ++c) z += std::exp(vals[c] - mx);
  const double log_z = mx + std::log(z);
  for (long c = 0; c < vals.size(); ++c) vals[c] = std::exp(vals[c] - log_z);
  std::vector<int> coords(static_cast<std::size_t>(lattice.dim()));
  for (int i = 0; i < lattice.dim(); ++i) coords[static_cast<std::size_t>(i)] = i;
  return MarginalTable(std::move(coords), lattice.num_levels(),
                       std::move(vals));
}

// Sum out every coordinate of `joint` not listed in `coords`.
inline MarginalTable marginalize(const MarginalTable& joint,
                                 const std::vector<int>& coords) {
  const auto& jc = joint.coords();
  std::vector<long> pos;
  for (int c : coords) {
    const auto it = std::find(jc.begin(), jc.end(), c);
    if (it == jc.end())
      throw ContractError("marginalize: coordinate not in source table");
    pos.push_back(it - jc.begin());
  }
  const int K = joint.num_levels();
  long out_size = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) out_size *= K;
  Vec out = Vec::Zero(out_size);
  std::vector<int> levels(jc.size());
  for (long cell = 0; cell < joint.size(); ++cell) {
    long rem = cell;
    for (std::size_t i = jc.size(); i-- > 0;) {
      levels[i] = static_cast<int>(rem % K);
      rem /= K;
    }
    long sub = 0;
    for (const long p : pos) sub = sub * K + levels[static_cast<std::size_t>(p)];
    out[sub] += joint.prob(cell);
  }
  return MarginalTable(coords, K, std::move(out));
}

namespace detail {

inline long empirical_cell(const Mat& states, long t,
                           const std::vector<int>& coords,
                           const LatticeSpec& lattice) {
  long cell = 0;
  for (const int c : coords)
    cell = cell * lattice.num_levels() + lattice.index_of(states(t, c));
  return cell;
}

}  // namespace detail

// Frequency table over the first `t_limit` draws of one chain (t_limit < 0
// means all draws).
inline MarginalTable empirical_marginal(const Mat& chain_states, long t_limit,
                                        const std::vector<int>& coords,
                                        const LatticeSpec& lattice) {
  const long t_max =
      t_limit < 0 ? chain_states.rows() : std::min(t_limit, chain_states.rows());
  if (t_max < 1) throw ContractError("empirical_marginal: no draws");
  long size = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) size *= lattice.num_levels();
  Vec counts = Vec::Zero(size);
  for (long t = 0; t < t_max; ++t)
    counts[detail::empirical_cell(chain_states, t, coords, lattice)] += 1.0;
  counts /= static_cast<double>(t_max);
  return MarginalTable(coords, lattice.num_levels(), std::move(counts));
}

// Pooled over all chains and draws.
inline MarginalTable empirical_marginal(const ChainMatrix& chains,
                                        const std::vector<int>& coords,
                                        const LatticeSpec& lattice) {
  chains.validate();
  long size = 1;
  for (std::size_t i = 0; i < coords.size(); ++i) size *= lattice.num_levels();
  Vec counts = Vec::Zero(size);
  long total = 0;
  for (const auto& st : chains.states) {
    for (long t = 0; t < st.rows(); ++t)
      counts[detail::empirical_cell(st, t, coords, lattice)] += 1.0;
    total += st.rows();
  }
  counts /= static_cast<double>(total);
  return MarginalTable(coords, lattice.num_levels(), std::move(counts));
}

// Half L1 distance between two tables over the same cells.
inline double tv_distance(const MarginalTable& p, const MarginalTable& q) {
  if (p.coords() != q.coords() || p.num_levels() != q.num_levels())
    throw ContractError("tv_distance: mismatched supports");
  double sum = 0.0, comp = 0.0;
  for (long c = 0; c < p.size(); ++c) {
    const double y = std::abs(p.prob(c) - q.prob(c)) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return 0.5 * sum;
}

// ---------------------------------------------------------------------------
// Scalar diagnostics

// Multi-chain batch-mean ESS: rows of x are chains, columns are draws.
// ESS = T W / B with W the within-chain and B the between-chain variance.
inline double ess_multichain(const Mat& x) {
  const long m = x.rows(), t = x.cols();
  if (m < 2 || t < 2)
    throw ContractError("ess_multichain: need at least 2 chains x 2 draws");
  const Vec chain_mean = x.rowwise().mean();
  const double grand = chain_mean.mean();
  double w = 0.0;
  for (long i = 0; i < m; ++i)
    w += (x.row(i).array() - chain_mean[i]).square().sum();
  w /= static_cast<double>(m) * static_cast<double>(t - 1);
  double b = 0.0;
  for (long i = 0; i < m; ++i) {
    const double dlt = chain_mean[i] - grand;
    b += dlt * dlt;
  }
  b *= static_cast<double>(t) / static_cast<double>(m - 1);
  if (w == 0.0) {
    std::cerr << "[dhams] warning: zero within-chain variance; ESS = 0\n";
    return 0.0;
  }
  if (b == 0.0) {
    std::cerr << "[dhams] warning: zero between-chain variance; ESS = inf\n";
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(t) * w / b;
}

inline double acceptance_rate(const ChainMatrix& chains) {
  chains.validate();
  double acc = 0.0, total = 0.0;
  for (const auto& flags : chains.accepted) {
    for (const char a : flags) acc += a;
    total += static_cast<double>(flags.size());
  }
  return acc / total;
}

// Mean L1 distance between successive kept states, over steps and chains.
inline double average_flips(const ChainMatrix& chains) {
  chains.validate();
  if (chains.num_draws() < 2)
    throw ContractError("average_flips: need at least 2 draws");
  double sum = 0.0, steps = 0.0;
  for (const auto& st : chains.states) {
    for (long t = 0; t + 1 < st.rows(); ++t)
      sum += (st.row(t + 1) - st.row(t)).cwiseAbs().sum();
    steps += static_cast<double>(st.rows() - 1);
  }
  return sum / steps;
}

namespace detail {

inline void require_binary_states(const ChainMatrix& chains) {
  for (const auto& st : chains.states)
    if (!((st.array() == 0.0) || (st.array() == 1.0)).all())
      throw ContractError("pip_estimates: states are not binary");
}

}  // namespace detail

// Per-coordinate inclusion frequency of one chain.
inline Vec pip_single_chain(const Mat& chain_states) {
  return chain_states.colwise().mean().transpose();
}

// Pooled posterior inclusion probabilities over all chains.
inline Vec pip_estimates(const ChainMatrix& chains) {
  chains.validate();
  detail::require_binary_states(chains);
  Vec acc = Vec::Zero(chains.dim());
  for (const auto& st : chains.states) acc += pip_single_chain(st);
  return acc / static_cast<double>(chains.num_chains());
}

// Rows are chains, columns coordinates.
inline Mat pip_per_chain(const ChainMatrix& chains) {
  chains.validate();
  detail::require_binary_states(chains);
  Mat out(chains.num_chains(), chains.dim());
  for (int m = 0; m < chains.num_chains(); ++m)
    out.row(m) = pip_single_chain(chains.states[static_cast<std::size_t>(m)])
                     .transpose();
  return out;
}

// Standard biased autocorrelation estimates, lags 0..max_lag (lag 0 = 1).
inline Vec autocorrelation(const Vec& x, int max_lag) {
  const long t = x.size();
  if (max_lag < 0 || t <= max_lag)
    throw ContractError("autocorrelation: need T > max_lag >= 0");
  const double mean = x.mean();
  const Vec centered = x.array() - mean;
  const double c0 = centered.squaredNorm() / static_cast<double>(t);
  if (c0 == 0.0)
    throw ContractError("autocorrelation: constant series has zero variance");
  Vec acf(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double ck = 0.0;
    for (long i = 0; i + k < t; ++i) ck += centered[i] * centered[i + k];
    acf[k] = ck / (static_cast<double>(t) * c0);
  }
  return acf;
}

// Batch-means standard error of the mean of a correlated series.
inline double batch_means_se(const Vec& x, long batch_size) {
  const long t = x.size();
  if (batch_size < 1 || t < 2 * batch_size)
    throw ContractError("batch_means_se: need at least two full batches");
  const long n_batches = t / batch_size;
  Vec bm(n_batches);
  for (long b = 0; b < n_batches; ++b)
    bm[b] = x.segment(b * batch_size, batch_size).mean();
  const double mean = bm.mean();
  const double var =
      (bm.array() - mean).square().sum() / static_cast<double>(n_batches - 1);
  return std::sqrt(var / static_cast<double>(n_batches));
}

// ---------------------------------------------------------------------------
// TV curve (mean/sd across chains, averaged over coordinate subsets)

struct TvCurvePoint {
  long draw_count;
  double mean_tv;
  double sd_tv;
};

inline std::vector<TvCurvePoint> tv_curve(
    const ChainMatrix& chains, const TargetModel& target,
    std::vector<std::vector<int>> subsets, std::vector<long> draw_counts,
    std::uint64_t cap = kDefaultEnumerationCap) {
  chains.validate();
  const auto& lattice = target.lattice();
  if (subsets.empty()) {
    subsets.emplace_back();
    for (int i = 0; i < lattice.dim(); ++i) subsets.back().push_back(i);
  }
  if (draw_counts.empty()) draw_counts.push_back(chains.num_draws());
  const auto joint = exact_joint(target, cap);
  std::vector<MarginalTable> exact;
  exact.reserve(subsets.size());
  for (const auto& sub : subsets) exact.push_back(marginalize(joint, sub));

  std::vector<TvCurvePoint> out;
  for (const long t_limit : draw_counts) {
    if (t_limit < 1 || t_limit > chains.num_draws())
      throw ContractError("tv_curve: draw count out of range");
    std::vector<double> per_chain;
    for (const auto& st : chains.states) {
      double mean_over_subsets = 0.0;
      for (std::size_t k = 0; k < subsets.size(); ++k) {
        const auto emp =
            empirical_marginal(st, t_limit, subsets[k], lattice);
        mean_over_subsets += tv_distance(exact[k], emp);
      }
      per_chain.push_back(mean_over_subsets /
                          static_cast<double>(subsets.size()));
    }
    double mean = 0.0;
    for (const double v : per_chain) mean += v;
    mean /= static_cast<double>(per_chain.size());
    double sd = 0.0;
    if (per_chain.size() > 1) {
      for (const double v : per_chain) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / static_cast<double>(per_chain.size() - 1));
    }
    out.push_back(TvCurvePoint{t_limit, mean, sd});
  }
  return out;
}

// Per-coordinate ESS plus the ESS of the potential trace ("energy").
inline std::pair<Vec, double> ess_per_coordinate(const ChainMatrix& chains) {
  chains.validate();
  const int m = chains.num_chains();
  const long t = chains.num_draws();
  Vec out(chains.dim());
  Mat x(m, t);
  for (int i = 0; i < chains.dim(); ++i) {
    for (int c = 0; c < m; ++c)
      x.row(c) = chains.states[static_cast<std::size_t>(c)].col(i).transpose();
    out[i] = ess_multichain(x);
  }
  for (int c = 0; c < m; ++c)
    x.row(c) = chains.f_trace[static_cast<std::size_t>(c)].transpose();
  return {std::move(out), ess_multichain(x)};
}

// ---------------------------------------------------------------------------
// Offline tuning

// Acceptance-targeting stepsize search: delta_{m+1} = delta_m *
// exp(sign(alpha_m - alpha) * (1+m)^(-a)); returns the probed delta whose
// acceptance was closest to the target.  `probe` maps delta -> acceptance.
template <typename ProbeFn>
double tune_stepsize_core(double init_delta, double target_alpha, double a_exp,
                          int m_max, ProbeFn&& probe,
                          std::vector<std::pair<double, double>>* trace =
                              nullptr) {
  if (!(target_alpha > 0 && target_alpha < 1))
    throw ContractError("tune_stepsize: target acceptance must be in (0,1)");
  if (!(init_delta > 0) || m_max < 1 || !(a_exp > 0))
    throw ContractError("tune_stepsize: bad search parameters");
  double delta = init_delta;
  double best_delta = init_delta;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int m = 0; m < m_max; ++m) {
    const double alpha = probe(delta);
    if (trace) trace->emplace_back(delta, alpha);
    const double gap = std::abs(alpha - target_alpha);
    if (gap < best_gap) {
      best_gap = gap;
      best_delta = delta;
    }
    const double scale = std::pow(1.0 + m, -a_exp);
    delta *= std::exp(alpha > target_alpha ? scale : -scale);
  }
  return best_delta;
}

// Probe = short chain of the given kernel from a random initialization; only
// stepsize-driven kernels are supported.
inline double tune_stepsize_target_acceptance(
    SamplerKind kind, const TargetModel& target, double init_delta,
    double target_alpha, double a_exp, int m_max, long probe_len,
    RngStream& rng, const SamplerParams& base = SamplerParams{},
    std::vector<std::pair<double, double>>* trace = nullptr) {
  if (kind == SamplerKind::kMetropolis || kind == SamplerKind::kOrdinalGwg)
    throw ContractError(
        "tune_stepsize: window-based kernels have no continuous stepsize");
  if (probe_len < 1) throw ContractError("tune_stepsize: probe_len >= 1");
  auto probe = [&](double delta) {
    SamplerParams params = base;
    params.delta = delta;
    ChainRecorder rec(target.lattice().dim(), probe_len,
                      /*keep_momenta=*/false);
    run_chain(kind, target, params, 0, probe_len, rng, rec);
    return rec.acceptance_rate();
  };
  return tune_stepsize_core(init_delta, target_alpha, a_exp, m_max, probe,
                            trace);
}

enum class TuneCriterion { kEssPotential, kAverageFlips };

struct TuneRecord {
  SamplerParams params;
  double criterion;
};

struct TuneDhamsResult {
  SamplerParams params;
  double criterion;
  std::vector<TuneRecord> trace;
};

// Two-stage grid search: best delta at phi = 0, then best phi at that delta.
// `eval` maps (delta, phi) -> criterion value (larger is better).
template <typename EvalFn>
std::pair<double, double> tune_dhams_core(const std::vector<double>& delta_grid,
                                          const std::vector<double>& phi_grid,
                                          EvalFn&& eval) {
  if (delta_grid.empty() || phi_grid.empty())
    throw ContractError("tune_dhams: empty parameter grid");
  double best_delta = delta_grid.front();
  double best_val = -std::numeric_limits<double>::infinity();
  for (const double d : delta_grid) {
    const double v = eval(d, 0.0);
    if (v > best_val) {
      best_val = v;
      best_delta = d;
    }
  }
  double best_phi = phi_grid.front();
  best_val = -std::numeric_limits<double>::infinity();
  for (const double p : phi_grid) {
    const double v = eval(best_delta, p);
    if (v > best_val) {
      best_val = v;
      best_phi = p;
    }
  }
  return {best_delta, best_phi};
}

struct TuneDhamsOptions {
  int chains = 4;
  long n_burn = 500;
  long n_keep = 2000;
};

// Grid tuning for the Hamiltonian-assisted kernels: epsilon and (for the
// over-relaxed kernel) beta are fixed, delta and phi are searched.  The
// criterion is the multi-chain ESS of f(s) for ordinal targets or the average
// number of flips for binary mask targets.
inline TuneDhamsResult tune_dhams(const TargetModel& target,
                                  std::optional<double> beta_choice,
                                  double epsilon,
                                  const std::vector<double>& delta_grid,
                                  const std::vector<double>& phi_grid,
                                  TuneCriterion criterion, RngStream& rng,
                                  const TuneDhamsOptions& opts = {}) {
  if (opts.chains < 2 || opts.n_keep < 2)
    throw ContractError("tune_dhams: need at least 2 chains x 2 draws");
  const SamplerKind kind =
      beta_choice ? SamplerKind::kODhams : SamplerKind::kVDhams;
  std::vector<TuneRecord> trace;
  auto eval = [&](double delta, double phi) {
    SamplerParams params;
    params.delta = delta;
    params.epsilon = epsilon;
    params.phi = phi;
    if (beta_choice) params.beta = *beta_choice;
    ChainMatrix chains;
    for (int m = 0; m < opts.chains; ++m) {
      RngStream child(rng.next_u64(), 0);
      ChainRecorder rec(target.lattice().dim(), opts.n_keep, false);
      run_chain(kind, target, params, opts.n_burn, opts.n_keep, child, rec);
      chains.append_chain(rec);
    }
    double value = 0.0;
    if (criterion == TuneCriterion::kEssPotential) {
      Mat x(opts.chains, opts.n_keep);
      for (int m = 0; m < opts.chains; ++m)
        x.row(m) = chains.f_trace[static_cast<std::size_t>(m)].transpose();
      value = ess_multichain(x);
    } else {
      value = average_flips(chains);
    }
    trace.push_back(TuneRecord{params, value});
    return value;
  };
  const auto [best_delta, best_phi] =
      tune_dhams_core(delta_grid, phi_grid, eval);
  SamplerParams best;
  best.delta = best_delta;
  best.epsilon = epsilon;
  best.phi = best_phi;
  if (beta_choice) best.beta = *beta_choice;
  double best_val = -std::numeric_limits<double>::infinity();
  for (const auto& rec : trace)
    if (rec.params.delta == best_delta && rec.params.phi == best_phi)
      best_val = std::max(best_val, rec.criterion);
  return TuneDhamsResult{best, best_val, std::move(trace)};
}

// ---------------------------------------------------------------------------
// CSV emitters (17 significant digits for lossless round-trips)

inline std::string format_sig17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shortest decimal that round-trips to the same double; used for
// human-readable parameter labels (so 0.9 prints as "0.9").
inline std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' endings on all platforms
  if (!out) throw ContractError("cannot open output file: " + path);
  return out;
}

}  // namespace detail

inline void write_tv_curve_csv(const std::string& path,
                               const std::vector<TvCurvePoint>& rows) {
  auto out = detail::open_csv(path);
  out << "draw_count,mean_tv,sd_tv\n";
  for (const auto& r : rows)
    out << r.draw_count << ',' << format_sig17(r.mean_tv) << ','
        << format_sig17(r.sd_tv) << '\n';
}

inline void write_ess_csv(const std::string& path, const Vec& per_coord,
                          double energy_ess) {
  auto out = detail::open_csv(path);
  out << "coordinate,ess\n";
  for (long i = 0; i < per_coord.size(); ++i)
    out << "s_" << (i + 1) << ',' << format_sig17(per_coord[i]) << '\n';
  out << "energy," << format_sig17(energy_ess) << '\n';
}

inline void write_pip_csv(const std::string& path, const Vec& mean_pip,
                          const Vec& sd_pip) {
  if (mean_pip.size() != sd_pip.size())
    throw ContractError("write_pip_csv: length mismatch");
  auto out = detail::open_csv(path);
  out << "coordinate,mean_pip,sd_pip\n";
  for (long i = 0; i < mean_pip.size(); ++i)
    out << "s_" << (i + 1) << ',' << format_sig17(mean_pip[i]) << ','
        << format_sig17(sd_pip[i]) << '\n';
}

inline void write_tuning_csv(const std::string& path,
                             const std::vector<TuneRecord>& rows) {
  auto out = detail::open_csv(path);
  out << "params,criterion\n";
  for (const auto& r : rows) {
    out << "delta=" << format_shortest(r.params.delta)
        << ";epsilon=" << format_shortest(r.params.epsilon)
        << ";phi=" << format_shortest(r.params.phi)
        << ";beta=" << format_shortest(r.params.beta) << ','
        << format_sig17(r.criterion) << '\n';
  }
}

inline void write_stepsize_tuning_csv(
    const std::string& path,
    const std::vector<std::pair<double, double>>& probes) {
  auto out = detail::open_csv(path);
  out << "params,criterion\n";
  for (const auto& [delta, alpha] : probes)
    out << "delta=" << format_shortest(delta) << ',' << format_sig17(alpha)
        << '\n';
}

}  // namespace dhams
