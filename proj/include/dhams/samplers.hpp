#pragma once

// One-step transition kernels for the six lattice samplers, plus a chain
// runner.  Every kernel returns a StepOutcome carrying the raw log acceptance
// ratio (before the min with 0) and the post-step chain state.
//
// Kernels:
//   metropolis_step  uniform proposal over the L-infinity index box around
//                    s_t (radius window_r), excluding s_t, with the exact
//                    boundary-aware neighbor-count correction.
//   gwg_step         locally balanced proposal over {s_t} plus all states
//                    differing in exactly one coordinate by at most window_r
//                    index steps, weights exp(grad f(s_t)' (s - s_t) / 2).
//   ncg_step         informed softmax with c = grad f(s_t)/2 + s_t/delta,
//                    q = 1/(2 delta); standard two-sided kernel correction.
//   avg_step         auxiliary Gaussian z = s_t + delta N(0,I), softmax with
//                    c = grad f(s_t) + z/delta^2, q = 1/(2 delta^2); the
//                    z-dependent terms cancel analytically, leaving the exact
//                    closed-form ratio below.
//   vdhams_step      momentum refresh u' = eps u + sqrt(1-eps^2) Z, anchor
//                    z = s_t - delta u', same softmax family, deterministic
//                    momentum update with gradient correction phi, exact
//                    closed-form ratio; rejection negates the momentum.
//   odhams_step      as vdhams_step but the candidate is drawn coordinate-wise
//                    by over-relaxation (parameter beta) against the forward
//                    softmax reference; the ratio swaps the softmax kernel
//                    terms for over-relaxed transition probabilities.
//
// Exact acceptance ratios.  With q = 1/(2 delta^2) and
// LNS(g, anchor) = sum_i logsumexp_a [g_i a - q (anchor_i - a)^2]:
//
//   AVG    : log r = f(s*) - f(s_t) + grad f(s*)'s_t - grad f(s_t)'s*
//                    + LNS(grad f(s_t), z) - LNS(grad f(s*), z)
//   V-DHAMS: log r = f(s*) - f(s_t) + grad f(s*)'s_t - grad f(s_t)'s*
//                    - |u*|^2 + |u'|^2 - (1/delta)(s* - s_t)'(u* - u')
//                    + LNS(grad f(s_t), s_t - delta u')
//                    - LNS(grad f(s*),  s* + delta u*)
//
// Both reduce to zero identically on log-linear targets (rejection-free), and
// V-DHAMS with eps = 0, phi = 0 reduces to AVG on matched (s_t, z) inputs.
// The sign of the momentum cross term matters: with (u* + u') in place of
// (u* - u') the linear-target identity fails, so that is the correct form.
//
// The *_forward / *_eval helpers expose each kernel's internals (reference
// distribution construction and ratio-given-candidate) so tests can enumerate
// candidate distributions and cross-check the closed forms against naive
// assemblies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dhams/core.hpp"
#include "dhams/overrelax.hpp"
#include "dhams/proposal.hpp"
#include "dhams/rng.hpp"

namespace dhams {

enum class SamplerKind { kMetropolis, kOrdinalGwg, kNcg, kAvg, kVDhams, kODhams };

inline const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kMetropolis: return "metropolis";
    case SamplerKind::kOrdinalGwg: return "gwg";
    case SamplerKind::kNcg: return "ncg";
    case SamplerKind::kAvg: return "avg";
    case SamplerKind::kVDhams: return "vdhams";
    case SamplerKind::kODhams: return "odhams";
  }
  throw ContractError("to_string: unknown SamplerKind");
}

inline SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "metropolis") return SamplerKind::kMetropolis;
  if (name == "gwg") return SamplerKind::kOrdinalGwg;
  if (name == "ncg") return SamplerKind::kNcg;
  if (name == "avg") return SamplerKind::kAvg;
  if (name == "vdhams") return SamplerKind::kVDhams;
  if (name == "odhams") return SamplerKind::kODhams;
  throw ContractError("unknown sampler kind: " + name);
}

inline bool uses_momentum(SamplerKind kind) {
  return kind == SamplerKind::kVDhams || kind == SamplerKind::kODhams;
}

inline bool uses_gradient(SamplerKind kind) {
  return kind != SamplerKind::kMetropolis;
}

struct StepOutcome {
  Vec proposal_s;          // candidate state
  Vec proposal_u;          // candidate momentum (DHAMS family; else empty)
  double log_accept_ratio; // raw log ratio, before min(0, .)
  bool accepted;
  ChainState next;         // post-step state (momentum empty for flat kernels)
};

namespace detail {

// One uniform decides acceptance: U < exp(min(0, log r)).  uniform01() lives
// in [0, 1), so a ratio >= 0 always accepts and -inf never does.
inline bool accept_draw(double log_ratio, RngStream& rng) {
  const double p = std::exp(std::min(0.0, log_ratio));
  return rng.uniform01() < p;
}

inline Vec state_indices(const LatticeSpec& lattice, const Vec& s) {
  Vec idx(s.size());
  for (int i = 0; i < s.size(); ++i) idx[i] = lattice.index_of(s[i]);
  return idx;
}

// Categorical draw over log weights; one uniform.  Returns the index.
inline int sample_from_log_weights(const std::vector<double>& logw,
                                   RngStream& rng) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double w : logw) mx = std::max(mx, w);
  double total = 0.0;
  std::vector<double> unnorm(logw.size());
  for (std::size_t j = 0; j < logw.size(); ++j) {
    unnorm[j] = std::exp(logw[j] - mx);
    total += unnorm[j];
  }
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < logw.size(); ++j) {
    acc += unnorm[j];
    if (u < acc) return static_cast<int>(j);
  }
  return static_cast<int>(logw.size()) - 1;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Metropolis with uniform proposal on the L-infinity index box

// Number of lattice states with every coordinate within r index steps of s,
// excluding s itself (boundary-aware).
inline double metropolis_neighbor_count(const LatticeSpec& lattice,
                                        const Vec& s, int r) {
  const int K = lattice.num_levels();
  double count = 1.0;
  for (int i = 0; i < lattice.dim(); ++i) {
    const int idx = lattice.index_of(s[i]);
    const int lo = std::max(0, idx - r);
    const int hi = std::min(K - 1, idx + r);
    count *= static_cast<double>(hi - lo + 1);
  }
  return count - 1.0;
}

inline StepOutcome metropolis_step(const TargetModel& target, const Vec& s_t,
                                   const SamplerParams& params,
                                   RngStream& rng) {
  params.validate();
  const auto& lattice = target.lattice();
  const int d = lattice.dim();
  const int K = lattice.num_levels();
  const int r = params.window_r;
  const double n_cur = metropolis_neighbor_count(lattice, s_t, r);
  if (n_cur < 1.0)
    throw ContractError("metropolis_step: empty neighbor set");

  std::vector<int> lo(static_cast<std::size_t>(d)), width(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const int idx = lattice.index_of(s_t[i]);
    lo[static_cast<std::size_t>(i)] = std::max(0, idx - r);
    width[static_cast<std::size_t>(i)] =
        std::min(K - 1, idx + r) - lo[static_cast<std::size_t>(i)] + 1;
  }
  // Uniform over the box minus the current point, by redraw on self-hit; the
  // box holds at least two states, so each attempt succeeds w.p. >= 1/2.
  Vec s_star(d);
  for (;;) {
    bool is_self = true;
    for (int i = 0; i < d; ++i) {
      const auto k = lo[static_cast<std::size_t>(i)] +
                     static_cast<int>(rng.uniform_below(
                         static_cast<std::uint64_t>(width[static_cast<std::size_t>(i)])));
      s_star[i] = lattice.value(k);
      if (s_star[i] != s_t[i]) is_self = false;
    }
    if (!is_self) break;
  }

  const double n_star = metropolis_neighbor_count(lattice, s_star, r);
  const double log_ratio = target.potential(s_star) - target.potential(s_t) +
                           std::log(n_cur) - std::log(n_star);
  const bool acc = detail::accept_draw(log_ratio, rng);
  return StepOutcome{s_star, Vec(), log_ratio, acc,
                     ChainState{acc ? s_star : s_t, Vec()}};
}

// ---------------------------------------------------------------------------
// Ordinal gradient-weighted proposal (Hamming radius 1, index window r)

// Candidate set: s itself, then each single-coordinate move of 1..r index
// steps either way that stays on the lattice, in (coordinate, signed offset)
// order.
inline std::vector<Vec> gwg_candidates(const LatticeSpec& lattice, const Vec& s,
                                       int r) {
  const int K = lattice.num_levels();
  std::vector<Vec> out;
  out.push_back(s);
  for (int i = 0; i < lattice.dim(); ++i) {
    const int idx = lattice.index_of(s[i]);
    for (int off = -r; off <= r; ++off) {
      if (off == 0) continue;
      const int k = idx + off;
      if (k < 0 || k >= K) continue;
      Vec v = s;
      v[i] = lattice.value(k);
      out.push_back(std::move(v));
    }
  }
  return out;
}

// Locally balanced log weights exp(grad' (v - s) / 2) over the candidates.
inline std::vector<double> gwg_log_weights(const Vec& grad, const Vec& s,
                                           const std::vector<Vec>& candidates) {
  std::vector<double> logw(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j)
    logw[j] = 0.5 * grad.dot(candidates[j] - s);
  return logw;
}

namespace detail {

inline double log_prob_in_ball(const std::vector<double>& logw,
                               const std::vector<Vec>& candidates,
                               const Vec& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double w : logw) mx = std::max(mx, w);
  double z = 0.0;
  double hit = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < logw.size(); ++j) {
    z += std::exp(logw[j] - mx);
    if (candidates[j] == v) hit = logw[j];
  }
  if (!std::isfinite(hit)) return -std::numeric_limits<double>::infinity();
  return hit - mx - std::log(z);
}

}  // namespace detail

inline StepOutcome gwg_step(const TargetModel& target, const Vec& s_t,
                            const SamplerParams& params, RngStream& rng) {
  params.validate();
  const auto& lattice = target.lattice();
  const Vec grad_t = target.gradient(s_t);
  const auto fwd = gwg_candidates(lattice, s_t, params.window_r);
  const auto logw_fwd = gwg_log_weights(grad_t, s_t, fwd);
  const int pick = detail::sample_from_log_weights(logw_fwd, rng);
  const Vec& s_star = fwd[static_cast<std::size_t>(pick)];

  const Vec grad_star = target.gradient(s_star);
  const auto bwd = gwg_candidates(lattice, s_star, params.window_r);
  const auto logw_bwd = gwg_log_weights(grad_star, s_star, bwd);
  const double log_ratio =
      target.potential(s_star) - target.potential(s_t) +
      detail::log_prob_in_ball(logw_bwd, bwd, s_t) -
      detail::log_prob_in_ball(logw_fwd, fwd, s_star);
  const bool acc = detail::accept_draw(log_ratio, rng);
  return StepOutcome{s_star, Vec(), log_ratio, acc,
                     ChainState{acc ? s_star : s_t, Vec()}};
}

// ---------------------------------------------------------------------------
// Norm-constrained informed softmax (no auxiliary variable)

inline ProductCategorical ncg_forward(const TargetModel& target, const Vec& s,
                                      const SamplerParams& params) {
  const Vec c = 0.5 * target.gradient(s) + s / params.delta;
  return informed_weights(c, 0.5 / params.delta, target.lattice());
}

inline StepOutcome ncg_step(const TargetModel& target, const Vec& s_t,
                            const SamplerParams& params, RngStream& rng) {
  params.validate();
  const auto pc_fwd = ncg_forward(target, s_t, params);
  auto [s_star, log_q_fwd] = sample_product(pc_fwd, rng);
  const auto pc_bwd = ncg_forward(target, s_star, params);
  const double log_ratio = target.potential(s_star) - target.potential(s_t) +
                           log_prob_product(pc_bwd, s_t) - log_q_fwd;
  const bool acc = detail::accept_draw(log_ratio, rng);
  return StepOutcome{s_star, Vec(), log_ratio, acc,
                     ChainState{acc ? s_star : s_t, Vec()}};
}

// ---------------------------------------------------------------------------
// Auxiliary-variable Gaussian softmax

inline ProductCategorical avg_forward(const TargetModel& target, const Vec& s,
                                      const Vec& z,
                                      const SamplerParams& params) {
  const double d2 = params.delta * params.delta;
  const Vec c = target.gradient(s) + z / d2;
  return informed_weights(c, 0.5 / d2, target.lattice());
}

// Exact closed-form log ratio given the auxiliary point z and candidate.
inline double avg_log_ratio(const TargetModel& target, const Vec& s_t,
                            const Vec& z, const Vec& s_star,
                            const SamplerParams& params) {
  const double q = 0.5 / (params.delta * params.delta);
  const Vec grad_t = target.gradient(s_t);
  const Vec grad_star = target.gradient(s_star);
  return target.potential(s_star) - target.potential(s_t) +
         grad_star.dot(s_t) - grad_t.dot(s_star) +
         log_normalizer_sums(grad_t, z, q, target.lattice()) -
         log_normalizer_sums(grad_star, z, q, target.lattice());
}

inline StepOutcome avg_step(const TargetModel& target, const Vec& s_t,
                            const SamplerParams& params, RngStream& rng) {
  params.validate();
  const int d = target.lattice().dim();
  Vec z(d);
  for (int i = 0; i < d; ++i) z[i] = s_t[i] + params.delta * rng.normal();
  const auto pc_fwd = avg_forward(target, s_t, z, params);
  auto [s_star, log_q_fwd] = sample_product(pc_fwd, rng);
  (void)log_q_fwd;
  const double log_ratio = avg_log_ratio(target, s_t, z, s_star, params);
  const bool acc = detail::accept_draw(log_ratio, rng);
  return StepOutcome{s_star, Vec(), log_ratio, acc,
                     ChainState{acc ? s_star : s_t, Vec()}};
}

// ---------------------------------------------------------------------------
// Hamiltonian-assisted kernels (shared forward context)

// Forward context after the momentum half-refresh: anchor z = s - delta u',
// softmax reference with c = grad f(s) + z/delta^2, q = 1/(2 delta^2).
struct DhamsForward {
  Vec s;
  Vec u_half;
  Vec z;
  Vec grad;
  double f;
  double q;
  ProductCategorical reference;
};

inline DhamsForward make_dhams_forward(const TargetModel& target, const Vec& s,
                                       const Vec& u_half,
                                       const SamplerParams& params) {
  const double d2 = params.delta * params.delta;
  DhamsForward fwd{s,
                   u_half,
                   s - params.delta * u_half,
                   target.gradient(s),
                   target.potential(s),
                   0.5 / d2,
                   ProductCategorical()};
  fwd.reference =
      informed_weights(fwd.grad + fwd.z / d2, fwd.q, target.lattice());
  return fwd;
}

struct DhamsEval {
  Vec u_star;
  double log_ratio;
};

// Deterministic momentum update shared by both kernels.
inline Vec dhams_momentum_update(const DhamsForward& fwd, const Vec& s_star,
                                 const Vec& grad_star,
                                 const SamplerParams& params) {
  return -fwd.u_half + (fwd.s - s_star) / params.delta +
         params.phi * (grad_star - fwd.grad);
}

// Exact V-DHAMS log acceptance ratio for a given candidate.
inline DhamsEval vdhams_eval(const TargetModel& target,
                             const DhamsForward& fwd, const Vec& s_star,
                             const SamplerParams& params) {
  const Vec grad_star = target.gradient(s_star);
  const Vec u_star = dhams_momentum_update(fwd, s_star, grad_star, params);
  const Vec anchor_bwd = s_star + params.delta * u_star;
  const double log_ratio =
      target.potential(s_star) - fwd.f + grad_star.dot(fwd.s) -
      fwd.grad.dot(s_star) - u_star.squaredNorm() + fwd.u_half.squaredNorm() -
      (s_star - fwd.s).dot(u_star - fwd.u_half) / params.delta +
      log_normalizer_sums(fwd.grad, fwd.z, fwd.q, target.lattice()) -
      log_normalizer_sums(grad_star, anchor_bwd, fwd.q, target.lattice());
  return DhamsEval{u_star, log_ratio};
}

// O-DHAMS log ratio for a given candidate: augmented-density difference plus
// the over-relaxed transition probabilities both ways.  A zero backward (or
// forward) transition probability yields -infinity.
inline DhamsEval odhams_eval(const TargetModel& target,
                             const DhamsForward& fwd, const Vec& s_star,
                             const SamplerParams& params) {
  const auto& lattice = target.lattice();
  const int d = lattice.dim();
  const double d2 = params.delta * params.delta;
  const Vec grad_star = target.gradient(s_star);
  const Vec u_star = dhams_momentum_update(fwd, s_star, grad_star, params);
  const Vec anchor_bwd = s_star + params.delta * u_star;
  const ProductCategorical ref_bwd =
      informed_weights(grad_star + anchor_bwd / d2, fwd.q, lattice);

  double log_fwd = 0.0, log_bwd = 0.0;
  for (int i = 0; i < d; ++i) {
    const int ki = lattice.index_of(fwd.s[i]);
    const int kj = lattice.index_of(s_star[i]);
    const auto cdf_fwd = CdfTable::from_categorical_coord(fwd.reference, i);
    const auto cdf_bwd = CdfTable::from_categorical_coord(ref_bwd, i);
    const double p_fwd = transition_prob(ki, kj, cdf_fwd, params.beta);
    const double p_bwd = transition_prob(kj, ki, cdf_bwd, params.beta);
    if (p_fwd <= 0.0 || p_bwd <= 0.0) {
      return DhamsEval{u_star, -std::numeric_limits<double>::infinity()};
    }
    log_fwd += std::log(p_fwd);
    log_bwd += std::log(p_bwd);
  }
  const double log_ratio = target.potential(s_star) - fwd.f -
                           0.5 * u_star.squaredNorm() +
                           0.5 * fwd.u_half.squaredNorm() + log_bwd - log_fwd;
  return DhamsEval{u_star, log_ratio};
}

namespace detail {

inline Vec refresh_momentum(const Vec& u, double epsilon, RngStream& rng) {
  const double scale = std::sqrt(1.0 - epsilon * epsilon);
  Vec out(u.size());
  for (int i = 0; i < u.size(); ++i)
    out[i] = epsilon * u[i] + scale * rng.normal();
  return out;
}

}  // namespace detail

inline StepOutcome vdhams_step(const TargetModel& target,
                               const ChainState& state,
                               const SamplerParams& params, RngStream& rng) {
  params.validate();
  if (state.u.size() != state.s.size())
    throw ContractError("vdhams_step: momentum length != state length");
  const Vec u_half = detail::refresh_momentum(state.u, params.epsilon, rng);
  const auto fwd = make_dhams_forward(target, state.s, u_half, params);
  auto [s_star, log_q] = sample_product(fwd.reference, rng);
  (void)log_q;
  const auto eval = vdhams_eval(target, fwd, s_star, params);
  const bool acc = detail::accept_draw(eval.log_ratio, rng);
  ChainState next = acc ? ChainState{s_star, eval.u_star}
                        : ChainState{state.s, -u_half};
  return StepOutcome{std::move(s_star), eval.u_star, eval.log_ratio, acc,
                     std::move(next)};
}

inline StepOutcome odhams_step(const TargetModel& target,
                               const ChainState& state,
                               const SamplerParams& params, RngStream& rng) {
  params.validate();
  if (state.u.size() != state.s.size())
    throw ContractError("odhams_step: momentum length != state length");
  const auto& lattice = target.lattice();
  const int d = lattice.dim();
  const Vec u_half = detail::refresh_momentum(state.u, params.epsilon, rng);
  const auto fwd = make_dhams_forward(target, state.s, u_half, params);

  // Underflow guard: over-relaxation conditions on the current level having
  // positive reference probability.  If the softmax has underflowed to zero
  // there, treat the step as an immediate rejection rather than fail.
  for (int i = 0; i < d; ++i) {
    if (fwd.reference.prob(i, lattice.index_of(state.s[i])) <= 0.0) {
      rng.uniform01();  // keep the per-step acceptance draw in the stream
      return StepOutcome{state.s, -u_half,
                         -std::numeric_limits<double>::infinity(), false,
                         ChainState{state.s, -u_half}};
    }
  }

  Vec s_star(d);
  for (int i = 0; i < d; ++i) {
    const auto cdf = CdfTable::from_categorical_coord(fwd.reference, i);
    const auto draw =
        sample_overrelaxed(lattice.index_of(state.s[i]), cdf, params.beta, rng);
    s_star[i] = lattice.value(draw.x1);
  }
  const auto eval = odhams_eval(target, fwd, s_star, params);
  const bool acc = detail::accept_draw(eval.log_ratio, rng);
  ChainState next = acc ? ChainState{s_star, eval.u_star}
                        : ChainState{state.s, -u_half};
  return StepOutcome{std::move(s_star), eval.u_star, eval.log_ratio, acc,
                     std::move(next)};
}

// ---------------------------------------------------------------------------
// Chain runner

inline StepOutcome step_once(SamplerKind kind, const TargetModel& target,
                             const ChainState& state,
                             const SamplerParams& params, RngStream& rng) {
  switch (kind) {
    case SamplerKind::kMetropolis:
      return metropolis_step(target, state.s, params, rng);
    case SamplerKind::kOrdinalGwg:
      return gwg_step(target, state.s, params, rng);
    case SamplerKind::kNcg:
      return ncg_step(target, state.s, params, rng);
    case SamplerKind::kAvg:
      return avg_step(target, state.s, params, rng);
    case SamplerKind::kVDhams:
      return vdhams_step(target, state, params, rng);
    case SamplerKind::kODhams:
      return odhams_step(target, state, params, rng);
  }
  throw ContractError("step_once: unknown SamplerKind");
}

// Collects the kept phase of one chain: states, acceptance flags, potential
// trace, and (optionally) momenta.
class ChainRecorder {
 public:
  ChainRecorder(int dim, long n_keep, bool keep_momenta = false)
      : states_(n_keep, dim),
        momenta_(keep_momenta ? n_keep : 0, keep_momenta ? dim : 0),
        f_trace_(n_keep),
        keep_momenta_(keep_momenta) {
    accepted_.reserve(static_cast<std::size_t>(n_keep));
  }

  void record(const ChainState& st, bool accepted, double f_value) {
    const long row = static_cast<long>(accepted_.size());
    if (row >= states_.rows())
      throw ContractError("ChainRecorder: capacity exceeded");
    states_.row(row) = st.s.transpose();
    if (keep_momenta_) {
      if (st.u.size() != momenta_.cols())
        throw ContractError("ChainRecorder: momentum length mismatch");
      momenta_.row(row) = st.u.transpose();
    }
    f_trace_[row] = f_value;
    accepted_.push_back(accepted ? 1 : 0);
  }

  long size() const { return static_cast<long>(accepted_.size()); }
  const Mat& states() const { return states_; }
  const Mat& momenta() const { return momenta_; }
  const Vec& f_trace() const { return f_trace_; }
  const std::vector<char>& accepted() const { return accepted_; }

  double acceptance_rate() const {
    if (accepted_.empty())
      throw ContractError("ChainRecorder: empty record");
    double acc = 0.0;
    for (char a : accepted_) acc += a;
    return acc / static_cast<double>(accepted_.size());
  }

 private:
  Mat states_;
  Mat momenta_;
  Vec f_trace_;
  std::vector<char> accepted_;
  bool keep_momenta_ = false;
};

// Runs n_burn + n_keep steps of the chosen kernel, recording the kept phase.
// The state starts uniform on the lattice (or at *init) with u ~ N(0, I) for
// momentum kernels; returns the final chain state.
inline ChainState run_chain(SamplerKind kind, const TargetModel& target,
                            const SamplerParams& params, long n_burn,
                            long n_keep, RngStream& rng,
                            ChainRecorder& recorder,
                            const Vec* init = nullptr) {
  params.validate();
  if (n_keep < 1) throw ContractError("run_chain: n_keep must be >= 1");
  if (n_burn < 0) throw ContractError("run_chain: n_burn must be >= 0");
  const auto& lattice = target.lattice();
  ChainState state;
  state.s = init ? *init : lattice.random_state(rng);
  if (init && !lattice.contains(*init))
    throw ContractError("run_chain: init state off the lattice");
  if (uses_momentum(kind)) {
    state.u.resize(lattice.dim());
    for (int i = 0; i < lattice.dim(); ++i) state.u[i] = rng.normal();
  }
  double f_cur = target.potential(state.s);
  for (long t = 0; t < n_burn + n_keep; ++t) {
    StepOutcome out = step_once(kind, target, state, params, rng);
    if (out.accepted) f_cur = target.potential(out.next.s);
    state = std::move(out.next);
    if (t >= n_burn) recorder.record(state, out.accepted, f_cur);
  }
  return state;
}

}  // namespace dhams
