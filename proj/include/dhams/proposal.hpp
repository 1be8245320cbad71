#pragma once

// Per-coordinate "Gaussian-informed" softmax proposals.
//
// All gradient-informed samplers in this library share one proposal kernel:
// coordinate i draws a support value a with probability proportional to
// exp(c_i * a - q * a^2).  With q = 1/(2 delta^2) and c_i = g_i + z_i/delta^2
// this equals exp(g_i * a - (z_i - a)^2 / (2 delta^2)) up to a factor constant
// in a: a discretized Gaussian centered near z_i and tilted by the gradient.
//
// Numerical policy: all normalizations use log-sum-exp with max subtraction;
// per-coordinate CDFs are accumulated with compensated summation and the last
// entry is pinned to exactly 1, so inverse-CDF sampling and the over-relaxation
// interval logic see an exact cover of [0, 1).

#include <cmath>
#include <limits>
#include <vector>

#include "dhams/core.hpp"
#include "dhams/rng.hpp"

namespace dhams {

// Product of d categoricals over the shared support A; immutable once built.
class ProductCategorical {
 public:
  // Rows of `log_weights` are coordinates, columns are support values.
  static ProductCategorical from_log_weights(const LatticeSpec& lattice,
                                             const Mat& log_weights) {
    const int d = lattice.dim();
    const int K = lattice.num_levels();
    if (log_weights.rows() != d || log_weights.cols() != K)
      throw ContractError("ProductCategorical: log-weight matrix shape");
    ProductCategorical pc;
    pc.lattice_ = lattice;
    pc.log_weights_ = log_weights;
    pc.probs_.resize(d, K);
    pc.cdf_.resize(d, K);
    pc.log_norm_.resize(d);
    for (int i = 0; i < d; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k) mx = std::max(mx, log_weights(i, k));
      if (!std::isfinite(mx))
        throw ContractError("ProductCategorical: non-finite log-weights");
      double sum = 0.0;
      for (int k = 0; k < K; ++k) sum += std::exp(log_weights(i, k) - mx);
      pc.log_norm_[i] = mx + std::log(sum);
      for (int k = 0; k < K; ++k)
        pc.probs_(i, k) = std::exp(log_weights(i, k) - pc.log_norm_[i]);
      // Compensated cumulative sum, capped at 1 so rounding overshoot cannot
      // break monotonicity; the last entry is pinned to exactly 1.
      double acc = 0.0, comp = 0.0;
      for (int k = 0; k < K; ++k) {
        const double y = pc.probs_(i, k) - comp;
        const double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        pc.cdf_(i, k) = std::min(t, 1.0);
      }
      pc.cdf_(i, K - 1) = 1.0;
    }
    return pc;
  }

  const LatticeSpec& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  int num_levels() const { return lattice_.num_levels(); }

  double prob(int coord, int level) const { return probs_(coord, level); }
  double log_weight(int coord, int level) const {
    return log_weights_(coord, level);
  }
  double cdf(int coord, int level) const { return cdf_(coord, level); }
  // F(a_k^-) = F(a_{k-1}), with F below the support = 0.
  double cdf_left(int coord, int level) const {
    return level == 0 ? 0.0 : cdf_(coord, level - 1);
  }
  double log_normalizer(int coord) const { return log_norm_[coord]; }
  double log_normalizer_total() const {
    double t = 0.0;
    for (double v : log_norm_) t += v;
    return t;
  }

  double log_prob_level(int coord, int level) const {
    return log_weights_(coord, level) - log_norm_[coord];
  }

  // Smallest level k with w < F(a_k); w in [0, 1).
  int sample_level_from_uniform(int coord, double w) const {
    const int K = lattice_.num_levels();
    int lo = 0, hi = K - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (w < cdf_(coord, mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  int sample_level(int coord, RngStream& rng) const {
    return sample_level_from_uniform(coord, rng.uniform01());
  }

 private:
  LatticeSpec lattice_{1, {0.0, 1.0}};
  Mat log_weights_, probs_, cdf_;
  std::vector<double> log_norm_;
};

// Softmax proposal with per-coordinate log-weights c_i * a - q * a^2.
inline ProductCategorical informed_weights(const Vec& c, double q,
                                           const LatticeSpec& lattice) {
  if (c.size() != lattice.dim())
    throw ContractError("informed_weights: coefficient length != dim");
  if (!c.allFinite())
    throw ContractError("informed_weights: non-finite coefficients");
  if (!(q > 0)) throw ContractError("informed_weights: q must be > 0");
  const int d = lattice.dim();
  const int K = lattice.num_levels();
  Mat lw(d, K);
  for (int k = 0; k < K; ++k) {
    const double a = lattice.value(k);
    const double qa2 = q * a * a;
    for (int i = 0; i < d; ++i) lw(i, k) = c[i] * a - qa2;
  }
  return ProductCategorical::from_log_weights(lattice, lw);
}

// One inverse-CDF draw per coordinate (coordinate order, one uniform each);
// returns the sampled state and its log-probability under the proposal.
inline std::pair<Vec, double> sample_product(const ProductCategorical& pc,
                                             RngStream& rng) {
  const int d = pc.dim();
  Vec s(d);
  double logp = 0.0;
  for (int i = 0; i < d; ++i) {
    const int k = pc.sample_level(i, rng);
    s[i] = pc.lattice().value(k);
    logp += pc.log_prob_level(i, k);
  }
  return {std::move(s), logp};
}

// Sum_i log p_i(s_i); -infinity when any coordinate has zero probability.
inline double log_prob_product(const ProductCategorical& pc, const Vec& s) {
  if (s.size() != pc.dim())
    throw ContractError("log_prob_product: state length != dim");
  double logp = 0.0;
  for (int i = 0; i < pc.dim(); ++i) {
    const double p = pc.prob(i, pc.lattice().index_of(s[i]));
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    logp += pc.log_prob_level(i, pc.lattice().index_of(s[i]));
  }
  return logp;
}

// Sum over coordinates of log sum_{a in A} exp(g_i * a - q * (anchor_i - a)^2):
// the per-coordinate normalizers appearing in the exact acceptance formulas,
// evaluated without materializing a ProductCategorical.
inline double log_normalizer_sums(const Vec& gradient, const Vec& anchor,
                                  double q, const LatticeSpec& lattice) {
  if (gradient.size() != lattice.dim() || anchor.size() != lattice.dim())
    throw ContractError("log_normalizer_sums: vector length != dim");
  if (!(q > 0)) throw ContractError("log_normalizer_sums: q must be > 0");
  const int K = lattice.num_levels();
  double total = 0.0;
  std::vector<double> expo(static_cast<std::size_t>(K));
  for (int i = 0; i < lattice.dim(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const double a = lattice.value(k);
      const double da = anchor[i] - a;
      expo[static_cast<std::size_t>(k)] = gradient[i] * a - q * da * da;
      mx = std::max(mx, expo[static_cast<std::size_t>(k)]);
    }
    double sum = 0.0;
    for (int k = 0; k < K; ++k)
      sum += std::exp(expo[static_cast<std::size_t>(k)] - mx);
    total += mx + std::log(sum);
  }
  return total;
}

}  // namespace dhams
