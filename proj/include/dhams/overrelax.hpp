#pragma once

// Discrete over-relaxation against a categorical reference distribution.
//
// Latent-uniform representation: a draw x from a categorical with CDF F is
// identified with a latent w uniform on the cell [F(x-), F(x)).  One
// over-relaxed update from x0 is
//
//     w0 ~ Unif[F(x0-), F(x0)),   wt ~ Unif[0, 1),
//     w1 = (-w0 + beta * wt) mod 1,          beta in [-1, 1],
//     x1 = the value whose cell contains w1.
//
// With w0 ~ Unif[0,1) marginally, w1 is again Unif[0,1) (adding an
// independent offset modulo 1 preserves the uniform law), so the update
// leaves the reference distribution invariant.  The joint law of (w0, w1) is
// symmetric, giving detailed balance.  beta = +/-1 makes x1 independent of
// x0; beta = 0 is the deterministic reflection w1 = 1 - w0, the maximally
// anti-correlated coupling.
//
// Exact transition probabilities.  p(x1 = j | x0 = i) is the measure of a
// band {w0 + v in band} in the rectangle [F(i-), F(i)) x [0, |beta|) of the
// latent pair (w0, v = |beta| * wt), divided by p_i * |beta|.  Band measures
// reduce by inclusion-exclusion to corner-triangle areas
//
//     T(t) = max(t, 0)^2 / 2,
//     H(c) = T(c - (il+jl)) - T(c - (ir+jl)) - T(c - (il+jr)) + T(c - (ir+jr)),
//
// where [il, ir) and [jl, jr) are the latent cells of i and j.  Writing the
// wrap-around of the modulo as a union of at most two bands gives, for
// beta > 0,
//     p(j | i) = [H(beta) + H(1 + beta) - H(1)] / (p_i * beta),
// for beta < 0,
//     p(j | i) = [H(1) - H(1 + beta) + H(2) - H(2 + beta)] / (p_i * |beta|),
// and for beta = 0 the removable limit
//     p(j | i) = |[il, ir) ∩ (1 - jr, 1 - jl]| / p_i.
//
// H is symmetric in (i <-> j) term by term, so p_i * p(j|i) = p_j * p(i|j)
// holds *bitwise* in floating point: detailed balance is exact by
// construction, not by cancellation.  At beta = +/-1 the bands cover the
// whole rectangle and H collapses to p_i * p_j, recovering independence.
// The test suite checks every formula against a Monte-Carlo simulation of
// the latent update, which is the authoritative semantics.
//
// A variant w1 = (w0 + beta * wt) mod 1 would also preserve uniformity but
// does not satisfy detailed balance; it is intentionally not implemented.

#include <cmath>
#include <vector>

#include "dhams/core.hpp"
#include "dhams/proposal.hpp"
#include "dhams/rng.hpp"

namespace dhams {

// Categorical reference with exact cumulative table; F_0 = 0 and F_K = 1.
class CdfTable {
 public:
  static CdfTable from_probs(std::vector<double> values,
                             std::vector<double> probs) {
    if (values.size() != probs.size() || probs.empty())
      throw ContractError("CdfTable: values/probs size mismatch");
    CdfTable t;
    t.values_ = std::move(values);
    t.probs_ = std::move(probs);
    double acc = 0.0, comp = 0.0;
    t.cdf_.resize(t.probs_.size());
    for (std::size_t k = 0; k < t.probs_.size(); ++k) {
      if (t.probs_[k] < 0) throw ContractError("CdfTable: negative probability");
      const double y = t.probs_[k] - comp;
      const double s = acc + y;
      comp = (s - acc) - y;
      acc = s;
      t.cdf_[k] = s;
    }
    if (std::abs(t.cdf_.back() - 1.0) > 1e-8)
      throw ContractError("CdfTable: probabilities do not sum to 1");
    t.cdf_.back() = 1.0;
    return t;
  }

  // View of coordinate `coord` of a product proposal.
  static CdfTable from_categorical_coord(const ProductCategorical& pc,
                                         int coord) {
    const int K = pc.num_levels();
    CdfTable t;
    t.values_.resize(static_cast<std::size_t>(K));
    t.probs_.resize(static_cast<std::size_t>(K));
    t.cdf_.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      t.values_[static_cast<std::size_t>(k)] = pc.lattice().value(k);
      t.probs_[static_cast<std::size_t>(k)] = pc.prob(coord, k);
      t.cdf_[static_cast<std::size_t>(k)] = pc.cdf(coord, k);
    }
    t.cdf_.back() = 1.0;
    return t;
  }

  int size() const { return static_cast<int>(probs_.size()); }
  double value(int k) const { return values_[static_cast<std::size_t>(k)]; }
  double prob(int k) const { return probs_[static_cast<std::size_t>(k)]; }
  double cdf(int k) const { return cdf_[static_cast<std::size_t>(k)]; }
  double cdf_left(int k) const {
    return k == 0 ? 0.0 : cdf_[static_cast<std::size_t>(k - 1)];
  }

  // Smallest k with w < F_k (w in [0, 1)); zero-probability cells are never
  // selected because their half-open latent interval is empty.
  int cell_of(double w) const {
    int lo = 0, hi = size() - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (w < cdf_[static_cast<std::size_t>(mid)])
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  std::vector<double> values_, probs_, cdf_;
};

// w1 = (-w0 + beta * wt) mod 1, mapped into [0, 1).
inline double latent_step(double w0, double wt, double beta) {
  if (!(w0 >= 0 && w0 < 1) || !(wt >= 0 && wt < 1))
    throw ContractError("latent_step: latent uniforms must lie in [0, 1)");
  if (!(beta >= -1 && beta <= 1))
    throw ContractError("latent_step: beta must lie in [-1, 1]");
  double w1 = std::fmod(-w0 + beta * wt, 1.0);
  if (w1 < 0) w1 += 1.0;
  if (w1 >= 1.0) w1 = 0.0;  // rounding of (negative tiny) + 1
  return w1;
}

struct OverrelaxDraw {
  int x1 = 0;
  double w0 = 0.0;  // latent position of x0 (returned for introspection)
  double w1 = 0.0;  // latent position of x1
};

// One over-relaxed draw from the cell of x0; requires p(x0) > 0.
inline OverrelaxDraw sample_overrelaxed(int x0_index, const CdfTable& cdf,
                                        double beta, RngStream& rng) {
  if (x0_index < 0 || x0_index >= cdf.size())
    throw ContractError("sample_overrelaxed: index out of range");
  if (!(cdf.prob(x0_index) > 0))
    throw ContractError("sample_overrelaxed: current value has probability 0");
  OverrelaxDraw d;
  d.w0 = cdf.cdf_left(x0_index) + cdf.prob(x0_index) * rng.uniform01();
  if (d.w0 >= 1.0) d.w0 = std::nextafter(1.0, 0.0);  // rounding at the top cell
  d.w1 = latent_step(d.w0, rng.uniform01(), beta);
  d.x1 = cdf.cell_of(d.w1);
  return d;
}

namespace detail {

// Corner-triangle area: measure of {x + y < c} in the quadrant x,y >= 0.
inline double tri(double t) { return t > 0 ? 0.5 * t * t : 0.0; }

// H(c) of the header comment; arguments grouped as c - (a + b) so that the
// expression - and hence detailed balance - is bitwise symmetric in i <-> j.
inline double corner_band(double c, double il, double ir, double jl,
                          double jr) {
  return tri(c - (il + jl)) - tri(c - (ir + jl)) - tri(c - (il + jr)) +
         tri(c - (ir + jr));
}

}  // namespace detail

// p_i * p(x1 = j | x0 = i): the joint coupling measure.  Symmetric in (i, j)
// bitwise; see header comment for the derivation.
inline double coupling_measure(int i, int j, const CdfTable& cdf, double beta) {
  const double il = cdf.cdf_left(i), ir = cdf.cdf(i);
  const double jl = cdf.cdf_left(j), jr = cdf.cdf(j);
  double m;
  if (beta > 0) {
    m = (detail::corner_band(beta, il, ir, jl, jr) +
         detail::corner_band(1 + beta, il, ir, jl, jr) -
         detail::corner_band(1, il, ir, jl, jr)) /
        beta;
  } else if (beta < 0) {
    m = (detail::corner_band(1, il, ir, jl, jr) -
         detail::corner_band(1 + beta, il, ir, jl, jr) +
         detail::corner_band(2, il, ir, jl, jr) -
         detail::corner_band(2 + beta, il, ir, jl, jr)) /
        (-beta);
  } else {
    // Deterministic reflection w1 = 1 - w0: overlap of the reflected cell of
    // j with the cell of i.  (1 - jr, 1 - jl] and [il, ir) differ from closed
    // intervals by measure zero.
    const double lo = std::max(il, 1.0 - jr);
    const double hi = std::min(ir, 1.0 - jl);
    m = hi - lo;
  }
  return m > 0 ? m : 0.0;
}

// Exact p(x1 = j | x0 = i) of the over-relaxed update; O(1) per entry.
inline double transition_prob(int i, int j, const CdfTable& cdf, double beta) {
  if (!(beta >= -1 && beta <= 1))
    throw ContractError("transition_prob: beta must lie in [-1, 1]");
  if (i < 0 || i >= cdf.size() || j < 0 || j >= cdf.size())
    throw ContractError("transition_prob: index out of range");
  const double pi = cdf.prob(i);
  if (!(pi > 0)) throw ContractError("transition_prob: p(i) = 0");
  const double p = coupling_measure(i, j, cdf, beta) / pi;
  return p < 1.0 ? p : 1.0;
}

// Sample correlation of the latent pair (w0, w1) with w0 ~ Unif[0, 1).
inline double correlation_at_beta(double beta, long n_samples,
                                  RngStream& rng) {
  if (n_samples < 10'000)
    throw ContractError("correlation_at_beta: need at least 10^4 samples");
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (long t = 0; t < n_samples; ++t) {
    const double w0 = rng.uniform01();
    const double w1 = latent_step(w0, rng.uniform01(), beta);
    sx += w0;
    sy += w1;
    sxx += w0 * w0;
    syy += w1 * w1;
    sxy += w0 * w1;
  }
  const double n = static_cast<double>(n_samples);
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

// Same correlation along a chain over an explicit reference table: w0 is
// drawn Unif[0, 1) (hence x0 ~ p, stationary) and one update is applied.
inline double correlation_at_beta(const CdfTable& cdf, double beta,
                                  long n_samples, RngStream& rng) {
  if (n_samples < 10'000)
    throw ContractError("correlation_at_beta: need at least 10^4 samples");
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (long t = 0; t < n_samples; ++t) {
    const double w0 = rng.uniform01();
    const double w1 = latent_step(w0, rng.uniform01(), beta);
    (void)cdf.cell_of(w1);
    sx += w0;
    sy += w1;
    sxx += w0 * w0;
    syy += w1 * w1;
    sxy += w0 * w1;
  }
  const double n = static_cast<double>(n_samples);
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

}  // namespace dhams
