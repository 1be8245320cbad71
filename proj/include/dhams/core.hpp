#pragma once

// Core domain types: the lattice, the target-distribution contract, the
// augmented (state, momentum) chain state, sampler parameters, and state
// enumeration.  Everything here is an immutable value type safe to share
// read-only across threads.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dhams/rng.hpp"

namespace dhams {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Violated precondition or type invariant (programming/config error).
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// State-space enumeration refused because K^d exceeds the configured cap.
struct EnumerationCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// ---------------------------------------------------------------------------
// LatticeSpec: S = A^d with A = {a_1 < a_2 < ... < a_K} shared by all
// coordinates.
// ---------------------------------------------------------------------------
class LatticeSpec {
 public:
  LatticeSpec(int dim, std::vector<double> support)
      : dim_(dim), support_(std::move(support)) {
    if (dim_ < 1) throw ContractError("LatticeSpec: dim must be >= 1");
    if (support_.size() < 2)
      throw ContractError("LatticeSpec: support needs at least 2 values");
    for (std::size_t k = 1; k < support_.size(); ++k)
      if (!(support_[k - 1] < support_[k]))
        throw ContractError("LatticeSpec: support must be strictly increasing");
  }

  // Integer window {-k, ..., k}.
  static LatticeSpec integer_window(int dim, int k) {
    if (k < 1) throw ContractError("LatticeSpec: k must be >= 1");
    std::vector<double> a;
    for (int v = -k; v <= k; ++v) a.push_back(static_cast<double>(v));
    return LatticeSpec(dim, std::move(a));
  }

  static LatticeSpec binary(int dim) { return LatticeSpec(dim, {0.0, 1.0}); }

  int dim() const { return dim_; }
  int num_levels() const { return static_cast<int>(support_.size()); }
  const std::vector<double>& support() const { return support_; }
  double value(int k) const { return support_[static_cast<std::size_t>(k)]; }
  double min_value() const { return support_.front(); }
  double max_value() const { return support_.back(); }

  bool is_binary01() const {
    return support_.size() == 2 && support_[0] == 0.0 && support_[1] == 1.0;
  }

  // Index of a support value; states are built from support values, so exact
  // comparison is the intended match (nearest value resolves rounding).
  int index_of(double v) const {
    int best = 0;
    double best_gap = std::abs(support_[0] - v);
    for (std::size_t k = 1; k < support_.size(); ++k) {
      const double gap = std::abs(support_[k] - v);
      if (gap < best_gap) {
        best_gap = gap;
        best = static_cast<int>(k);
      }
    }
    if (best_gap > 1e-9)
      throw ContractError("LatticeSpec: value not on the support");
    return best;
  }

  bool contains(const Vec& s) const {
    if (s.size() != dim_) return false;
    for (int i = 0; i < dim_; ++i) {
      bool hit = false;
      for (double a : support_)
        if (s[i] == a) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  }

  // K^d with overflow detection; throws EnumerationCapExceeded above `cap`.
  std::uint64_t num_states_checked(std::uint64_t cap) const {
    std::uint64_t n = 1;
    const auto k = static_cast<std::uint64_t>(num_levels());
    for (int i = 0; i < dim_; ++i) {
      if (n > cap / k)
        throw EnumerationCapExceeded(
            "state count " + std::to_string(num_levels()) + "^" +
            std::to_string(dim_) + " exceeds enumeration cap " +
            std::to_string(cap));
      n *= k;
    }
    if (n > cap)
      throw EnumerationCapExceeded("state count " + std::to_string(n) +
                                   " exceeds enumeration cap " +
                                   std::to_string(cap));
    return n;
  }

  // Uniform random lattice point (default chain initialization).
  Vec random_state(RngStream& rng) const {
    Vec s(dim_);
    for (int i = 0; i < dim_; ++i)
      s[i] = support_[rng.uniform_below(support_.size())];
    return s;
  }

 private:
  int dim_;
  std::vector<double> support_;
};

// Lexicographic enumeration (last coordinate varies fastest): the flat index
// of a state is sum_i index(s_i) * K^(d-1-i).
inline std::uint64_t state_flat_index(const LatticeSpec& lattice, const Vec& s) {
  std::uint64_t idx = 0;
  for (int i = 0; i < lattice.dim(); ++i)
    idx = idx * static_cast<std::uint64_t>(lattice.num_levels()) +
          static_cast<std::uint64_t>(lattice.index_of(s[i]));
  return idx;
}

inline Vec state_from_flat_index(const LatticeSpec& lattice,
                                 std::uint64_t idx) {
  Vec s(lattice.dim());
  const auto k = static_cast<std::uint64_t>(lattice.num_levels());
  for (int i = lattice.dim() - 1; i >= 0; --i) {
    s[i] = lattice.value(static_cast<int>(idx % k));
    idx /= k;
  }
  return s;
}

// Visit all K^d states in lexicographic support order.  Refuses (by throwing
// EnumerationCapExceeded) when K^d exceeds `cap`.
template <typename Fn>
void for_each_state(const LatticeSpec& lattice, std::uint64_t cap, Fn&& fn) {
  const std::uint64_t n = lattice.num_states_checked(cap);
  std::vector<int> idx(static_cast<std::size_t>(lattice.dim()), 0);
  Vec s(lattice.dim());
  for (int i = 0; i < lattice.dim(); ++i) s[i] = lattice.value(0);
  for (std::uint64_t count = 0;; ++count) {
    fn(static_cast<const Vec&>(s));
    // Odometer increment, last coordinate fastest.
    int i = lattice.dim() - 1;
    for (; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < lattice.num_levels()) {
        s[i] = lattice.value(idx[static_cast<std::size_t>(i)]);
        break;
      }
      idx[static_cast<std::size_t>(i)] = 0;
      s[i] = lattice.value(0);
    }
    if (i < 0) {
      if (count + 1 != n)
        throw ContractError("for_each_state: enumeration count mismatch");
      return;
    }
  }
}

inline std::vector<Vec> enumerate_states(
    const LatticeSpec& lattice, std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(lattice.num_states_checked(cap)));
  for_each_state(lattice, cap, [&](const Vec& s) { out.push_back(s); });
  return out;
}

// ---------------------------------------------------------------------------
// TargetModel: negative potential f(s) with pi(s) ∝ exp(f(s)), plus the
// gradient of f's differentiable extension evaluated at lattice points.
// ---------------------------------------------------------------------------
class TargetModel {
 public:
  using PotentialFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;

  TargetModel(std::string name, LatticeSpec lattice, PotentialFn potential,
              GradientFn gradient, bool permutation_symmetric = false)
      : name_(std::move(name)),
        lattice_(std::move(lattice)),
        potential_(std::move(potential)),
        gradient_(std::move(gradient)),
        permutation_symmetric_(permutation_symmetric) {}

  const std::string& name() const { return name_; }
  const LatticeSpec& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }

  // Declared coordinate-permutation symmetry; lets diagnostics average TV
  // over a representative subset of coordinate pairs.
  bool permutation_symmetric() const { return permutation_symmetric_; }

  double potential(const Vec& s) const {
    check_dim(s);
    return potential_(s);
  }

  Vec gradient(const Vec& s) const {
    check_dim(s);
    Vec g = gradient_(s);
    if (g.size() != lattice_.dim())
      throw ContractError("TargetModel: gradient length != dim");
    return g;
  }

 private:
  void check_dim(const Vec& s) const {
    if (s.size() != lattice_.dim())
      throw ContractError("TargetModel '" + name_ + "': state has length " +
                          std::to_string(s.size()) + ", lattice dim is " +
                          std::to_string(lattice_.dim()));
  }

  std::string name_;
  LatticeSpec lattice_;
  PotentialFn potential_;
  GradientFn gradient_;
  bool permutation_symmetric_ = false;
};

// ---------------------------------------------------------------------------
// ChainState and sampler parameters.
// ---------------------------------------------------------------------------
struct ChainState {
  Vec s;  // lattice point
  Vec u;  // momentum, N(0, I) at stationarity
};

struct SamplerParams {
  double delta = 1.0;    // step size (NCG, AVG, DHAMS)
  double epsilon = 0.0;  // momentum auto-regression, in [0, 1)
  double phi = 0.0;      // gradient-correction weight, >= 0
  double beta = 1.0;     // over-relaxation parameter, in [-1, 1]
  int window_r = 1;      // L-infinity window radius (Metropolis, GWG)
  // Hamming radius of the GWG candidate set; only 1 is supported.
  static constexpr int hamming_radius = 1;

  void validate() const {
    if (!(delta > 0)) throw ContractError("SamplerParams: delta must be > 0");
    if (!(epsilon >= 0 && epsilon < 1))
      throw ContractError("SamplerParams: epsilon must be in [0, 1)");
    if (!(phi >= 0)) throw ContractError("SamplerParams: phi must be >= 0");
    if (!(beta >= -1 && beta <= 1))
      throw ContractError("SamplerParams: beta must be in [-1, 1]");
    if (window_r < 1)
      throw ContractError("SamplerParams: window_r must be >= 1");
  }
};

// log of the augmented density pi(s, u) ∝ exp(f(s) - ||u||^2 / 2).
inline double augmented_log_density(const TargetModel& target,
                                    const ChainState& state) {
  if (state.u.size() != target.dim())
    throw ContractError("augmented_log_density: momentum length != dim");
  return target.potential(state.s) - 0.5 * state.u.squaredNorm();
}

}  // namespace dhams
