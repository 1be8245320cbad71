#pragma once

// Quadratic-mixture potential
//
//   f(s) = log sum_m exp(-1/2 (s - mu_m)^T Sigma_m^{-1} (s - mu_m)),
//
// a multi-modal lattice target.  The gradient follows from softmax
// responsibilities r_m(s) over the component exponents:
//
//   grad f(s) = sum_m r_m(s) * Sigma_m^{-1} (mu_m - s).

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "dhams/core.hpp"

namespace dhams {

struct MixtureSpec {
  LatticeSpec lattice = LatticeSpec::binary(1);  // placeholder; set per model
  std::vector<Vec> means;
  std::vector<Mat> covariances;

  void validate() const {
    if (means.empty() || means.size() != covariances.size())
      throw ContractError("MixtureSpec: need M >= 1 means with covariances");
    for (std::size_t m = 0; m < means.size(); ++m) {
      if (means[m].size() != lattice.dim())
        throw ContractError("MixtureSpec: mean length != dim");
      if (covariances[m].rows() != lattice.dim() ||
          covariances[m].cols() != lattice.dim())
        throw ContractError("MixtureSpec: covariance shape != dim x dim");
    }
  }
};

inline TargetModel quadratic_mixture(const MixtureSpec& spec) {
  spec.validate();
  const int d = spec.lattice.dim();
  const auto M = spec.means.size();

  auto precisions = std::make_shared<std::vector<Mat>>();
  precisions->reserve(M);
  for (const Mat& cov : spec.covariances) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
      throw ContractError("MixtureSpec: covariance not positive definite");
    precisions->push_back(llt.solve(Mat::Identity(d, d)));
  }
  auto means = std::make_shared<std::vector<Vec>>(spec.means);

  // Component permutation symmetry holds when every mean is a constant
  // vector and every covariance is a + b * 11^T on the diagonal/off-diagonal.
  bool symmetric = true;
  for (const Vec& mu : spec.means)
    if ((mu.array() != mu[0]).any()) symmetric = false;
  for (const Mat& cov : spec.covariances) {
    for (int i = 0; i < d && symmetric; ++i)
      for (int j = 0; j < d; ++j) {
        const double want = (i == j) ? cov(0, 0) : (d > 1 ? cov(0, 1) : 0.0);
        if (i != j && cov(i, j) != want) symmetric = false;
        if (i == j && cov(i, i) != want) symmetric = false;
      }
    if (d == 1) continue;
  }

  auto exponents = [precisions, means](const Vec& s) -> std::vector<double> {
    std::vector<double> e(means->size());
    for (std::size_t m = 0; m < means->size(); ++m) {
      const Vec r = s - (*means)[m];
      e[m] = -0.5 * r.dot((*precisions)[m] * r);
    }
    return e;
  };

  return TargetModel(
      "quadratic_mixture", spec.lattice,
      [exponents](const Vec& s) -> double {
        const auto e = exponents(s);
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : e) mx = std::max(mx, v);
        double sum = 0.0;
        for (double v : e) sum += std::exp(v - mx);
        return mx + std::log(sum);
      },
      [exponents, precisions, means](const Vec& s) -> Vec {
        const auto e = exponents(s);
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : e) mx = std::max(mx, v);
        double denom = 0.0;
        for (double v : e) denom += std::exp(v - mx);
        Vec g = Vec::Zero(s.size());
        for (std::size_t m = 0; m < means->size(); ++m) {
          const double resp = std::exp(e[m] - mx) / denom;
          g += resp * ((*precisions)[m] * ((*means)[m] - s));
        }
        return g;
      },
      symmetric);
}

// Product-form linear potential f(s) = a^T s (uniform target when a = 0).
// Rejection-free reference case for AVG and the DHAMS samplers.
inline TargetModel linear_product(const Vec& a, const LatticeSpec& lattice) {
  if (a.size() != lattice.dim())
    throw ContractError("linear_product: coefficient length != dim");
  if (!a.allFinite()) throw ContractError("linear_product: non-finite a");
  Vec coef = a;
  return TargetModel(
      "linear_product", lattice,
      [coef](const Vec& s) -> double { return coef.dot(s); },
      [coef](const Vec& s) -> Vec {
        (void)s;
        return coef;
      },
      (a.array() == a[0]).all());
}

}  // namespace dhams
