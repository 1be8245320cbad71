#pragma once

// Discrete Gaussian on the integer window {-k, ..., k}^d with equi-correlated
// covariance Sigma = sigma^2 * [rho * 11^T + (1 - rho) * I]:
//
//   f(s) = -1/2 s^T Sigma^{-1} s,      grad f(s) = -Sigma^{-1} s,
//
// with Sigma^{-1} in closed Sherman-Morrison form
//   Sigma^{-1} = 1/(sigma^2 (1-rho)) * [I - rho/(1 + (d-1) rho) * 11^T].

#include <cmath>

#include "dhams/core.hpp"

namespace dhams {

struct EquiCorrGaussianSpec {
  int d = 2;
  int k = 2;  // support {-k, ..., k}
  double sigma = 1.0;
  double rho = 0.0;

  void validate() const {
    if (d < 1) throw ContractError("EquiCorrGaussianSpec: d must be >= 1");
    if (k < 1) throw ContractError("EquiCorrGaussianSpec: k must be >= 1");
    if (!(sigma > 0)) throw ContractError("EquiCorrGaussianSpec: sigma > 0");
    // Positive definiteness: eigenvalues sigma^2(1-rho) (d-1 fold) and
    // sigma^2(1 + (d-1) rho).
    if (!(rho < 1) || (d > 1 && !(rho > -1.0 / (d - 1))))
      throw ContractError(
          "EquiCorrGaussianSpec: rho must lie in (-1/(d-1), 1)");
  }

  Mat covariance() const {
    validate();
    Mat sig = Mat::Constant(d, d, sigma * sigma * rho);
    sig.diagonal().setConstant(sigma * sigma);
    return sig;
  }

  Mat precision() const {
    validate();
    const double scale = 1.0 / (sigma * sigma * (1.0 - rho));
    const double shave = rho / (1.0 + (d - 1) * rho);
    Mat prec = Mat::Constant(d, d, -scale * shave);
    prec.diagonal().setConstant(scale * (1.0 - shave));
    return prec;
  }
};

inline TargetModel discrete_gaussian(const EquiCorrGaussianSpec& spec) {
  spec.validate();
  const double scale = 1.0 / (spec.sigma * spec.sigma * (1.0 - spec.rho));
  const double shave = spec.rho / (1.0 + (spec.d - 1) * spec.rho);
  auto precision_times = [scale, shave](const Vec& s) -> Vec {
    return scale * (s.array() - shave * s.sum()).matrix();
  };
  return TargetModel(
      "discrete_gaussian", LatticeSpec::integer_window(spec.d, spec.k),
      [precision_times](const Vec& s) -> double {
        return -0.5 * s.dot(precision_times(s));
      },
      [precision_times](const Vec& s) -> Vec { return -precision_times(s); },
      /*permutation_symmetric=*/true);
}

}  // namespace dhams
