#pragma once

// Bayesian sparse linear regression over inclusion masks s in {0,1}^d.
//
// Model: y | w, sig2 ~ N(X_s w_s, sig2 I_n) where X_s keeps the selected
// columns; coefficient prior w_s ~ N(0, g sig2 [kappa X_s^T X_s + lambda I]^{-1})
// (a ridge-type g-prior, nonsingular under exact collinearity); inverse-gamma
// prior on sig2 with shape alpha_sigma, rate beta_sigma; exchangeable
// beta-binomial-style prior on the mask through Gamma factors.  Marginalizing
// (w_s, sig2) yields, up to an s-independent constant,
//
//   f(s) = lgamma(|s| + alpha_psi) + lgamma(d - |s| + beta_psi)
//        + 1/2 log det(Xs^T Xs + lambda I)
//        - 1/2 log det((g + kappa) Xs^T Xs + lambda I)
//        - (alpha_sigma + n/2) * log(2 beta_sigma + y^T y - g y^T Xs M^{-1} Xs^T y),
//
// with M = (g + kappa) Xs^T Xs + lambda I over the selected block.
//
// Continuous extension: with Xt = X diag(s) for real s (unselected columns
// scaled rather than dropped), the d x d matrices Xt^T Xt + lambda I are block
// structured at binary s, and the lambda^(d-|s|) factors of the two
// determinants cancel, so the extension agrees with f on the lattice.  The
// extension is what finite-difference gradient checks differentiate.
//
// Gradient.  d f / d Xt has the closed form
//
//   dF = Xt A^{-1} - (g+kappa) Xt T
//      + (alpha_sigma + n/2) * (2g / D) * [y - (g+kappa) Xt T b] (T b)^T,
//
// with A = Xt^T Xt + lambda I, T = [(g+kappa) Xt^T Xt + lambda I]^{-1},
// b = Xt^T y, D the log's argument — note the data term is rank one.  Then
// grad_i f = psi0(|s| + alpha_psi) - psi0(d - |s| + beta_psi)
//          + sum_j dF_{ji} X_{ji}.
// At binary points every unselected column of dF vanishes identically (the
// blocks decouple), so the cheap column-restricted assembly below equals the
// full-matrix gradient on the lattice; both are provided and cross-checked.

#include <Eigen/Cholesky>
#include <boost/math/special_functions/digamma.hpp>

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dhams/core.hpp"
#include "dhams/rng.hpp"

namespace dhams {

struct RegressionHyper {
  double alpha_psi = 0.1;
  double beta_psi = 10.0;
  double alpha_sigma = 0.1;
  double beta_sigma = 0.1;
  double g = 0.0;       // conventionally n
  double kappa = 0.995;
  double lambda = 0.0;  // conventionally (1 - kappa) tr(X^T X) / d

  void validate() const {
    if (!(g > 0)) throw ContractError("RegressionHyper: g must be > 0");
    if (!(kappa > 0 && kappa <= 1))
      throw ContractError("RegressionHyper: kappa must lie in (0, 1]");
    if (!(lambda > 0)) throw ContractError("RegressionHyper: lambda must be > 0");
    if (!(alpha_psi > 0 && beta_psi > 0 && alpha_sigma > 0 && beta_sigma > 0))
      throw ContractError("RegressionHyper: shape/rate parameters must be > 0");
  }
};

// lambda matching the total ridge strength to the design scale:
// lambda = (1 - kappa) tr(X^T X) / d.
inline double calibrate_ridge_lambda(const Mat& X, double kappa) {
  if (!(kappa > 0 && kappa <= 1))
    throw ContractError("calibrate_ridge_lambda: kappa must lie in (0, 1]");
  return (1.0 - kappa) * X.squaredNorm() / static_cast<double>(X.cols());
}

struct RegressionSpec {
  Mat X;
  Vec y;
  RegressionHyper hyper;

  void validate() const {
    if (X.rows() < 1 || X.cols() < 1)
      throw ContractError("RegressionSpec: X must be nonempty");
    if (y.size() != X.rows())
      throw ContractError("RegressionSpec: y length != rows of X");
    if (!X.allFinite() || !y.allFinite())
      throw ContractError("RegressionSpec: non-finite data");
    hyper.validate();
  }
};

class RegressionPosterior {
 public:
  explicit RegressionPosterior(RegressionSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    n_ = static_cast<int>(spec_.X.rows());
    d_ = static_cast<int>(spec_.X.cols());
    XtX_ = spec_.X.transpose() * spec_.X;
    Xty_ = spec_.X.transpose() * spec_.y;
    yty_ = spec_.y.squaredNorm();
  }

  int n() const { return n_; }
  int d() const { return d_; }
  const RegressionSpec& spec() const { return spec_; }

  // f at a binary mask, via the selected-block matrices.
  double potential(const Vec& s) const {
    const auto sel = selected(s);
    const auto ds = static_cast<int>(sel.size());
    const auto& h = spec_.hyper;
    double half_logdet_ratio = 0.0, quad = 0.0;
    if (ds > 0) {
      double logdet_a = 0.0, logdet_m = 0.0;
      if (ds <= n_)
        compact_terms(sel, logdet_a, logdet_m, quad);
      else
        woodbury_terms(sel, logdet_a, logdet_m, quad);
      half_logdet_ratio = 0.5 * (logdet_a - logdet_m);
    }
    const double dd = 2.0 * h.beta_sigma + yty_ - h.g * quad;
    if (!(dd > 0))
      throw ContractError("RegressionPosterior: non-positive residual term");
    return std::lgamma(ds + h.alpha_psi) + std::lgamma(d_ - ds + h.beta_psi) +
           half_logdet_ratio - (h.alpha_sigma + 0.5 * n_) * std::log(dd);
  }

  // Continuous extension via Xt = X diag(s); agrees with potential() at
  // binary points, defined for any real s.
  double potential_continuous(const Vec& s) const {
    if (s.size() != d_)
      throw ContractError("RegressionPosterior: state length != d");
    const auto& h = spec_.hyper;
    const Mat Xt = spec_.X * s.asDiagonal();
    const Mat G = Xt.transpose() * Xt;
    const Mat A = G + h.lambda * Mat::Identity(d_, d_);
    const Mat M = (h.g + h.kappa) * G + h.lambda * Mat::Identity(d_, d_);
    Eigen::LLT<Mat> llt_a(A), llt_m(M);
    if (llt_a.info() != Eigen::Success || llt_m.info() != Eigen::Success)
      throw ContractError("RegressionPosterior: inner matrix not PD");
    const Vec b = Xt.transpose() * spec_.y;
    const double quad = b.dot(llt_m.solve(b));
    const double dd = 2.0 * h.beta_sigma + yty_ - h.g * quad;
    if (!(dd > 0))
      throw ContractError("RegressionPosterior: non-positive residual term");
    const double total = s.sum();
    return std::lgamma(total + h.alpha_psi) +
           std::lgamma(d_ - total + h.beta_psi) +
           0.5 * (logdet_from_llt(llt_a) - logdet_from_llt(llt_m)) -
           (h.alpha_sigma + 0.5 * n_) * std::log(dd);
  }

  // Exact gradient of the continuous extension at any real s.
  Vec gradient_full(const Vec& s) const {
    if (s.size() != d_)
      throw ContractError("RegressionPosterior: state length != d");
    const auto& h = spec_.hyper;
    const Mat Xt = spec_.X * s.asDiagonal();
    const Mat G = Xt.transpose() * Xt;
    const Mat A = G + h.lambda * Mat::Identity(d_, d_);
    const Mat M = (h.g + h.kappa) * G + h.lambda * Mat::Identity(d_, d_);
    Eigen::LLT<Mat> llt_a(A), llt_m(M);
    if (llt_a.info() != Eigen::Success || llt_m.info() != Eigen::Success)
      throw ContractError("RegressionPosterior: inner matrix not PD");
    const Vec b = Xt.transpose() * spec_.y;
    const Vec w = llt_m.solve(b);
    const double dd = 2.0 * h.beta_sigma + yty_ - h.g * b.dot(w);
    const double coef = (h.alpha_sigma + 0.5 * n_) * 2.0 * h.g / dd;
    // dF = Xt A^{-1} - (g+kappa) Xt M^{-1} + coef * [y - (g+kappa) Xt w] w^T
    Mat dF = llt_a.solve(Xt.transpose()).transpose() -
             (h.g + h.kappa) * llt_m.solve(Xt.transpose()).transpose();
    const Vec left = spec_.y - (h.g + h.kappa) * (Xt * w);
    dF.noalias() += coef * left * w.transpose();
    const double total = s.sum();
    const double dig = boost::math::digamma(total + h.alpha_psi) -
                       boost::math::digamma(d_ - total + h.beta_psi);
    return Vec::Constant(d_, dig) +
           dF.cwiseProduct(spec_.X).colwise().sum().transpose();
  }

  // Column-restricted gradient assembly at a binary mask (the production
  // path): only selected columns carry a data term; equals gradient_full on
  // the lattice.
  Vec gradient_column_restricted(const Vec& s) const {
    const auto sel = selected(s);
    const auto ds = static_cast<int>(sel.size());
    const auto& h = spec_.hyper;
    const double dig = boost::math::digamma(ds + h.alpha_psi) -
                       boost::math::digamma(d_ - ds + h.beta_psi);
    Vec grad = Vec::Constant(d_, dig);
    if (ds == 0) return grad;
    Mat Xs(n_, ds), Gs(ds, ds);
    Vec bs(ds);
    gather(sel, Xs, Gs, bs);
    const Mat As = Gs + h.lambda * Mat::Identity(ds, ds);
    const Mat Ms = (h.g + h.kappa) * Gs + h.lambda * Mat::Identity(ds, ds);
    Eigen::LLT<Mat> llt_a(As), llt_m(Ms);
    if (llt_a.info() != Eigen::Success || llt_m.info() != Eigen::Success)
      throw ContractError("RegressionPosterior: inner matrix not PD");
    const Vec w = llt_m.solve(bs);
    const double dd = 2.0 * h.beta_sigma + yty_ - h.g * bs.dot(w);
    const double coef = (h.alpha_sigma + 0.5 * n_) * 2.0 * h.g / dd;
    Mat dF = llt_a.solve(Xs.transpose()).transpose() -
             (h.g + h.kappa) * llt_m.solve(Xs.transpose()).transpose();
    const Vec left = spec_.y - (h.g + h.kappa) * (Xs * w);
    dF.noalias() += coef * left * w.transpose();
    for (int t = 0; t < ds; ++t)
      grad[sel[static_cast<std::size_t>(t)]] +=
          dF.col(t).dot(spec_.X.col(sel[static_cast<std::size_t>(t)]));
    return grad;
  }

 private:
  std::vector<int> selected(const Vec& s) const {
    if (s.size() != d_)
      throw ContractError("RegressionPosterior: state length != d");
    std::vector<int> sel;
    for (int i = 0; i < d_; ++i) {
      if (s[i] == 1.0)
        sel.push_back(i);
      else if (s[i] != 0.0)
        throw ContractError(
            "RegressionPosterior: lattice potential needs a binary mask");
    }
    return sel;
  }

  void gather(const std::vector<int>& sel, Mat& Xs, Mat& Gs, Vec& bs) const {
    const auto ds = static_cast<int>(sel.size());
    for (int t = 0; t < ds; ++t) {
      const int i = sel[static_cast<std::size_t>(t)];
      Xs.col(t) = spec_.X.col(i);
      bs[t] = Xty_[i];
      for (int u = 0; u < ds; ++u)
        Gs(t, u) = XtX_(i, sel[static_cast<std::size_t>(u)]);
    }
  }

  static double logdet_from_llt(const Eigen::LLT<Mat>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  // Selected-block route, O(ds^3): valid whenever ds >= 1.
  void compact_terms(const std::vector<int>& sel, double& logdet_a,
                     double& logdet_m, double& quad) const {
    const auto ds = static_cast<int>(sel.size());
    const auto& h = spec_.hyper;
    Mat Xs(n_, ds), Gs(ds, ds);
    Vec bs(ds);
    gather(sel, Xs, Gs, bs);
    Eigen::LLT<Mat> llt_a(Mat(Gs + h.lambda * Mat::Identity(ds, ds)));
    Eigen::LLT<Mat> llt_m(
        Mat((h.g + h.kappa) * Gs + h.lambda * Mat::Identity(ds, ds)));
    if (llt_a.info() != Eigen::Success || llt_m.info() != Eigen::Success)
      throw ContractError("RegressionPosterior: inner matrix not PD");
    logdet_a = logdet_from_llt(llt_a);
    logdet_m = logdet_from_llt(llt_m);
    quad = bs.dot(llt_m.solve(bs));
  }

  // lambda-shifted identity route over the n x n Gram matrix, for ds > n:
  // det(Xs^T Xs + c I_ds) = c^(ds - n) det(Xs Xs^T + c I_n), and the
  // quadratic form via (Gs + c I)^{-1} = (1/c)[I - Xs^T (Xs Xs^T + c I)^{-1} Xs].
  void woodbury_terms(const std::vector<int>& sel, double& logdet_a,
                      double& logdet_m, double& quad) const {
    const auto ds = static_cast<int>(sel.size());
    const auto& h = spec_.hyper;
    Mat Xs(n_, ds), Gs(ds, ds);
    Vec bs(ds);
    gather(sel, Xs, Gs, bs);
    const Mat gram = Xs * Xs.transpose();
    const double lam_m = h.lambda / (h.g + h.kappa);
    Eigen::LLT<Mat> llt_a(Mat(gram + h.lambda * Mat::Identity(n_, n_)));
    Eigen::LLT<Mat> llt_m(Mat(gram + lam_m * Mat::Identity(n_, n_)));
    if (llt_a.info() != Eigen::Success || llt_m.info() != Eigen::Success)
      throw ContractError("RegressionPosterior: inner matrix not PD");
    logdet_a = (ds - n_) * std::log(h.lambda) + logdet_from_llt(llt_a);
    logdet_m = ds * std::log(h.g + h.kappa) + (ds - n_) * std::log(lam_m) +
               logdet_from_llt(llt_m);
    const Vec c = Xs * bs;
    quad = (bs.squaredNorm() - c.dot(llt_m.solve(c))) / h.lambda;
  }

  RegressionSpec spec_;
  int n_ = 0, d_ = 0;
  Mat XtX_;
  Vec Xty_;
  double yty_ = 0.0;
};

enum class RegressionGradientMode { kColumnRestricted, kFullMatrix };

inline TargetModel regression_posterior(
    const RegressionSpec& spec,
    RegressionGradientMode mode = RegressionGradientMode::kColumnRestricted) {
  auto post = std::make_shared<RegressionPosterior>(spec);
  const int d = post->d();
  return TargetModel(
      "regression_posterior", LatticeSpec::binary(d),
      [post](const Vec& s) -> double { return post->potential(s); },
      [post, mode](const Vec& s) -> Vec {
        return mode == RegressionGradientMode::kColumnRestricted
                   ? post->gradient_column_restricted(s)
                   : post->gradient_full(s);
      });
}

// Synthetic response depending on a single signal column, with that column
// duplicated elsewhere in the design: y_j = x_{j,signal} + noise, and column
// `duplicate_col` of the returned design is overwritten by the signal column.
// Column indices are 0-based.
inline std::pair<Mat, Vec> synth_sparse_response(const Mat& X, int signal_col,
                                                 int duplicate_col,
                                                 double noise_sd,
                                                 RngStream& rng) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  if (signal_col < 0 || signal_col >= d || duplicate_col < 0 ||
      duplicate_col >= d || signal_col == duplicate_col)
    throw ContractError("synth_sparse_response: bad column indices");
  if (!(noise_sd >= 0))
    throw ContractError("synth_sparse_response: noise_sd must be >= 0");
  Mat Xp = X;
  Xp.col(duplicate_col) = Xp.col(signal_col);
  Vec y(n);
  for (int j = 0; j < n; ++j)
    y[j] = Xp(j, signal_col) + noise_sd * rng.normal();
  return {std::move(Xp), std::move(y)};
}

// Genotype-style design with iid entries drawn uniformly from `levels`.
inline Mat synth_design_matrix(int n, int d, const std::vector<double>& levels,
                               RngStream& rng) {
  if (n < 1 || d < 1 || levels.empty())
    throw ContractError("synth_design_matrix: bad shape or empty levels");
  Mat X(n, d);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) X(j, i) = levels[rng.uniform_below(levels.size())];
  return X;
}

// Dense numeric CSV loader; optional header row is auto-detected.  Errors
// carry 1-based line numbers.
inline Mat load_design_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("load_design_matrix: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() &&
               (cell[used] == ' ' || cell[used] == '\r' || cell[used] == '\t'))
          ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_content_line) {  // header row
        first_content_line = false;
        continue;
      }
      throw ContractError("load_design_matrix: non-numeric cell at line " +
                          std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ContractError("load_design_matrix: ragged row at line " +
                          std::to_string(line_no));
    first_content_line = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw ContractError("load_design_matrix: no data rows in " + path);
  Mat X(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < rows[j].size(); ++i)
      X(static_cast<int>(j), static_cast<int>(i)) = rows[j][i];
  return X;
}

}  // namespace dhams
