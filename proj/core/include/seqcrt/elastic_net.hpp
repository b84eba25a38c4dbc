#pragma once

#include "seqcrt/types.hpp"

#include <span>
#include <vector>

namespace seqcrt {

struct SolverOptions {
  /// Target bound on the KKT violation (gradient units).
  double tol = 1e-8;
  int max_sweeps = 100000;
};

struct PenalizedFit {
  Vector beta;
  double intercept = 0.0;  // logistic fits only; squared-loss fits have none
  double kkt_violation = 0.0;
  int sweeps = 0;
};

/// Minimizes (1/2n)||y - X b||^2 + lambda ||b||_1 + (ridge_eps/2) ||b||^2 by
/// cyclic coordinate descent. No intercept; center the data first if one is
/// wanted. Throws ConvergenceError when max_sweeps runs out.
PenalizedFit elastic_net_fit(const Matrix& x, const Vector& y, double lambda, double ridge_eps,
                             const SolverOptions& opts = {});

/// Minimizes (1/n) sum[log(1 + e^eta_i) - y_i eta_i] + lambda ||b||_1 + (ridge_eps/2) ||b||^2
/// with eta = b0 + X b and an unpenalized intercept b0. Proximal Newton outer
/// loop with coordinate descent on the weighted least-squares subproblem.
PenalizedFit logistic_net_fit(const Matrix& x, const Vector& y, double lambda, double ridge_eps,
                              const SolverOptions& opts = {});

/// Warm-started solver for a decreasing sequence of penalties on one design.
/// Squared loss on pre-centered data; the design must outlive the object.
class ElasticNetPath {
 public:
  ElasticNetPath(const Matrix& x, const Vector& y, double ridge_eps);
  /// Per-column ridge weights.
  ElasticNetPath(const Matrix& x, const Vector& y, const Vector& ridge);

  /// Solves at `lambda`, starting from the current coefficients.
  void solve(double lambda, double tol, int max_sweeps = 100000);

  const Vector& beta() const { return beta_; }
  const Vector& residual() const { return residual_; }
  double kkt_violation(double lambda) const;
  int sweeps() const { return sweeps_; }

 private:
  double sweep(const std::vector<Index>& set, double lambda);
  double gradient(Index j) const;

  const Matrix& x_;
  Vector ridge_;
  double inv_n_;
  Vector curvature_;  // ||x_j||^2 / n + ridge_j
  Vector beta_;
  Vector residual_;
  std::vector<char> in_active_;
  std::vector<Index> active_;
  double last_lambda_ = -1.0;
  int sweeps_ = 0;
};

/// Warm-started logistic counterpart of ElasticNetPath (uncentered data, free intercept).
class LogisticNetPath {
 public:
  LogisticNetPath(const Matrix& x, const Vector& y, double ridge_eps);
  LogisticNetPath(const Matrix& x, const Vector& y, const Vector& ridge);

  void solve(double lambda, double tol, int max_sweeps = 100000);

  const Vector& beta() const { return beta_; }
  double intercept() const { return intercept_; }
  double kkt_violation(double lambda) const;
  int sweeps() const { return sweeps_; }
  /// Mean negative log-likelihood of (x_new, y_new) under the current fit.
  double mean_deviance(const Matrix& x_new, const Vector& y_new) const;

 private:
  double objective(double lambda, const Vector& eta) const;

  const Matrix& x_;
  const Vector& y_;
  Vector ridge_;
  Vector beta_;
  double intercept_ = 0.0;
  int sweeps_ = 0;
};

/// Largest useful penalty max_j |x_j^T (y - mean(y))| / n, computed on centered columns.
double lambda_max(const Matrix& x, const Vector& y);

/// `count` log-spaced penalties from `top` down to ratio * top.
std::vector<double> log_lambda_grid(double top, int count, double ratio);

}  // namespace seqcrt
