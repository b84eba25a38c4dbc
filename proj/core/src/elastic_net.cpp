#include "seqcrt/elastic_net.hpp"

#include <algorithm>
#include <cmath>

namespace seqcrt {

namespace {

inline double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

inline double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

inline double log1p_exp(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

inline double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  double e = std::exp(eta);
  return e / (1.0 + e);
}

double stationarity_gap(double grad, double beta, double lambda, double ridge_eps) {
  if (beta != 0.0) return std::abs(grad - ridge_eps * beta - lambda * sign(beta));
  return std::max(0.0, std::abs(grad) - lambda);
}

void check_ridge(const Vector& ridge, Index p) {
  if (ridge.size() != p) throw DomainError("one ridge weight per column is required");
  if ((ridge.array() < 0.0).any()) throw DomainError("ridge_eps must be nonnegative");
}

}  // namespace

double lambda_max(const Matrix& x, const Vector& y) {
  const double n = static_cast<double>(x.rows());
  Vector yc = y.array() - y.mean();
  double best = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    double mean = x.col(j).mean();
    double g = (x.col(j).dot(yc) - mean * yc.sum()) / n;
    best = std::max(best, std::abs(g));
  }
  return best;
}

std::vector<double> log_lambda_grid(double top, int count, double ratio) {
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = top;
    return grid;
  }
  const double step = std::log(ratio) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = top * std::exp(step * i);
  return grid;
}

// ---------------------------------------------------------------------------
// Squared loss

ElasticNetPath::ElasticNetPath(const Matrix& x, const Vector& y, double ridge_eps)
    : ElasticNetPath(x, y, Vector::Constant(x.cols(), ridge_eps)) {}

ElasticNetPath::ElasticNetPath(const Matrix& x, const Vector& y, const Vector& ridge)
    : x_(x),
      ridge_(ridge),
      inv_n_(1.0 / static_cast<double>(x.rows())),
      curvature_(x.cols()),
      beta_(Vector::Zero(x.cols())),
      residual_(y),
      in_active_(x.cols(), 0) {
  if (y.size() != x.rows()) throw DomainError("response length does not match design rows");
  check_ridge(ridge, x.cols());
  for (Index j = 0; j < x.cols(); ++j) curvature_[j] = x.col(j).squaredNorm() * inv_n_ + ridge[j];
}

double ElasticNetPath::gradient(Index j) const { return x_.col(j).dot(residual_) * inv_n_; }

double ElasticNetPath::sweep(const std::vector<Index>& set, double lambda) {
  double max_change = 0.0;
  for (Index j : set) {
    const double a = curvature_[j];
    if (a <= 0.0) continue;  // all-zero column with no ridge term
    const double old = beta_[j];
    const double z = gradient(j) + (a - ridge_[j]) * old;
    const double updated = soft_threshold(z, lambda) / a;
    const double delta = updated - old;
    if (delta != 0.0) {
      beta_[j] = updated;
      residual_.noalias() -= delta * x_.col(j);
      max_change = std::max(max_change, a * std::abs(delta));
    }
  }
  return max_change;
}

double ElasticNetPath::kkt_violation(double lambda) const {
  double worst = 0.0;
  for (Index j = 0; j < x_.cols(); ++j)
    worst = std::max(worst, stationarity_gap(gradient(j), beta_[j], lambda, ridge_[j]));
  return worst;
}

void ElasticNetPath::solve(double lambda, double tol, int max_sweeps) {
  if (lambda < 0.0) throw DomainError("penalty must be nonnegative");
  const Index p = x_.cols();
  Vector grad(p);
  for (Index j = 0; j < p; ++j) grad[j] = gradient(j);

  // Sequential strong rule: screen with 2*lambda - lambda_prev.
  const double prev = last_lambda_ < 0.0 ? grad.cwiseAbs().maxCoeff() : last_lambda_;
  const double screen = std::max(0.0, 2.0 * lambda - prev);
  for (Index j = 0; j < p; ++j)
    if (!in_active_[j] && (beta_[j] != 0.0 || std::abs(grad[j]) >= screen)) {
      in_active_[j] = 1;
      active_.push_back(j);
    }
  std::sort(active_.begin(), active_.end());

  const int sweep_budget = sweeps_ + max_sweeps;
  for (;;) {
    for (;;) {
      double change = sweep(active_, lambda);
      ++sweeps_;
      if (change <= tol) break;
      if (sweeps_ >= sweep_budget)
        throw ConvergenceError("coordinate descent did not converge", kkt_violation(lambda));
    }
    bool added = false;
    for (Index j = 0; j < p; ++j) {
      if (in_active_[j]) continue;
      if (std::abs(gradient(j)) > lambda + tol) {
        in_active_[j] = 1;
        active_.push_back(j);
        added = true;
      }
    }
    if (!added) break;
    std::sort(active_.begin(), active_.end());
  }

  // Sweep-level convergence does not bound the stationarity gap of the active set
  // directly; keep sweeping until it does.
  for (;;) {
    double worst = 0.0;
    for (Index j : active_)
      worst = std::max(worst, stationarity_gap(gradient(j), beta_[j], lambda, ridge_[j]));
    if (worst <= tol) break;
    sweep(active_, lambda);
    ++sweeps_;
    if (sweeps_ >= sweep_budget)
      throw ConvergenceError("coordinate descent did not converge", kkt_violation(lambda));
  }
  last_lambda_ = lambda;
}

PenalizedFit elastic_net_fit(const Matrix& x, const Vector& y, double lambda, double ridge_eps,
                             const SolverOptions& opts) {
  ElasticNetPath path(x, y, ridge_eps);
  path.solve(lambda, opts.tol, opts.max_sweeps);
  return {path.beta(), 0.0, path.kkt_violation(lambda), path.sweeps()};
}

// ---------------------------------------------------------------------------
// Logistic loss

LogisticNetPath::LogisticNetPath(const Matrix& x, const Vector& y, double ridge_eps)
    : LogisticNetPath(x, y, Vector::Constant(x.cols(), ridge_eps)) {}

LogisticNetPath::LogisticNetPath(const Matrix& x, const Vector& y, const Vector& ridge)
    : x_(x), y_(y), ridge_(ridge), beta_(Vector::Zero(x.cols())) {
  if (y.size() != x.rows()) throw DomainError("response length does not match design rows");
  check_ridge(ridge, x.cols());
  double ybar = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
  intercept_ = std::log(ybar / (1.0 - ybar));
}

double LogisticNetPath::objective(double lambda, const Vector& eta) const {
  double loss = 0.0;
  for (Index i = 0; i < eta.size(); ++i) loss += log1p_exp(eta[i]) - y_[i] * eta[i];
  return loss / static_cast<double>(eta.size()) + lambda * beta_.lpNorm<1>() +
         0.5 * ridge_.dot(beta_.cwiseAbs2());
}

double LogisticNetPath::kkt_violation(double lambda) const {
  const double inv_n = 1.0 / static_cast<double>(x_.rows());
  Vector eta = (x_ * beta_).array() + intercept_;
  Vector resid(eta.size());
  for (Index i = 0; i < eta.size(); ++i) resid[i] = y_[i] - sigmoid(eta[i]);
  double worst = std::abs(resid.sum()) * inv_n;
  for (Index j = 0; j < x_.cols(); ++j)
    worst = std::max(worst, stationarity_gap(x_.col(j).dot(resid) * inv_n, beta_[j], lambda,
                                             ridge_[j]));
  return worst;
}

double LogisticNetPath::mean_deviance(const Matrix& x_new, const Vector& y_new) const {
  Vector eta = (x_new * beta_).array() + intercept_;
  double loss = 0.0;
  for (Index i = 0; i < eta.size(); ++i) loss += log1p_exp(eta[i]) - y_new[i] * eta[i];
  return loss / static_cast<double>(eta.size());
}

void LogisticNetPath::solve(double lambda, double tol, int max_sweeps) {
  if (lambda < 0.0) throw DomainError("penalty must be nonnegative");
  const Index n = x_.rows();
  const Index p = x_.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const int sweep_budget = sweeps_ + max_sweeps;

  Vector eta = (x_ * beta_).array() + intercept_;
  Vector w(n), resid(n), curvature(p);
  double current = objective(lambda, eta);

  for (int outer = 0; outer < 200; ++outer) {
    for (Index i = 0; i < n; ++i) {
      double prob = sigmoid(eta[i]);
      w[i] = std::max(prob * (1.0 - prob), 1e-5);
      resid[i] = (y_[i] - prob) / w[i];
    }
    const double w_sum = w.sum();
    for (Index j = 0; j < p; ++j)
      curvature[j] = x_.col(j).cwiseAbs2().dot(w) * inv_n + ridge_[j];

    const Vector beta_old = beta_;
    const double intercept_old = intercept_;

    auto sweep = [&](bool full, double& max_change) {
      double d0 = w.dot(resid) / w_sum;
      if (d0 != 0.0) {
        intercept_ += d0;
        resid.array() -= d0;
        max_change = std::max(max_change, w_sum * inv_n * std::abs(d0));
      }
      for (Index j = 0; j < p; ++j) {
        if (!full && beta_[j] == 0.0) continue;
        const double a = curvature[j];
        const double old = beta_[j];
        const double z = x_.col(j).cwiseProduct(w).dot(resid) * inv_n + (a - ridge_[j]) * old;
        const double updated = soft_threshold(z, lambda) / a;
        const double delta = updated - old;
        if (delta != 0.0) {
          beta_[j] = updated;
          resid.noalias() -= delta * x_.col(j);
          max_change = std::max(max_change, a * std::abs(delta));
        }
      }
    };

    // Weighted least-squares subproblem: full sweep, then active-set sweeps, until a
    // full sweep moves nothing beyond tolerance.
    for (;;) {
      double change = 0.0;
      sweep(true, change);
      ++sweeps_;
      if (change <= 0.1 * tol) break;
      for (;;) {
        double active_change = 0.0;
        sweep(false, active_change);
        ++sweeps_;
        if (active_change <= 0.1 * tol) break;
        if (sweeps_ >= sweep_budget)
          throw ConvergenceError("logistic coordinate descent did not converge",
                                 kkt_violation(lambda));
      }
      if (sweeps_ >= sweep_budget)
        throw ConvergenceError("logistic coordinate descent did not converge",
                               kkt_violation(lambda));
    }

    // Backtrack along the Newton direction if the true objective went up.
    Vector beta_new = beta_;
    double intercept_new = intercept_;
    double step = 1.0;
    for (int halvings = 0;; ++halvings) {
      beta_ = beta_old + step * (beta_new - beta_old);
      intercept_ = intercept_old + step * (intercept_new - intercept_old);
      eta = (x_ * beta_).array() + intercept_;
      double value = objective(lambda, eta);
      if (value <= current + 1e-12 * std::max(1.0, std::abs(current)) || halvings >= 30) {
        current = value;
        break;
      }
      step *= 0.5;
    }

    if (kkt_violation(lambda) <= tol) return;
  }
  throw ConvergenceError("logistic proximal Newton did not converge", kkt_violation(lambda));
}

PenalizedFit logistic_net_fit(const Matrix& x, const Vector& y, double lambda, double ridge_eps,
                              const SolverOptions& opts) {
  LogisticNetPath path(x, y, ridge_eps);
  path.solve(lambda, opts.tol, opts.max_sweeps);
  return {path.beta(), path.intercept(), path.kkt_violation(lambda), path.sweeps()};
}

}  // namespace seqcrt
