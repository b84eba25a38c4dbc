#include "seqcrt/elastic_net.hpp"
#include "seqcrt/rng.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

namespace seqcrt {
namespace {

Matrix random_matrix(Index n, Index p, std::uint64_t seed) {
  RngStream rng(seed, 0);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = rng.normal();
  return x;
}

Vector centered(const Vector& v) { return v.array() - v.mean(); }

Matrix centered(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

double soft(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

// Newton's method on the ridge-penalized logistic loss with a free intercept.
Vector newton_logistic(const Matrix& x, const Vector& y, double ridge) {
  const Index n = x.rows(), p = x.cols();
  Matrix z(n, p + 1);
  z.col(0).setOnes();
  z.rightCols(p) = x;
  Vector theta = Vector::Zero(p + 1);
  Matrix pen = Matrix::Identity(p + 1, p + 1) * ridge;
  pen(0, 0) = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector mu = (-(z * theta)).array().exp().unaryExpr([](double e) { return 1.0 / (1.0 + e); });
    Vector grad = z.transpose() * (mu - y) / double(n) + pen * theta;
    Vector w = mu.array() * (1.0 - mu.array());
    Matrix hess = z.transpose() * w.asDiagonal() * z / double(n) + pen;
    Vector step = hess.ldlt().solve(grad);
    theta -= step;
    if (step.norm() < 1e-14) break;
  }
  return theta;
}

TEST(ElasticNet, RidgeLimitMatchesClosedForm) {
  const Index n = 60, p = 5;
  Matrix x = centered(random_matrix(n, p, 1));
  Vector y = centered(Vector(x * Vector::LinSpaced(p, -1, 1) + random_matrix(n, 1, 2).col(0)));
  const double ridge = 0.3;
  PenalizedFit fit = elastic_net_fit(x, y, 0.0, ridge, {1e-12, 100000});
  Matrix a = x.transpose() * x / double(n) + ridge * Matrix::Identity(p, p);
  Vector expected = a.ldlt().solve(x.transpose() * y / double(n));
  EXPECT_LT((fit.beta - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ElasticNet, OrthogonalDesignSoftThresholds) {
  const Index n = 64, p = 4;
  Matrix q = random_matrix(n, p, 3).householderQr().householderQ() * Matrix::Identity(n, p);
  Matrix x = q * std::sqrt(double(n));  // x^T x / n = I
  Vector y = random_matrix(n, 1, 4).col(0) * 2.0;
  const double lambda = 0.15, ridge = 0.05;
  PenalizedFit fit = elastic_net_fit(x, y, lambda, ridge, {1e-12, 100000});
  Vector z = x.transpose() * y / double(n);
  for (Index j = 0; j < p; ++j) EXPECT_NEAR(fit.beta[j], soft(z[j], lambda) / (1 + ridge), 1e-10);
}

TEST(ElasticNet, SatisfiesKktConditions) {
  const Index n = 80, p = 30;
  Matrix x = centered(random_matrix(n, p, 5));
  Vector beta0 = Vector::Zero(p);
  beta0.head(4) << 2, -1.5, 1, 0.5;
  Vector y = centered(Vector(x * beta0 + random_matrix(n, 1, 6).col(0)));
  const double lambda = 0.1, ridge = 1e-6;
  PenalizedFit fit = elastic_net_fit(x, y, lambda, ridge, {1e-10, 100000});
  Vector grad = x.transpose() * (y - x * fit.beta) / double(n) - ridge * fit.beta;
  for (Index j = 0; j < p; ++j) {
    if (fit.beta[j] != 0.0)
      EXPECT_NEAR(grad[j], lambda * (fit.beta[j] > 0 ? 1 : -1), 1e-8);
    else
      EXPECT_LE(std::abs(grad[j]), lambda + 1e-8);
  }
  EXPECT_LE(fit.kkt_violation, 1e-10);
}

TEST(ElasticNet, LambdaMaxIsTheFirstZeroSolution) {
  const Index n = 50, p = 10;
  Matrix x = centered(random_matrix(n, p, 7));
  Vector y = centered(Vector(x.col(2) + random_matrix(n, 1, 8).col(0)));
  const double top = lambda_max(x, y);
  EXPECT_NEAR(top, (x.transpose() * y).cwiseAbs().maxCoeff() / n, 1e-12);
  EXPECT_EQ(elastic_net_fit(x, y, top, 0.0).beta.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(elastic_net_fit(x, y, 0.95 * top, 0.0).beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ElasticNet, WarmPathMatchesColdFits) {
  const Index n = 70, p = 25;
  Matrix x = centered(random_matrix(n, p, 9));
  Vector y = centered(Vector(x.leftCols(3).rowwise().sum() + random_matrix(n, 1, 10).col(0)));
  std::vector<double> grid = log_lambda_grid(lambda_max(x, y), 20, 0.01);
  ElasticNetPath path(x, y, 1e-6);
  for (double lambda : grid) {
    path.solve(lambda, 1e-11);
    PenalizedFit cold = elastic_net_fit(x, y, lambda, 1e-6, {1e-11, 100000});
    EXPECT_LT((path.beta() - cold.beta).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_LT((path.residual() - (y - x * path.beta())).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(ElasticNet, LogGridEndpoints) {
  std::vector<double> grid = log_lambda_grid(2.0, 5, 0.01);
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_DOUBLE_EQ(grid.front(), 2.0);
  EXPECT_NEAR(grid.back(), 0.02, 1e-15);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_NEAR(grid[i] / grid[i - 1], std::pow(0.01, 0.25), 1e-12);
}

TEST(ElasticNet, ExhaustedSweepsThrow) {
  Matrix x = centered(random_matrix(40, 20, 11));
  Vector y = centered(Vector(random_matrix(40, 1, 12).col(0)));
  EXPECT_THROW(elastic_net_fit(x, y, 1e-4, 0.0, {1e-14, 1}), ConvergenceError);
}

TEST(LogisticNet, RidgeLimitMatchesNewton) {
  const Index n = 200, p = 4;
  Matrix x = random_matrix(n, p, 13);
  RngStream rng(14, 0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-(0.3 + x(i, 0) - x(i, 1))))) ? 1 : 0;
  const double ridge = 0.02;
  PenalizedFit fit = logistic_net_fit(x, y, 0.0, ridge, {1e-12, 100000});
  Vector theta = newton_logistic(x, y, ridge);
  EXPECT_NEAR(fit.intercept, theta[0], 1e-7);
  EXPECT_LT((fit.beta - theta.tail(p)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(LogisticNet, LassoKktConditions) {
  const Index n = 150, p = 12;
  Matrix x = random_matrix(n, p, 15);
  RngStream rng(16, 0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-2 * x(i, 0)))) ? 1 : 0;
  const double lambda = 0.03;
  PenalizedFit fit = logistic_net_fit(x, y, lambda, 0.0, {1e-10, 100000});
  Vector eta = (x * fit.beta).array() + fit.intercept;
  Vector mu = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
  EXPECT_NEAR((y - mu).mean(), 0.0, 1e-8);
  Vector grad = x.transpose() * (y - mu) / double(n);
  EXPECT_NE(fit.beta[0], 0.0);
  for (Index j = 0; j < p; ++j) {
    if (fit.beta[j] != 0.0)
      EXPECT_NEAR(grad[j], lambda * (fit.beta[j] > 0 ? 1 : -1), 1e-7);
    else
      EXPECT_LE(std::abs(grad[j]), lambda + 1e-7);
  }
}

TEST(LogisticNet, PathMatchesColdFitsAndDeviance) {
  const Index n = 120, p = 8;
  Matrix x = random_matrix(n, p, 17);
  RngStream rng(18, 0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-x(i, 1)))) ? 1 : 0;
  LogisticNetPath path(x, y, 1e-6);
  for (double lambda : {0.1, 0.05, 0.01}) {
    path.solve(lambda, 1e-11);
    PenalizedFit cold = logistic_net_fit(x, y, lambda, 1e-6, {1e-11, 100000});
    EXPECT_LT((path.beta() - cold.beta).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(path.intercept(), cold.intercept, 1e-6);
  }
  double dev = 0;
  for (Index i = 0; i < n; ++i) {
    double eta = path.intercept() + x.row(i).dot(path.beta());
    dev += std::log1p(std::exp(eta)) - y[i] * eta;
  }
  EXPECT_NEAR(path.mean_deviance(x, y), dev / n, 1e-12);
}

}  // namespace
}  // namespace seqcrt
