#include "seqcrt/stats.hpp"

#include "seqcrt/elastic_net.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <limits>
#include <functional>
#include <memory>
#include <string_view>
#include <unordered_map>

namespace seqcrt {

NeighborhoodOls NeighborhoodOls::blocks(Index p, int block_size, double ridge_eps) {
  NeighborhoodOls kind;
  kind.ridge_eps = ridge_eps;
  kind.neighbors.resize(p);
  for (Index j = 0; j < p; ++j) {
    Index start = (j / block_size) * block_size;
    for (Index k = start; k < std::min<Index>(start + block_size, p); ++k)
      if (k != j) kind.neighbors[j].push_back(static_cast<int>(k));
  }
  return kind;
}

void LassoCoefficient::validate() const {
  if (cv_folds < 2) throw DomainError("cv_folds must be at least 2");
  if (!(ridge_eps > 0.0)) throw DomainError("ridge_eps must be positive");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw DomainError("lambda grid entries must be positive");
    if (i > 0 && !(lambda_grid[i] < lambda_grid[i - 1]))
      throw DomainError("lambda grid must be strictly decreasing");
  }
  if (cv_patience < 0) throw DomainError("cv_patience must be nonnegative");
  if (lambda_grid.empty() && (n_lambda < 1 || !(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0)))
    throw DomainError("invalid automatic lambda grid settings");
}

FoldAssignment make_folds(Index n, int folds, RngStream& rng) {
  if (folds < 2 || folds > n) throw DomainError("fold count must lie in [2, n]");
  std::vector<int> order(n);
  for (Index i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);
  FoldAssignment labels(n);
  for (Index pos = 0; pos < n; ++pos) labels[order[pos]] = static_cast<int>(pos % folds);
  return labels;
}

Matrix assemble_design(const StatisticKind& kind, const Matrix& targets, const Matrix& x, Index j) {
  const Index n = x.rows();
  const Index m = targets.cols();
  if (targets.rows() != n) throw DomainError("target columns have the wrong length");
  if (j < 0 || j >= x.cols()) throw DomainError("variable index out of range");

  if (std::holds_alternative<AbsCorrelation>(kind)) return targets;

  if (const auto* ols = std::get_if<NeighborhoodOls>(&kind)) {
    std::vector<int> cols;
    if (ols->neighbors.empty()) {
      for (Index k = std::max<Index>(0, j - ols->radius); k <= std::min(x.cols() - 1, j + ols->radius); ++k)
        if (k != j) cols.push_back(static_cast<int>(k));
    } else {
      if (static_cast<Index>(ols->neighbors.size()) != x.cols())
        throw DomainError("neighborhood map does not cover every variable");
      for (int k : ols->neighbors[j]) {
        if (k < 0 || k >= x.cols()) throw DomainError("neighbor index out of range");
        if (k != j) cols.push_back(k);
      }
    }
    Matrix design(n, m + static_cast<Index>(cols.size()));
    design.leftCols(m) = targets;
    for (std::size_t c = 0; c < cols.size(); ++c) design.col(m + c) = x.col(cols[c]);
    return design;
  }

  Matrix design(n, m + x.cols() - 1);
  design.leftCols(m) = targets;
  design.middleCols(m, j) = x.leftCols(j);
  design.rightCols(x.cols() - 1 - j) = x.rightCols(x.cols() - 1 - j);
  return design;
}

namespace {

// Exactly repeated columns, as happens when resampled copies coincide, make the
// ridge term the only force splitting mass between them and stall coordinate
// descent. The fit is run on one representative per group with ridge / size,
// which has the same solution as the full problem after an even split.
struct ColumnGroups {
  std::vector<Index> representative;  // first column of each group
  std::vector<int> group_of;          // group index of every column
  Vector sizes;
};

ColumnGroups group_identical_columns(const Matrix& design) {
  const Index m = design.cols();
  const std::size_t bytes = static_cast<std::size_t>(design.rows()) * sizeof(double);
  ColumnGroups g;
  g.group_of.assign(m, -1);
  std::unordered_multimap<std::size_t, int> by_hash;
  std::vector<double> sizes;
  for (Index j = 0; j < m; ++j) {
    const char* data = reinterpret_cast<const char*>(design.col(j).data());
    const std::size_t h = std::hash<std::string_view>{}(std::string_view(data, bytes));
    auto [lo, hi] = by_hash.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
      const Index r = g.representative[it->second];
      if (std::memcmp(design.col(r).data(), data, bytes) == 0) {
        g.group_of[j] = it->second;
        break;
      }
    }
    if (g.group_of[j] < 0) {
      g.group_of[j] = static_cast<int>(g.representative.size());
      by_hash.emplace(h, g.group_of[j]);
      g.representative.push_back(j);
      sizes.push_back(0.0);
    }
    sizes[g.group_of[j]] += 1.0;
  }
  g.sizes = Eigen::Map<Vector>(sizes.data(), static_cast<Index>(sizes.size()));
  return g;
}

Importance correlation_importance(const Matrix& design, Index n_targets, const Vector& y) {
  Importance out{Vector::Zero(n_targets), false};
  Vector yc = y.array() - y.mean();
  const double y_norm = yc.norm();
  for (Index b = 0; b < n_targets; ++b) {
    Vector xc = design.col(b).array() - design.col(b).mean();
    const double x_norm = xc.norm();
    if (x_norm == 0.0 || y_norm == 0.0) {
      out.degenerate = true;
      continue;
    }
    out.values[b] = std::min(1.0, std::abs(xc.dot(yc)) / (x_norm * y_norm));
  }
  return out;
}

Importance ols_importance(const NeighborhoodOls& kind, const Matrix& design, Index n_targets,
                          const Vector& y) {
  const double n = static_cast<double>(design.rows());
  const ColumnGroups groups = group_identical_columns(design);
  Matrix dc = design(Eigen::all, groups.representative);
  dc.rowwise() -= dc.colwise().mean();
  Vector yc = y.array() - y.mean();
  Matrix gram = dc.transpose() * dc / n;
  gram.diagonal() += kind.ridge_eps * groups.sizes.cwiseInverse();
  Vector merged = gram.ldlt().solve(dc.transpose() * yc / n);
  Importance out{Vector(n_targets), false};
  for (Index b = 0; b < n_targets; ++b)
    out.values[b] = std::abs(merged[groups.group_of[b]]) / groups.sizes[groups.group_of[b]];
  for (Index b = 0; b < n_targets; ++b)
    if ((design.col(b).array() == design(0, b)).all()) out.degenerate = true;
  return out;
}

CvFit cv_fit_distinct(const LassoCoefficient& settings, const Matrix& design, const Vector& y,
                      ResponseKind response, const FoldAssignment& folds, const Vector& ridge) {
  const Index n = design.rows();
  const Index m = design.cols();
  if (static_cast<Index>(folds.size()) != n) throw DomainError("fold labels must cover every row");
  if (y.size() != n) throw DomainError("response length does not match design rows");
  const int n_folds = *std::max_element(folds.begin(), folds.end()) + 1;

  CvFit fit;
  fit.lambdas = settings.lambda_grid;
  if (fit.lambdas.empty()) {
    double top = lambda_max(design, y);
    if (top <= 0.0) {
      fit.beta = Vector::Zero(m);
      fit.intercept = response == ResponseKind::binary
                          ? std::log(std::clamp(y.mean(), 1e-6, 1 - 1e-6) /
                                     (1 - std::clamp(y.mean(), 1e-6, 1 - 1e-6)))
                          : y.mean();
      fit.lambdas = {0.0};
      fit.cv_error = {0.0};
      return fit;
    }
    fit.lambdas = log_lambda_grid(top, settings.n_lambda, settings.lambda_min_ratio);
  }
  const std::size_t n_lambda = fit.lambdas.size();
  fit.cv_error.assign(n_lambda, 0.0);

  // All folds advance along the grid together so the path can stop early.
  struct FoldData {
    Matrix x_train;
    Vector y_train;
    Matrix x_test;
    Vector y_test;
    std::unique_ptr<ElasticNetPath> squared;
    std::unique_ptr<LogisticNetPath> logistic;
  };
  std::deque<FoldData> fold_data;  // stable addresses: the paths reference x_train
  for (int k = 0; k < n_folds; ++k) {
    std::vector<Index> train, test;
    for (Index i = 0; i < n; ++i) (folds[i] == k ? test : train).push_back(i);
    if (test.empty() || train.size() < 2) continue;
    fold_data.emplace_back();
    FoldData& fd = fold_data.back();
    Matrix& x_train = fd.x_train;
    Vector& y_train = fd.y_train;
    x_train = design(train, Eigen::all);
    y_train = y(train);
    fd.x_test = design(test, Eigen::all);
    fd.y_test = y(test);
    if (response == ResponseKind::continuous) {
      Eigen::RowVectorXd means = x_train.colwise().mean();
      const double y_mean = y_train.mean();
      x_train.rowwise() -= means;
      fd.x_test.rowwise() -= means;
      y_train.array() -= y_mean;
      fd.y_test.array() -= y_mean;
      fd.squared = std::make_unique<ElasticNetPath>(x_train, y_train, ridge);
    } else {
      fd.logistic = std::make_unique<LogisticNetPath>(x_train, y_train, ridge);
    }
  }

  std::size_t evaluated = 0;
  std::size_t best = 0;
  for (std::size_t l = 0; l < n_lambda; ++l) {
    for (FoldData& fd : fold_data) {
      if (fd.squared) {
        fd.squared->solve(fit.lambdas[l], settings.path_tol);
        fit.cv_error[l] += (fd.y_test - fd.x_test * fd.squared->beta()).squaredNorm();
      } else {
        fd.logistic->solve(fit.lambdas[l], settings.path_tol);
        fit.cv_error[l] +=
            fd.logistic->mean_deviance(fd.x_test, fd.y_test) * static_cast<double>(fd.y_test.size());
      }
    }
    evaluated = l + 1;
    if (fit.cv_error[l] < fit.cv_error[best]) best = l;
    if (settings.cv_patience > 0 && l - best >= static_cast<std::size_t>(settings.cv_patience)) break;
  }
  fit.lambdas.resize(evaluated);
  fit.cv_error.resize(evaluated);
  for (double& e : fit.cv_error) e /= static_cast<double>(n);

  fit.lambda_index = static_cast<std::size_t>(
      std::min_element(fit.cv_error.begin(), fit.cv_error.end()) - fit.cv_error.begin());
  fit.lambda = fit.lambdas[fit.lambda_index];

  if (response == ResponseKind::continuous) {
    Eigen::RowVectorXd means = design.colwise().mean();
    Matrix xc = design.rowwise() - means;
    Vector yc = y.array() - y.mean();
    ElasticNetPath path(xc, yc, ridge);
    for (std::size_t l = 0; l < fit.lambda_index; ++l) path.solve(fit.lambdas[l], settings.path_tol);
    path.solve(fit.lambda, settings.final_tol);
    fit.beta = path.beta();
    fit.intercept = y.mean() - means.dot(fit.beta);
  } else {
    LogisticNetPath path(design, y, ridge);
    for (std::size_t l = 0; l < fit.lambda_index; ++l) path.solve(fit.lambdas[l], settings.path_tol);
    path.solve(fit.lambda, settings.final_tol);
    fit.beta = path.beta();
    fit.intercept = path.intercept();
  }
  return fit;
}

}  // namespace

CvFit cross_validated_fit(const LassoCoefficient& settings, const Matrix& design, const Vector& y,
                          ResponseKind response, const FoldAssignment& folds) {
  settings.validate();
  const ColumnGroups groups = group_identical_columns(design);
  const Index m = design.cols();
  if (static_cast<Index>(groups.representative.size()) == m)
    return cv_fit_distinct(settings, design, y, response, folds,
                           Vector::Constant(m, settings.ridge_eps));

  const Matrix reduced = design(Eigen::all, groups.representative);
  const Vector ridge = settings.ridge_eps * groups.sizes.cwiseInverse();
  CvFit fit = cv_fit_distinct(settings, reduced, y, response, folds, ridge);
  Vector beta(m);
  for (Index j = 0; j < m; ++j) beta[j] = fit.beta[groups.group_of[j]] / groups.sizes[groups.group_of[j]];
  fit.beta = std::move(beta);
  return fit;
}

Importance importance_on_design(const StatisticKind& kind, const Matrix& design, Index n_targets,
                                const Vector& y, const FitContext& ctx) {
  if (design.rows() != y.size()) throw DomainError("response length does not match design rows");
  if (std::holds_alternative<AbsCorrelation>(kind))
    return correlation_importance(design, n_targets, y);
  if (const auto* ols = std::get_if<NeighborhoodOls>(&kind))
    return ols_importance(*ols, design, n_targets, y);

  const auto& lasso = std::get<LassoCoefficient>(kind);
  if (ctx.folds == nullptr) throw DomainError("lasso statistic needs a fold assignment");
  CvFit fit = cross_validated_fit(lasso, design, y, ctx.response, *ctx.folds);
  Importance out{fit.beta.head(n_targets).cwiseAbs(), false};
  for (Index b = 0; b < n_targets; ++b)
    if ((design.col(b).array() == design(0, b)).all()) out.degenerate = true;
  return out;
}

double statistic_single(const StatisticKind& kind, const Vector& xj, const Matrix& x, Index j,
                        const Vector& y, const FitContext& ctx) {
  Matrix design = assemble_design(kind, xj, x, j);
  return importance_on_design(kind, design, 1, y, ctx).values[0];
}

Vector statistic_oneshot(const StatisticKind& kind, const Matrix& columns, const Matrix& x,
                         Index j, const Vector& y, const FitContext& ctx) {
  if (columns.cols() < 2) throw DomainError("one-shot statistic needs B >= 1 resampled copies");
  Matrix design = assemble_design(kind, columns, x, j);
  return importance_on_design(kind, design, columns.cols(), y, ctx).values;
}

double symmetric_score(ScoreKind kind, std::span<const double> stats) {
  if (stats.empty()) throw DomainError("symmetric score of an empty statistic vector");
  std::vector<double> sorted(stats.begin(), stats.end());
  std::sort(sorted.begin(), sorted.end());
  const double top = sorted.back();
  if (kind == ScoreKind::max_stat) return top;
  return top - sorted[(sorted.size() - 1) / 2];
}

bool supports_oneshot(const StatisticKind&) {
  // Every implemented kind treats its target columns symmetrically.
  return true;
}

std::string to_string(ScoreKind kind) {
  return kind == ScoreKind::max_stat ? "max" : "max_minus_median";
}

ScoreKind score_kind_from_string(const std::string& name) {
  if (name == "max" || name == "max_stat") return ScoreKind::max_stat;
  if (name == "max_minus_median") return ScoreKind::max_minus_median;
  throw ParseError("unknown score kind '" + name + "'");
}

std::string statistic_name(const StatisticKind& kind) {
  if (std::holds_alternative<AbsCorrelation>(kind)) return "abs_correlation";
  if (std::holds_alternative<NeighborhoodOls>(kind)) return "neighborhood_ols";
  return "lasso";
}

}  // namespace seqcrt
