#pragma once

#include "seqcrt/rng.hpp"
#include "seqcrt/types.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace seqcrt {

/// |sample correlation(x_j, y)|.
struct AbsCorrelation {};

/// |coefficient of x_j| when regressing y on x_j and its neighbors (with intercept).
struct NeighborhoodOls {
  /// neighbors[j]: 0-based columns regressed alongside column j. When empty, the
  /// columns within `radius` of j are used.
  std::vector<std::vector<int>> neighbors;
  int radius = 1;
  double ridge_eps = 1e-6;

  /// In-block neighborhoods of a block-diagonal design with the given block size.
  static NeighborhoodOls blocks(Index p, int block_size, double ridge_eps = 1e-6);
};

/// |coefficient of x_j| from an l1-penalized fit (squared loss for continuous
/// responses, logistic loss for binary ones) at the cross-validated penalty.
struct LassoCoefficient {
  int cv_folds = 5;
  /// Explicit strictly decreasing penalties; empty selects `n_lambda` log-spaced
  /// values from lambda_max down to lambda_min_ratio * lambda_max.
  std::vector<double> lambda_grid;
  int n_lambda = 50;
  double lambda_min_ratio = 0.01;
  double ridge_eps = 1e-6;
  /// Coordinate-descent tolerance for the cross-validation path and for the final fit.
  double path_tol = 1e-7;
  double final_tol = 1e-9;
  /// Stop the cross-validation path once this many consecutive penalties fail to
  /// improve on the best CV error so far; 0 runs the whole grid.
  int cv_patience = 10;

  void validate() const;
};

using StatisticKind = std::variant<AbsCorrelation, NeighborhoodOls, LassoCoefficient>;

enum class ScoreKind { max_stat, max_minus_median };

/// Fold label in [0, folds) for every row; fixed before looking at the data.
using FoldAssignment = std::vector<int>;

/// Balanced random fold labels for n rows.
FoldAssignment make_folds(Index n, int folds, RngStream& rng);

/// Everything a statistic needs besides the design.
struct FitContext {
  ResponseKind response = ResponseKind::continuous;
  const FoldAssignment* folds = nullptr;  // required by LassoCoefficient
};

struct Importance {
  Vector values;            // one nonnegative importance per target column
  bool degenerate = false;  // some target column had zero variance
};

/// Design [targets | other columns] for variable j: `targets` replaces column j and the
/// remaining columns of x (or j's neighbors for NeighborhoodOls) follow in order.
Matrix assemble_design(const StatisticKind& kind, const Matrix& targets, const Matrix& x, Index j);

/// Importances of the first `n_targets` columns of an assembled design.
Importance importance_on_design(const StatisticKind& kind, const Matrix& design, Index n_targets,
                                const Vector& y, const FitContext& ctx);

/// T(x_j, x_{-j}, y); column j of x is ignored and `xj` used in its place.
double statistic_single(const StatisticKind& kind, const Vector& xj, const Matrix& x, Index j,
                        const Vector& y, const FitContext& ctx);

/// (T^(0), ..., T^(B)) from one joint fit on [columns | x_{-j}]. Permuting the
/// columns permutes the output.
Vector statistic_oneshot(const StatisticKind& kind, const Matrix& columns, const Matrix& x,
                         Index j, const Vector& y, const FitContext& ctx);

/// Symmetric summary of the B+1 statistics; invariant under permutation.
double symmetric_score(ScoreKind kind, std::span<const double> stats);

/// True when the kind computes its B+1 importances in one joint fit.
bool supports_oneshot(const StatisticKind& kind);

/// Result of the cross-validated fit behind LassoCoefficient.
struct CvFit {
  Vector beta;
  double intercept = 0.0;
  double lambda = 0.0;
  std::size_t lambda_index = 0;
  std::vector<double> lambdas;
  std::vector<double> cv_error;
};

/// Cross-validated l1 fit on an arbitrary design.
CvFit cross_validated_fit(const LassoCoefficient& settings, const Matrix& design, const Vector& y,
                          ResponseKind response, const FoldAssignment& folds);

std::string to_string(ScoreKind kind);
ScoreKind score_kind_from_string(const std::string& name);
std::string statistic_name(const StatisticKind& kind);

}  // namespace seqcrt
