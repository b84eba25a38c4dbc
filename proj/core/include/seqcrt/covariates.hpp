#pragma once

#include "seqcrt/rng.hpp"
#include "seqcrt/types.hpp"

#include <Eigen/Cholesky>

#include <span>
#include <variant>
#include <vector>

namespace seqcrt {

// Column indices in this header are 0-based.

struct Ar1Structure {
  double rho = 0.5;
};
struct BlockStructure {
  int block_size = 3;
  double off_diag = 0.3;
};
struct GeneralStructure {};
using GaussianStructure = std::variant<GeneralStructure, Ar1Structure, BlockStructure>;

/// Gaussian law of a single coordinate given the others.
struct GaussianLaw {
  double mean = 0.0;
  double variance = 1.0;
};

/// Discrete law over an output alphabet.
struct DiscreteLaw {
  std::vector<double> probs;
  std::vector<double> values;
};

using ConditionalLaw = std::variant<GaussianLaw, DiscreteLaw>;

/// Multivariate normal covariate model N(mean, covariance).
///
/// The precision matrix is formed once at construction; for AR(1) and block
/// structures it is built in closed form so each conditional only touches the
/// sparse neighborhood of the coordinate.
class GaussianModel {
 public:
  struct Term {
    Index column;
    double coef;  // -Q_jk / Q_jj
  };

  GaussianModel(Vector mean, Matrix covariance, GaussianStructure structure = GeneralStructure{});

  /// Zero-mean stationary AR(1) with unit marginal variance.
  static GaussianModel ar1(Index p, double rho);
  /// Zero-mean, unit-variance block diagonal model; the last block may be shorter.
  static GaussianModel block(Index p, int block_size, double off_diag);
  static GaussianModel identity(Index p);

  Index dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return covariance_; }
  const GaussianStructure& structure() const { return structure_; }

  /// Coordinates other than j whose value enters the conditional mean of X_j.
  const std::vector<Term>& neighborhood(Index j) const { return regression_[j]; }
  double conditional_variance(Index j) const { return conditional_variance_[j]; }

  /// Law of X_j given X_{-j}; `x_rest` lists the other p-1 coordinates in order.
  GaussianLaw conditional(Index j, std::span<const double> x_rest) const;
  /// Conditional mean of X_j for every row of a full n x p matrix.
  Vector conditional_means(const Matrix& x, Index j) const;

  /// n i.i.d. rows.
  Matrix sample_rows(Index n, RngStream& rng) const;

  /// One draw of X given Y = y when Y | X ~ N(X^T beta, noise_var).
  Vector sample_given_response(const Vector& beta, double noise_var, double y,
                               RngStream& rng) const;
  /// n rows drawn independently given the response vector y.
  Matrix sample_given_response(const Vector& beta, double noise_var, const Vector& y,
                               RngStream& rng) const;

 private:
  void build_regression(const Matrix& precision);

  Vector mean_;
  Matrix covariance_;
  GaussianStructure structure_;
  Matrix chol_lower_;
  std::vector<std::vector<Term>> regression_;
  Vector conditional_variance_;
};

/// Discrete hidden Markov model emitting one symbol per variable.
class HmmModel {
 public:
  HmmModel(Index length, Matrix transition, Matrix emission, Vector initial,
           std::vector<double> alphabet = {1.0, 2.0, 3.0});

  /// Five hidden states (stay probability 0.6), three symbols coded {1,2,3},
  /// uniform initial law.
  static HmmModel sticky_five_state(Index length);

  Index dim() const { return length_; }
  int hidden_states() const { return static_cast<int>(transition_.rows()); }
  int symbols() const { return static_cast<int>(emission_.cols()); }
  const Matrix& transition() const { return transition_; }
  const Matrix& emission() const { return emission_; }
  const Vector& initial() const { return initial_; }
  const std::vector<double>& alphabet() const { return alphabet_; }

  /// Position of `value` in the alphabet; throws DomainError when absent.
  int symbol_of(double value) const;

  Matrix sample_rows(Index n, RngStream& rng) const;

  /// Exact P(X_j = a | X_{-j}) by forward/backward messages.
  DiscreteLaw conditional(Index j, std::span<const double> x_rest) const;
  /// Conditional laws of every position of one full row, as a p x symbols table.
  Matrix row_conditionals(std::span<const double> row) const;

 private:
  Index length_;
  Matrix transition_;
  Matrix emission_;
  Vector initial_;
  std::vector<double> alphabet_;
};

using CovariateModel = std::variant<GaussianModel, HmmModel>;

Index model_dim(const CovariateModel& model);
Matrix sample_rows(const CovariateModel& model, Index n, RngStream& rng);
ConditionalLaw conditional_law(const CovariateModel& model, Index j,
                               std::span<const double> x_rest);

/// Draws fresh copies of a column from its conditional law given the other
/// columns of a fixed data matrix. Holds per-row precomputation so repeated
/// calls across columns stay cheap. Read-only after construction.
class ColumnResampler {
 public:
  ColumnResampler(const CovariateModel& model, const Matrix& x);

  /// n x copies matrix; every entry drawn independently from the row's conditional law.
  Matrix resample(Index j, int copies, RngStream& rng) const;

 private:
  const CovariateModel* model_;
  const Matrix* x_;
  // HMM only: per row, a p x symbols table of conditional probabilities.
  std::vector<Matrix> hmm_tables_;
};

}  // namespace seqcrt
