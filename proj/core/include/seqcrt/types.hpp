#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqcrt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of a formula or construction.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text (CSV/JSON). `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double kkt_violation)
      : Error(what + " (final KKT violation " + std::to_string(kkt_violation) + ")"),
        kkt_violation_(kkt_violation) {}
  double kkt_violation() const noexcept { return kkt_violation_; }

 private:
  double kkt_violation_;
};

enum class ResponseKind { continuous, binary };

/// n observations of p covariates plus a response.
struct Dataset {
  Matrix x;
  Vector y;
  ResponseKind response_kind = ResponseKind::continuous;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }

  /// Throws DomainError when the invariants (n >= 2, p >= 1, matching
  /// lengths, binary responses in {0,1}) do not hold.
  void validate() const;
};

/// Threshold c and nominal FDR level q of Selective SeqStep+.
struct SeqStepParams {
  double c = 0.1;
  double q = 0.1;

  void validate() const;
};

/// A CRT p-value stored as its rank r on the grid {1/(B+1), ..., 1}.
struct PValueRecord {
  int rank = 1;            // r in [1, B+1]
  int randomizations = 1;  // B
  double score = 0.0;      // ordering statistic z_j
  int variable = 1;        // 1-based variable index

  double pvalue() const { return static_cast<double>(rank) / (randomizations + 1); }

  /// True when p <= c, decided on integer ranks: r <= c(B+1) with c(B+1)
  /// snapped to the nearest integer when it is integral up to rounding.
  bool at_most(double c) const;
};

/// Output of Selective SeqStep+.
struct Selection {
  int k_hat = 0;
  std::vector<int> selected;        // sorted, 1-based variable indices
  std::vector<double> ratio_trace;  // running ratio at k = 1..p along the ordering
};

}  // namespace seqcrt
