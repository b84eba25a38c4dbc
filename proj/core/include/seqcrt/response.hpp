#pragma once

#include "seqcrt/rng.hpp"
#include "seqcrt/types.hpp"

#include <string>
#include <vector>

namespace seqcrt {

enum class ResponseModel { linear, logistic, nonlinear_pairs, nonlinear_binary };
enum class CovariateFamily { ar1, hmm };
/// Feature map applied before the logistic link of the binary nonlinear model.
enum class BinaryTransform { sign, indicator };

struct ResponseSpec {
  ResponseModel kind = ResponseModel::linear;
  double amplitude = 0.0;  // A; nonzero coefficients are A / sqrt(n)
  int n_nonnull = 20;      // k
  // 0-based indices. Left empty, they are drawn at random. For nonlinear_pairs
  // `support` holds the first index of each pair and `pair_support` the second.
  std::vector<int> support;
  std::vector<int> pair_support;
  double centering = 0.0;  // logistic: link uses (x - centering)^T beta
  double threshold = 0.0;  // indicator threshold t
  double shift = 0.0;      // indicator transform: 1{x > t} - shift
  BinaryTransform transform = BinaryTransform::sign;

  /// Settings (a) linear, (b) logistic, (c) nonlinear pairs, (d) nonlinear binary
  /// for the given covariate family with its centering and thresholds.
  static ResponseSpec standard(char setting, CovariateFamily family, double amplitude,
                               int n_nonnull);
};

/// Partition of the 0-based variable indices.
struct GroundTruth {
  std::vector<int> nonnull;
  std::vector<int> null;
};

struct GeneratedResponse {
  Vector y;
  GroundTruth truth;
  ResponseKind kind = ResponseKind::continuous;
};

GeneratedResponse generate_response(const Matrix& x, const ResponseSpec& spec, RngStream& rng);

std::string to_string(ResponseModel kind);
ResponseModel response_model_from_string(const std::string& name);
std::string to_string(CovariateFamily family);
CovariateFamily covariate_family_from_string(const std::string& name);

}  // namespace seqcrt
