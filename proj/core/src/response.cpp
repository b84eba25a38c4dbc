#include "seqcrt/response.hpp"

#include <algorithm>
#include <cmath>

namespace seqcrt {

ResponseSpec ResponseSpec::standard(char setting, CovariateFamily family, double amplitude,
                                    int n_nonnull) {
  ResponseSpec spec;
  spec.amplitude = amplitude;
  spec.n_nonnull = n_nonnull;
  const bool hmm = family == CovariateFamily::hmm;
  switch (setting) {
    case 'a':
      spec.kind = ResponseModel::linear;
      break;
    case 'b':
      spec.kind = ResponseModel::logistic;
      spec.centering = hmm ? 2.0 : 0.0;
      break;
    case 'c':
      spec.kind = ResponseModel::nonlinear_pairs;
      spec.threshold = hmm ? 1.5 : 0.0;
      break;
    case 'd':
      spec.kind = ResponseModel::nonlinear_binary;
      spec.transform = hmm ? BinaryTransform::indicator : BinaryTransform::sign;
      spec.threshold = hmm ? 1.5 : 0.0;
      spec.shift = hmm ? 2.0 / 3.0 : 0.0;
      break;
    default:
      throw DomainError(std::string("unknown response setting '") + setting + "'");
  }
  return spec;
}

namespace {

void check_indices(const std::vector<int>& idx, Index p) {
  for (int j : idx)
    if (j < 0 || j >= p) throw DomainError("support index out of range");
}

double logistic(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

}  // namespace

GeneratedResponse generate_response(const Matrix& x, const ResponseSpec& spec, RngStream& rng) {
  const Index n = x.rows();
  const Index p = x.cols();
  const int k = spec.n_nonnull;
  if (k < 0 || k > p) throw DomainError("number of nonnulls must lie in [0, p]");
  const bool pairs = spec.kind == ResponseModel::nonlinear_pairs;
  if (pairs && k % 2 != 0) throw DomainError("nonlinear pairs need an even number of nonnulls");

  std::vector<int> first = spec.support;
  std::vector<int> second = spec.pair_support;
  if (first.empty() && second.empty() && k > 0) {
    RngStream support_rng = rng.derive(0x5u);
    std::vector<int> drawn = support_rng.sample_without_replacement(static_cast<int>(p), k);
    if (pairs) {
      first.assign(drawn.begin(), drawn.begin() + k / 2);
      second.assign(drawn.begin() + k / 2, drawn.end());
    } else {
      first = std::move(drawn);
    }
  }
  check_indices(first, p);
  check_indices(second, p);
  if (pairs) {
    if (static_cast<int>(first.size()) != k / 2 || static_cast<int>(second.size()) != k / 2)
      throw DomainError("each pair index set must have k/2 entries");
    for (int j : first)
      if (std::find(second.begin(), second.end(), j) != second.end())
        throw DomainError("pair index sets must be disjoint");
  } else if (static_cast<int>(first.size()) != k) {
    throw DomainError("support size " + std::to_string(first.size()) +
                      " differs from the number of nonnulls " + std::to_string(k));
  }

  const double coef = spec.amplitude / std::sqrt(static_cast<double>(n));
  RngStream noise = rng.derive(0xE0u);
  GeneratedResponse out;
  out.y.resize(n);

  switch (spec.kind) {
    case ResponseModel::linear:
      out.kind = ResponseKind::continuous;
      for (Index i = 0; i < n; ++i) {
        double mean = 0.0;
        for (int j : first) mean += coef * x(i, j);
        out.y[i] = mean + noise.normal();
      }
      break;
    case ResponseModel::logistic:
      out.kind = ResponseKind::binary;
      for (Index i = 0; i < n; ++i) {
        double eta = 0.0;
        for (int j : first) eta += coef * (x(i, j) - spec.centering);
        out.y[i] = noise.bernoulli(logistic(eta)) ? 1.0 : 0.0;
      }
      break;
    case ResponseModel::nonlinear_pairs:
      out.kind = ResponseKind::continuous;
      for (Index i = 0; i < n; ++i) {
        double mean = 0.0;
        for (std::size_t m = 0; m < first.size(); ++m)
          if (x(i, first[m]) > spec.threshold && x(i, second[m]) > spec.threshold) mean += coef;
        out.y[i] = mean + noise.normal();
      }
      break;
    case ResponseModel::nonlinear_binary:
      out.kind = ResponseKind::binary;
      for (Index i = 0; i < n; ++i) {
        double eta = 0.0;
        for (int j : first) {
          double v = x(i, j);
          double feature = spec.transform == BinaryTransform::sign
                               ? static_cast<double>((v > 0.0) - (v < 0.0))
                               : (v > spec.threshold ? 1.0 : 0.0) - spec.shift;
          eta += coef * feature;
        }
        out.y[i] = noise.bernoulli(logistic(eta)) ? 1.0 : 0.0;
      }
      break;
  }

  std::vector<char> is_nonnull(p, 0);
  for (int j : first) is_nonnull[j] = 1;
  for (int j : second) is_nonnull[j] = 1;
  for (Index j = 0; j < p; ++j)
    (is_nonnull[j] ? out.truth.nonnull : out.truth.null).push_back(static_cast<int>(j));
  return out;
}

std::string to_string(ResponseModel kind) {
  switch (kind) {
    case ResponseModel::linear: return "linear";
    case ResponseModel::logistic: return "logistic";
    case ResponseModel::nonlinear_pairs: return "nonlinear_pairs";
    case ResponseModel::nonlinear_binary: return "nonlinear_binary";
  }
  return "linear";
}

ResponseModel response_model_from_string(const std::string& name) {
  if (name == "linear" || name == "a") return ResponseModel::linear;
  if (name == "logistic" || name == "b") return ResponseModel::logistic;
  if (name == "nonlinear_pairs" || name == "c") return ResponseModel::nonlinear_pairs;
  if (name == "nonlinear_binary" || name == "d") return ResponseModel::nonlinear_binary;
  throw ParseError("unknown response setting '" + name + "'");
}

std::string to_string(CovariateFamily family) {
  return family == CovariateFamily::ar1 ? "ar1" : "hmm";
}

CovariateFamily covariate_family_from_string(const std::string& name) {
  if (name == "ar1") return CovariateFamily::ar1;
  if (name == "hmm") return CovariateFamily::hmm;
  throw ParseError("unknown covariate family '" + name + "'");
}

}  // namespace seqcrt
