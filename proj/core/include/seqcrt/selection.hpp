#pragma once

#include "seqcrt/covariates.hpp"
#include "seqcrt/crt.hpp"
#include "seqcrt/rng.hpp"
#include "seqcrt/types.hpp"

#include <span>
#include <vector>

namespace seqcrt {

/// perm[k] is the 0-based variable visited at position k.
struct Ordering {
  std::vector<int> perm;

  static Ordering identity(Index p);
  /// Scores sorted in decreasing order; equal scores keep ascending variable index.
  static Ordering by_scores(std::span<const double> scores);

  /// Throws DomainError unless perm is a bijection on {0, ..., p-1}.
  void validate(Index p) const;
};

/// Selective SeqStep+ on the indicators below_c[j] = 1{p_j <= c} (0-based j).
Selection seqstep_select(const std::vector<bool>& below_c, const Ordering& order,
                         const SeqStepParams& params);

/// Same, thresholding raw p-values with p <= c.
Selection seqstep_select(std::span<const double> pvals, const Ordering& order,
                         const SeqStepParams& params);

/// Same, thresholding CRT ranks with PValueRecord::at_most. records[j] must describe
/// variable j+1.
Selection seqstep_select(const std::vector<PValueRecord>& records, const Ordering& order,
                         const SeqStepParams& params);

/// Importance of every variable on (x, y), used to order hypotheses from held-out rows.
/// The lasso kind uses a single cross-validated fit on all columns.
Vector ordering_scores(const StatisticKind& kind, const Matrix& x, const Vector& y,
                       ResponseKind response, RngStream& rng);

/// Data-splitting pipeline: p-values from the first ceil(split_frac * n) rows of a
/// seeded row permutation, ordering from the remaining rows.
Selection pipeline_split(const Dataset& data, const CovariateModel& model, const CrtConfig& cfg,
                         const SeqStepParams& params, double split_frac, const RngStream& rng);

/// Symmetric-statistic pipeline: each variable's CRT yields both p_j and the
/// permutation-invariant score z_j; variables are ordered by z_j.
Selection pipeline_symmetric(const Dataset& data, const CovariateModel& model,
                             const CrtConfig& cfg, const SeqStepParams& params,
                             const RngStream& rng);

/// Same as pipeline_symmetric but also returns the per-variable records.
Selection pipeline_symmetric(const Dataset& data, const CovariateModel& model,
                             const CrtConfig& cfg, const SeqStepParams& params,
                             const RngStream& rng, std::vector<PValueRecord>& records);

}  // namespace seqcrt
