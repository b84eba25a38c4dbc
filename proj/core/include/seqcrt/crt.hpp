#pragma once

#include "seqcrt/covariates.hpp"
#include "seqcrt/rng.hpp"
#include "seqcrt/stats.hpp"
#include "seqcrt/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace seqcrt {

enum class CrtMode { original, one_shot };

struct CrtConfig {
  int randomizations = 9;  // B
  CrtMode mode = CrtMode::one_shot;
  StatisticKind statistic = LassoCoefficient{};
  ScoreKind score = ScoreKind::max_stat;

  void validate() const;
};

/// Observed column of variable j followed by B conditional resamples.
struct ResampleBundle {
  Index variable = 0;  // 0-based
  Matrix columns;      // n x (B+1); column 0 is the observed X_j
};

ResampleBundle crt_resample(const ColumnResampler& sampler, const Matrix& x, Index j, int B,
                            RngStream& rng);

/// Rank r in [1, B+1] of stats[0] among all B+1 values, counting the copies
/// that reach or exceed it; ties are broken by i.i.d. uniform jitter keys.
int crt_rank(std::span<const double> stats, RngStream& rng);

/// Per-variable CRT output before it is folded into a PValueRecord.
struct CrtOutcome {
  PValueRecord record;
  Vector statistics;  // T^(0..B)
};

/// B+1 separate fits of T on [X_j^(b), X_{-j}].
CrtOutcome crt_pvalue_original(const ResampleBundle& bundle, const Matrix& x, const Vector& y,
                               ResponseKind response, const CrtConfig& cfg, RngStream& rng);

/// One joint fit on [X_j^(0), ..., X_j^(B), X_{-j}].
CrtOutcome crt_pvalue_oneshot(const ResampleBundle& bundle, const Matrix& x, const Vector& y,
                              ResponseKind response, const CrtConfig& cfg, RngStream& rng);

/// Dispatches on cfg.mode.
CrtOutcome crt_pvalue(const ResampleBundle& bundle, const Matrix& x, const Vector& y,
                      ResponseKind response, const CrtConfig& cfg, RngStream& rng);

/// One record per variable. Variable j uses the stream rng.derive(j), so results do
/// not depend on processing order or on `workers` (0 = worker_count()).
std::vector<PValueRecord> crt_all_variables(const Dataset& data, const CovariateModel& model,
                                            const CrtConfig& cfg, const RngStream& rng,
                                            int workers = 0);

std::string to_string(CrtMode mode);
CrtMode crt_mode_from_string(const std::string& name);

}  // namespace seqcrt
