#include "seqcrt/crt.hpp"

#include "seqcrt/parallel.hpp"

#include <sstream>

namespace seqcrt {

namespace {

constexpr std::uint64_t kResampleTag = 0x1;
constexpr std::uint64_t kFoldTag = 0x2;
constexpr std::uint64_t kTieTag = 0x3;

FoldAssignment folds_for(const CrtConfig& cfg, Index n, RngStream& rng) {
  if (const auto* lasso = std::get_if<LassoCoefficient>(&cfg.statistic)) {
    RngStream fold_rng = rng.derive(kFoldTag);
    return make_folds(n, lasso->cv_folds, fold_rng);
  }
  return {};
}

CrtOutcome finish(const CrtConfig& cfg, Index j, Vector stats, RngStream& rng) {
  RngStream tie_rng = rng.derive(kTieTag);
  CrtOutcome out;
  out.record.rank = crt_rank({stats.data(), static_cast<std::size_t>(stats.size())}, tie_rng);
  out.record.randomizations = cfg.randomizations;
  out.record.score = symmetric_score(cfg.score, {stats.data(), static_cast<std::size_t>(stats.size())});
  out.record.variable = static_cast<int>(j) + 1;
  out.statistics = std::move(stats);
  return out;
}

}  // namespace

void CrtConfig::validate() const {
  if (randomizations < 1) throw DomainError("number of randomizations B must be at least 1");
  if (const auto* lasso = std::get_if<LassoCoefficient>(&statistic)) lasso->validate();
  if (mode == CrtMode::one_shot && !supports_oneshot(statistic))
    throw DomainError("statistic does not support one-shot evaluation");
}

ResampleBundle crt_resample(const ColumnResampler& sampler, const Matrix& x, Index j, int B,
                            RngStream& rng) {
  if (B < 1) throw DomainError("number of randomizations B must be at least 1");
  ResampleBundle bundle;
  bundle.variable = j;
  bundle.columns.resize(x.rows(), B + 1);
  bundle.columns.col(0) = x.col(j);
  bundle.columns.rightCols(B) = sampler.resample(j, B, rng);
  return bundle;
}

int crt_rank(std::span<const double> stats, RngStream& rng) {
  if (stats.empty()) throw DomainError("no statistics to rank");
  std::vector<double> jitter(stats.size());
  for (double& u : jitter) u = rng.uniform();
  int count = 0;
  for (std::size_t b = 1; b < stats.size(); ++b) {
    if (stats[b] > stats[0] || (stats[b] == stats[0] && jitter[b] > jitter[0])) ++count;
  }
  return 1 + count;
}

CrtOutcome crt_pvalue_original(const ResampleBundle& bundle, const Matrix& x, const Vector& y,
                               ResponseKind response, const CrtConfig& cfg, RngStream& rng) {
  const Index copies = bundle.columns.cols();
  FoldAssignment folds = folds_for(cfg, x.rows(), rng);
  FitContext ctx{response, folds.empty() ? nullptr : &folds};

  Matrix design = assemble_design(cfg.statistic, bundle.columns.col(0), x, bundle.variable);
  Vector stats(copies);
  for (Index b = 0; b < copies; ++b) {
    design.col(0) = bundle.columns.col(b);
    stats[b] = importance_on_design(cfg.statistic, design, 1, y, ctx).values[0];
  }
  return finish(cfg, bundle.variable, std::move(stats), rng);
}

CrtOutcome crt_pvalue_oneshot(const ResampleBundle& bundle, const Matrix& x, const Vector& y,
                              ResponseKind response, const CrtConfig& cfg, RngStream& rng) {
  FoldAssignment folds = folds_for(cfg, x.rows(), rng);
  FitContext ctx{response, folds.empty() ? nullptr : &folds};
  Vector stats = statistic_oneshot(cfg.statistic, bundle.columns, x, bundle.variable, y, ctx);
  return finish(cfg, bundle.variable, std::move(stats), rng);
}

CrtOutcome crt_pvalue(const ResampleBundle& bundle, const Matrix& x, const Vector& y,
                      ResponseKind response, const CrtConfig& cfg, RngStream& rng) {
  return cfg.mode == CrtMode::original ? crt_pvalue_original(bundle, x, y, response, cfg, rng)
                                       : crt_pvalue_oneshot(bundle, x, y, response, cfg, rng);
}

std::vector<PValueRecord> crt_all_variables(const Dataset& data, const CovariateModel& model,
                                            const CrtConfig& cfg, const RngStream& rng,
                                            int workers) {
  data.validate();
  cfg.validate();
  const Index p = data.p();
  ColumnResampler sampler(model, data.x);

  std::vector<PValueRecord> records(p);
  std::vector<std::string> errors(p);
  parallel_for(
      static_cast<std::size_t>(p),
      [&](std::size_t j) {
        try {
          RngStream var_rng = rng.derive(j);
          RngStream resample_rng = var_rng.derive(kResampleTag);
          ResampleBundle bundle =
              crt_resample(sampler, data.x, static_cast<Index>(j), cfg.randomizations, resample_rng);
          records[j] = crt_pvalue(bundle, data.x, data.y, data.response_kind, cfg, var_rng).record;
        } catch (const std::exception& e) {
          errors[j] = e.what();
        }
      },
      workers);

  std::ostringstream report;
  int failures = 0;
  for (Index j = 0; j < p; ++j)
    if (!errors[j].empty()) {
      report << (failures++ ? "; " : "") << "variable " << j + 1 << ": " << errors[j];
    }
  if (failures) throw Error("CRT failed for " + std::to_string(failures) + " variable(s): " + report.str());
  return records;
}

std::string to_string(CrtMode mode) { return mode == CrtMode::original ? "original" : "one_shot"; }

CrtMode crt_mode_from_string(const std::string& name) {
  if (name == "original") return CrtMode::original;
  if (name == "one_shot" || name == "oneshot") return CrtMode::one_shot;
  throw ParseError("unknown CRT mode '" + name + "'");
}

}  // namespace seqcrt
