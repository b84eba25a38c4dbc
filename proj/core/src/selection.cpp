#include "seqcrt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqcrt {

namespace {

constexpr std::uint64_t kSplitTag = 0x51;
constexpr std::uint64_t kOrderTag = 0x52;
constexpr std::uint64_t kCrtTag = 0x53;

// Slack on the ratio test so that, e.g., 9/1 against (0.9/0.1)*1 is not lost to rounding.
constexpr double kRatioSlack = 1e-12;

Dataset subset(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.x = data.x(rows, Eigen::all);
  out.y = data.y(rows);
  out.response_kind = data.response_kind;
  return out;
}

}  // namespace

Ordering Ordering::identity(Index p) {
  Ordering order;
  order.perm.resize(p);
  std::iota(order.perm.begin(), order.perm.end(), 0);
  return order;
}

Ordering Ordering::by_scores(std::span<const double> scores) {
  Ordering order = identity(static_cast<Index>(scores.size()));
  std::stable_sort(order.perm.begin(), order.perm.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

void Ordering::validate(Index p) const {
  if (static_cast<Index>(perm.size()) != p)
    throw DomainError("ordering has " + std::to_string(perm.size()) + " entries for " +
                      std::to_string(p) + " variables");
  std::vector<char> seen(p, 0);
  for (int v : perm) {
    if (v < 0 || v >= p || seen[v]) throw DomainError("ordering is not a permutation");
    seen[v] = 1;
  }
}

Selection seqstep_select(const std::vector<bool>& below_c, const Ordering& order,
                         const SeqStepParams& params) {
  params.validate();
  const Index p = static_cast<Index>(below_c.size());
  order.validate(p);
  const double threshold = (1.0 - params.c) * params.q / params.c;

  Selection out;
  out.ratio_trace.resize(p);
  int above = 0, below = 0;
  for (Index k = 0; k < p; ++k) {
    (below_c[order.perm[k]] ? below : above) += 1;
    const double ratio = (1.0 + above) / std::max(below, 1);
    out.ratio_trace[k] = ratio;
    if (ratio <= threshold * (1.0 + kRatioSlack)) out.k_hat = static_cast<int>(k + 1);
  }
  for (int k = 0; k < out.k_hat; ++k)
    if (below_c[order.perm[k]]) out.selected.push_back(order.perm[k] + 1);
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

Selection seqstep_select(std::span<const double> pvals, const Ordering& order,
                         const SeqStepParams& params) {
  std::vector<bool> below(pvals.size());
  for (std::size_t j = 0; j < pvals.size(); ++j) {
    if (!(pvals[j] > 0.0 && pvals[j] <= 1.0))
      throw DomainError("p-value of variable " + std::to_string(j + 1) + " lies outside (0,1]");
    below[j] = pvals[j] <= params.c;
  }
  return seqstep_select(below, order, params);
}

Selection seqstep_select(const std::vector<PValueRecord>& records, const Ordering& order,
                         const SeqStepParams& params) {
  std::vector<bool> below(records.size());
  for (std::size_t j = 0; j < records.size(); ++j) {
    if (records[j].variable != static_cast<int>(j) + 1)
      throw DomainError("p-value records are not in variable order");
    below[j] = records[j].at_most(params.c);
  }
  return seqstep_select(below, order, params);
}

Vector ordering_scores(const StatisticKind& kind, const Matrix& x, const Vector& y,
                       ResponseKind response, RngStream& rng) {
  const Index p = x.cols();
  FoldAssignment folds;
  if (const auto* lasso = std::get_if<LassoCoefficient>(&kind)) {
    folds = make_folds(x.rows(), lasso->cv_folds, rng);
    return cross_validated_fit(*lasso, x, y, response, folds).beta.cwiseAbs();
  }
  FitContext ctx{response, nullptr};
  Vector scores(p);
  for (Index j = 0; j < p; ++j) scores[j] = statistic_single(kind, x.col(j), x, j, y, ctx);
  return scores;
}

Selection pipeline_split(const Dataset& data, const CovariateModel& model, const CrtConfig& cfg,
                         const SeqStepParams& params, double split_frac, const RngStream& rng) {
  data.validate();
  params.validate();
  if (!(split_frac > 0.0 && split_frac < 1.0)) throw DomainError("split_frac must lie in (0,1)");
  const Index n = data.n();
  const Index n_pval = static_cast<Index>(std::ceil(split_frac * static_cast<double>(n)));
  if (n_pval < 2 || n - n_pval < 2)
    throw DomainError("each split fold needs at least 2 rows (n=" + std::to_string(n) + ")");

  std::vector<Index> rows(n);
  std::iota(rows.begin(), rows.end(), Index{0});
  RngStream split_rng = rng.derive(kSplitTag);
  split_rng.shuffle(rows);
  Dataset pval_fold = subset(data, {rows.begin(), rows.begin() + n_pval});
  Dataset order_fold = subset(data, {rows.begin() + n_pval, rows.end()});

  RngStream order_rng = rng.derive(kOrderTag);
  Vector scores =
      ordering_scores(cfg.statistic, order_fold.x, order_fold.y, data.response_kind, order_rng);
  Ordering order = Ordering::by_scores({scores.data(), static_cast<std::size_t>(scores.size())});

  std::vector<PValueRecord> records = crt_all_variables(pval_fold, model, cfg, rng.derive(kCrtTag));
  return seqstep_select(records, order, params);
}

Selection pipeline_symmetric(const Dataset& data, const CovariateModel& model,
                             const CrtConfig& cfg, const SeqStepParams& params,
                             const RngStream& rng, std::vector<PValueRecord>& records) {
  params.validate();
  records = crt_all_variables(data, model, cfg, rng.derive(kCrtTag));
  std::vector<double> scores(records.size());
  for (std::size_t j = 0; j < records.size(); ++j) scores[j] = records[j].score;
  return seqstep_select(records, Ordering::by_scores(scores), params);
}

Selection pipeline_symmetric(const Dataset& data, const CovariateModel& model,
                             const CrtConfig& cfg, const SeqStepParams& params,
                             const RngStream& rng) {
  std::vector<PValueRecord> records;
  return pipeline_symmetric(data, model, cfg, params, rng, records);
}

}  // namespace seqcrt
