#pragma once

#include "seqcrt/covariates.hpp"
#include "seqcrt/crt.hpp"
#include "seqcrt/response.hpp"
#include "seqcrt/selection.hpp"
#include "seqcrt/theory.hpp"
#include "seqcrt/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace seqcrt {

enum class Method { split, symmetric_original, symmetric_oneshot };

struct ExperimentConfig {
  CovariateFamily family = CovariateFamily::ar1;
  double ar_rho = 0.5;  // AR(1) correlation
  char setting = 'a';   // response setting (a)-(d)
  Index n = 300;
  Index p = 300;
  int k = 20;
  std::vector<double> amplitudes{3.5, 5.0};
  std::vector<Method> methods{Method::symmetric_oneshot};
  /// B, statistic and score; the mode is overridden per method (split uses one-shot).
  CrtConfig crt;
  SeqStepParams seqstep;
  double split_frac = 0.5;
  int n_reps = 100;
  std::uint64_t seed = 1;
  std::string output;  // CSV path; empty writes nowhere
  /// When false runtime_ms is written as 0 so repeated runs give identical bytes.
  bool record_runtime = true;
  int workers = 0;  // replication-level workers; 0 = worker_count()

  void validate() const;
};

struct ReplicationResult {
  std::string setting;
  std::string family;
  Index n = 0;
  Index p = 0;
  int k = 0;
  double amplitude = 0.0;
  Method method = Method::symmetric_oneshot;
  int rep = 0;
  double fdp = 0.0;
  double power = 0.0;
  int n_selected = 0;
  long long runtime_ms = 0;
  std::uint64_t seed = 0;
  std::string error;  // empty on success
};

struct ExperimentResult {
  std::vector<ReplicationResult> rows;  // (amplitude, rep, method) order
  int failures = 0;
};

/// Covariate model of the configured family with dimension p.
CovariateModel make_covariate_model(const ExperimentConfig& config);

/// One synthetic dataset for (amplitude index, rep); shared by every method.
struct SyntheticDraw {
  Dataset data;
  GroundTruth truth;
};
SyntheticDraw draw_synthetic(const ExperimentConfig& config, const CovariateModel& model,
                             std::size_t amplitude_index, int rep);

/// Runs one method on a dataset and scores its selection.
ReplicationResult run_method(const ExperimentConfig& config, const CovariateModel& model,
                             const SyntheticDraw& draw, Method method, std::size_t amplitude_index,
                             int rep);

/// Every (amplitude, rep, method) cell. Replication errors are recorded in the
/// row (fdp and power NaN) and counted instead of aborting the run.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// fdp = |selected and null| / max(|selected|, 1); power = |selected and nonnull| / max(k, 1).
void score_selection(const Selection& selection, const GroundTruth& truth, ReplicationResult& row);

struct TimingRow {
  Method method = Method::symmetric_oneshot;
  double mean_seconds = 0.0;
  int reps = 0;
};

struct TimingReport {
  std::vector<TimingRow> rows;
  /// mean one-shot time / mean original time, when both methods ran.
  double ratio = 0.0;
};

/// Wall-clock of the symmetric pipelines over config.n_reps datasets at the first amplitude.
TimingReport timing_comparison(const ExperimentConfig& config);

void write_results_csv(std::ostream& out, const std::vector<ReplicationResult>& rows);
std::string results_csv_header();

/// Header `y,x1,...,xp` then one numeric row per observation.
Dataset load_dataset_csv(const std::string& path, ResponseKind kind = ResponseKind::continuous);
Dataset parse_dataset_csv(std::istream& in, ResponseKind kind = ResponseKind::continuous);
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Gaussian fitted by the sample mean and the sample covariance plus shrink * I.
GaussianModel fit_gaussian(const Matrix& x, double shrink = 1e-3);

/// Symmetric pipeline on user data.
Selection select_on_data(const Dataset& data, const CovariateModel& model, const CrtConfig& cfg,
                         const SeqStepParams& params, std::uint64_t seed);

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string to_json(const ExperimentConfig& config);
CrtConfig crt_config_from_json(const std::string& text);

/// {"type": "ar1"|"block"|"gaussian"|"hmm", ...}; see README for the fields.
CovariateModel covariate_model_from_json(const std::string& text);
std::string to_json(const CovariateModel& model);

std::string to_json(const Selection& selection);
Selection selection_from_json(const std::string& text);
std::string to_json(const BoundReport& report);
std::string to_json(const MonteCarloFdr& fdr);

std::string to_string(Method method);
Method method_from_string(const std::string& name);

std::string read_text_file(const std::string& path);

}  // namespace seqcrt
