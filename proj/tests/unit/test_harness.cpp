#include "seqcrt/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace seqcrt {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 60;
  c.p = 12;
  c.k = 4;
  c.amplitudes = {0.0, 8.0};
  c.methods = {Method::split, Method::symmetric_oneshot, Method::symmetric_original};
  c.crt.statistic = AbsCorrelation{};
  c.crt.randomizations = 9;
  c.n_reps = 3;
  c.seed = 42;
  c.record_runtime = false;
  return c;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_results_csv(out, r.rows);
  return out.str();
}

TEST(Harness, RowCountAndOrder) {
  ExperimentConfig c = small_config();
  ExperimentResult r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 2u * 3u * 3u);
  EXPECT_EQ(r.failures, 0);
  std::size_t i = 0;
  for (double a : c.amplitudes)
    for (int rep = 0; rep < 3; ++rep)
      for (Method m : c.methods) {
        EXPECT_EQ(r.rows[i].amplitude, a);
        EXPECT_EQ(r.rows[i].rep, rep);
        EXPECT_EQ(r.rows[i].method, m);
        EXPECT_GE(r.rows[i].fdp, 0.0);
        EXPECT_LE(r.rows[i].power, 1.0);
        ++i;
      }
}

TEST(Harness, IdenticalBytesAcrossRunsAndWorkers) {
  ExperimentConfig c = small_config();
  c.workers = 1;
  std::string a = csv_of(run_experiment(c));
  c.workers = 3;
  std::string b = csv_of(run_experiment(c));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), results_csv_header());
  EXPECT_EQ(results_csv_header(),
            "setting,family,n,p,k,amplitude,method,rep,fdp,power,n_selected,runtime_ms,seed");
}

TEST(Harness, MethodOrderDoesNotChangeRows) {
  ExperimentConfig c = small_config();
  ExperimentResult a = run_experiment(c);
  std::swap(c.methods[0], c.methods[2]);
  ExperimentResult b = run_experiment(c);
  for (const ReplicationResult& ra : a.rows) {
    bool found = false;
    for (const ReplicationResult& rb : b.rows)
      if (rb.method == ra.method && rb.rep == ra.rep && rb.amplitude == ra.amplitude) {
        found = true;
        EXPECT_EQ(rb.n_selected, ra.n_selected);
        EXPECT_EQ(rb.fdp, ra.fdp);
        EXPECT_EQ(rb.power, ra.power);
      }
    EXPECT_TRUE(found);
  }
}

TEST(Harness, GlobalNullMeanFdp) {
  ExperimentConfig c = small_config();
  c.k = 0;
  c.p = 20;
  c.amplitudes = {0.0};
  c.methods = {Method::symmetric_oneshot};
  c.n_reps = 100;
  ExperimentResult r = run_experiment(c);
  double sum = 0;
  for (const ReplicationResult& row : r.rows) {
    sum += row.fdp;
    EXPECT_EQ(row.power, 0.0);
  }
  EXPECT_LE(sum / r.rows.size(), 0.1 + 2.0 / std::sqrt(100.0));
}

TEST(Harness, ZeroAmplitudeHasNoNonnulls) {
  ExperimentConfig c = small_config();
  const CovariateModel model = make_covariate_model(c);
  SyntheticDraw null_draw = draw_synthetic(c, model, 0, 1);
  EXPECT_TRUE(null_draw.truth.nonnull.empty());
  EXPECT_EQ(null_draw.truth.null.size(), 12u);
  SyntheticDraw signal = draw_synthetic(c, model, 1, 1);
  EXPECT_EQ(signal.truth.nonnull.size(), 4u);
  EXPECT_EQ(signal.data.x, null_draw.data.x);
  for (const ReplicationResult& row : run_experiment(c).rows)
    if (row.amplitude == 0.0) {
      EXPECT_EQ(row.power, 0.0);
      EXPECT_EQ(row.fdp, row.n_selected > 0 ? 1.0 : 0.0);
    }
}

TEST(Harness, ScoreSelection) {
  GroundTruth truth{{0, 2}, {1, 3, 4}};
  Selection s;
  s.selected = {1, 2, 3};
  ReplicationResult row;
  score_selection(s, truth, row);
  EXPECT_EQ(row.n_selected, 3);
  EXPECT_DOUBLE_EQ(row.fdp, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(row.power, 1.0);
  score_selection(Selection{}, truth, row);
  EXPECT_EQ(row.fdp, 0.0);
  EXPECT_EQ(row.power, 0.0);
}

TEST(Harness, ReplicationErrorsAreRecorded) {
  ExperimentConfig c = small_config();
  c.n = 4;
  c.methods = {Method::symmetric_oneshot};
  c.crt.statistic = LassoCoefficient{};  // five folds cannot fit on four rows
  ExperimentResult r = run_experiment(c);
  EXPECT_EQ(r.failures, static_cast<int>(r.rows.size()));
  EXPECT_TRUE(std::isnan(r.rows[0].fdp));
  EXPECT_EQ(r.rows[0].n_selected, -1);
  EXPECT_FALSE(r.rows[0].error.empty());
  EXPECT_NE(csv_of(r).find(",nan,nan,-1,"), std::string::npos);
}

TEST(Harness, ConfigValidation) {
  ExperimentConfig c = small_config();
  c.n_reps = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.setting = 'z';
  EXPECT_THROW(c.validate(), DomainError);
  c = small_config();
  c.split_frac = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(DatasetCsv, RoundTrip) {
  RngStream rng(1, 0);
  Dataset d;
  d.x = GaussianModel::ar1(4, 0.5).sample_rows(7, rng);
  d.y = d.x.col(0) * 1.0 / 3.0;
  std::stringstream buf;
  write_dataset_csv(buf, d);
  Dataset back = parse_dataset_csv(buf);
  EXPECT_EQ(back.x, d.x);
  EXPECT_EQ(back.y, d.y);
}

TEST(DatasetCsv, Errors) {
  std::istringstream bad_header("y,x1,x3\n1,2,3\n");
  try {
    parse_dataset_csv(bad_header);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("x2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("x3"), std::string::npos);
  }
  std::istringstream bad_value("y,x1\n1,2\n3,abc\n");
  try {
    parse_dataset_csv(bad_value);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
  }
  std::istringstream short_row("y,x1,x2\n1,2,3\n4,5\n");
  EXPECT_THROW(parse_dataset_csv(short_row), ParseError);
  std::istringstream binary("y,x1\n0,1\n2,3\n");
  EXPECT_THROW(parse_dataset_csv(binary, ResponseKind::binary), DomainError);
  EXPECT_THROW(load_dataset_csv("/nonexistent/file.csv"), Error);
}

TEST(FitGaussian, RecoversConditionalMeans) {
  GaussianModel truth = GaussianModel::ar1(5, 0.5);
  RngStream rng(2, 0);
  Matrix x = truth.sample_rows(20000, rng);
  GaussianModel fitted = fit_gaussian(x);
  Vector probe = truth.sample_rows(1, rng).row(0).transpose();
  for (Index j = 0; j < 5; ++j) {
    std::vector<double> rest;
    for (Index k = 0; k < 5; ++k)
      if (k != j) rest.push_back(probe[k]);
    EXPECT_NEAR(fitted.conditional(j, rest).mean, truth.conditional(j, rest).mean, 0.05);
  }
  Matrix constant = Matrix::Ones(10, 2);
  EXPECT_THROW(fit_gaussian(constant, 0.0), DomainError);
  EXPECT_NO_THROW(fit_gaussian(constant, 1e-3));
}

TEST(SelectOnData, ChecksDimensionAndIsSeeded) {
  RngStream rng(3, 0);
  Dataset d;
  d.x = GaussianModel::ar1(8, 0.3).sample_rows(80, rng);
  d.y = 2 * d.x.col(1) + Vector::NullaryExpr(80, [&](Index) { return rng.normal(); });
  CrtConfig cfg;
  cfg.statistic = AbsCorrelation{};
  Selection a = select_on_data(d, GaussianModel::ar1(8, 0.3), cfg, {0.1, 0.5}, 5);
  Selection b = select_on_data(d, GaussianModel::ar1(8, 0.3), cfg, {0.1, 0.5}, 5);
  EXPECT_EQ(a.selected, b.selected);
  EXPECT_THROW(select_on_data(d, GaussianModel::ar1(7, 0.3), cfg, {0.1, 0.5}, 5), DomainError);
}

TEST(Json, ExperimentConfigRoundTrip) {
  ExperimentConfig c = small_config();
  c.family = CovariateFamily::hmm;
  c.setting = 'c';
  c.seqstep = {0.2, 0.15};
  ExperimentConfig back = experiment_config_from_json(to_json(c));
  EXPECT_EQ(back.family, c.family);
  EXPECT_EQ(back.setting, 'c');
  EXPECT_EQ(back.amplitudes, c.amplitudes);
  EXPECT_EQ(back.methods, c.methods);
  EXPECT_EQ(back.seqstep.c, 0.2);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.record_runtime, false);
  EXPECT_EQ(statistic_name(back.crt.statistic), "abs_correlation");
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_THROW(experiment_config_from_json("{\"n_reps\": 0}"), DomainError);
  EXPECT_THROW(experiment_config_from_json("{not json"), ParseError);
  EXPECT_THROW(experiment_config_from_json("{\"methods\": [\"bogus\"]}"), ParseError);
}

TEST(Json, CrtConfig) {
  CrtConfig c = crt_config_from_json(
      R"({"B": 19, "mode": "original", "statistic": "lasso", "cv_folds": 4, "n_lambda": 30, "score": "max_minus_median"})");
  EXPECT_EQ(c.randomizations, 19);
  EXPECT_EQ(c.mode, CrtMode::original);
  EXPECT_EQ(c.score, ScoreKind::max_minus_median);
  const auto& lasso = std::get<LassoCoefficient>(c.statistic);
  EXPECT_EQ(lasso.cv_folds, 4);
  EXPECT_EQ(lasso.n_lambda, 30);
  CrtConfig ols = crt_config_from_json(R"({"statistic": "neighborhood_ols", "neighbors": [[2], [1]]})");
  EXPECT_EQ(std::get<NeighborhoodOls>(ols.statistic).neighbors[0], std::vector<int>{1});
  EXPECT_THROW(crt_config_from_json(R"({"statistic": "xgboost"})"), ParseError);
}

TEST(Json, CovariateModelRoundTrip) {
  for (const CovariateModel& m : {CovariateModel(GaussianModel::ar1(4, 0.4)),
                                  CovariateModel(GaussianModel::block(6, 3, 0.3)),
                                  CovariateModel(HmmModel::sticky_five_state(5))}) {
    CovariateModel back = covariate_model_from_json(to_json(m));
    EXPECT_EQ(to_json(back), to_json(m));
  }
  CovariateModel ar = covariate_model_from_json(R"({"type": "ar1", "p": 3, "rho": 0.2})");
  EXPECT_NEAR(std::get<GaussianModel>(ar).covariance()(0, 2), 0.04, 1e-15);
  EXPECT_THROW(covariate_model_from_json(R"({"type": "t"})"), ParseError);
  EXPECT_THROW(covariate_model_from_json(R"({"type": "ar1"})"), ParseError);
}

TEST(Json, SelectionRoundTrip) {
  Selection s;
  s.k_hat = 4;
  s.selected = {1, 3};
  s.ratio_trace = {1.0, 0.5, 1.0, 0.75};
  Selection back = selection_from_json(to_json(s));
  EXPECT_EQ(back.k_hat, 4);
  EXPECT_EQ(back.selected, s.selected);
  EXPECT_EQ(back.ratio_trace, s.ratio_trace);
}

TEST(Json, BoundAndMethodNames) {
  std::string j = to_json(bound_exchangeable(0.1, 0.1, 1.0));
  EXPECT_NE(j.find("exchangeable_rho"), std::string::npos);
  for (Method m : {Method::split, Method::symmetric_original, Method::symmetric_oneshot})
    EXPECT_EQ(method_from_string(to_string(m)), m);
  EXPECT_THROW(method_from_string("knockoff"), ParseError);
}

}  // namespace
}  // namespace seqcrt
