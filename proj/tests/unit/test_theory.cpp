#include "seqcrt/theory.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqcrt {
namespace {

double round_up_4dp(double v) { return std::ceil(v * 1e4 - 1e-9) / 1e4; }

TEST(Bounds, AlmostIndependentPublishedValues) {
  BoundReport a = bound_almost_independent(0.3, 0.1, 0.0893, 0.002);
  BoundReport b = bound_almost_independent(0.3, 0.1, 0.11, 0.006);
  EXPECT_DOUBLE_EQ(round_up_4dp(a.value), 0.1508);
  EXPECT_DOUBLE_EQ(round_up_4dp(b.value), 0.1682);
  EXPECT_NEAR(a.value, 0.3893 / 0.3 * 0.7 / 0.6107 * 0.1 + 0.002, 1e-15);
  EXPECT_DOUBLE_EQ(bound_almost_independent(0.3, 0.1, 0.0, 0.0).value, 0.1);
  EXPECT_EQ(a.kind, BoundKind::almost_independent);
  EXPECT_EQ(*a.delta, 0.0893);
  EXPECT_THROW(bound_almost_independent(0.6, 0.1, 0.4, 0.0), DomainError);
  EXPECT_THROW(bound_almost_independent(0.3, 0.1, -0.1, 0.0), DomainError);
}

TEST(Bounds, ExchangeableValues) {
  EXPECT_DOUBLE_EQ(bound_exchangeable(0.5, 0.1).value, 0.55);
  EXPECT_DOUBLE_EQ(bound_exchangeable(0.1, 0.1, 0.0).value, 0.1);
  EXPECT_NEAR(bound_exchangeable(0.1, 0.1, 1.0).value, 0.19, 1e-15);
  // Hand evaluation at rho = 0.05: delta = 0.05*0.19/0.09, beta = 0.19/0.81.
  const double delta = 0.05 * 0.19 / 0.09, beta = 0.19 / 0.81;
  const double inner = 0.1 / 0.9 - 0.1 * (0.1 - 0.1 * delta) / (1 - (0.1 - 0.1 * delta));
  EXPECT_NEAR(bound_exchangeable(0.1, 0.1, 0.05).value, 0.1 + delta / (1 + beta * delta) * inner, 1e-15);
  EXPECT_NEAR(bound_exchangeable(0.1, 0.1, 0.05).value, 0.1104332, 1e-7);
}

TEST(Bounds, RhoRefinesTheSimpleBound) {
  for (double c : {0.05, 0.1, 0.3, 0.5, 0.8})
    for (double q : {0.05, 0.1, 0.2, 0.5})
      for (double rho = 0.0; rho <= 1.0; rho += 0.05) {
        BoundReport r = bound_exchangeable(c, q, rho);
        EXPECT_LE(r.value, bound_exchangeable(c, q).value + 1e-15);
        EXPECT_GE(r.value, q);
      }
}

TEST(Bounds, EpsilonSurfaceShape) {
  std::vector<double> qs{0.05, 0.1, 0.2, 0.3};
  std::vector<double> rhos;
  for (int i = 0; i <= 100; ++i) rhos.push_back(i / 100.0);
  Matrix eps = epsilon_surface(0.1, qs, rhos);
  ASSERT_EQ(eps.rows(), 4);
  ASSERT_EQ(eps.cols(), 101);
  for (Index i = 0; i < eps.rows(); ++i) {
    EXPECT_EQ(eps(i, 0), 0.0);
    for (Index k = 0; k < eps.cols(); ++k) {
      EXPECT_LE(eps(i, k), 0.1 * (1 - qs[i]) + 1e-15);
      if (k > 0) EXPECT_GE(eps(i, k), eps(i, k - 1));
      EXPECT_DOUBLE_EQ(eps(i, k), exchangeable_epsilon(0.1, qs[i], rhos[k]));
    }
  }
}

TEST(Bounds, ArbitraryDependence) {
  EXPECT_NEAR(bound_arbitrary(0.1, 0.1, {1}, 10).value, 0.095, 1e-15);
  const Index p = 50;
  std::vector<int> all(p);
  std::iota(all.begin(), all.end(), 1);
  double harmonic = 0;
  for (int k = 1; k <= p + 1; ++k) harmonic += 1.0 / k;
  BoundReport r = bound_arbitrary(0.1, 0.1, all, p);
  EXPECT_NEAR(r.value, 0.19 * (harmonic - 1), 1e-13);
  EXPECT_NEAR(*r.log_p_cap, 0.19 * std::log(50.0), 1e-15);
  EXPECT_NEAR(bound_arbitrary(0.1, 0.1, {static_cast<int>(p)}, p).value, 0.19 / (p + 1), 1e-15);
  EXPECT_THROW(bound_arbitrary(0.1, 0.5, {1}, 10), DomainError);
  EXPECT_THROW(bound_arbitrary(0.1, 0.1, {11}, 10), DomainError);
  EXPECT_THROW(bound_arbitrary(0.1, 0.1, {2, 2}, 10), DomainError);
}

TEST(Lemma, ZeroVarianceCollapse) {
  for (double alpha : {0.3, 0.5, 0.9})
    for (double c : {0.05, 0.1, 0.25}) EXPECT_NEAR(lemma_opt_value(alpha, c, 0.0), c / (1 - c), 1e-12);
  EXPECT_THROW(lemma_opt_value(0.2, 0.3, 0.01), DomainError);
}

TEST(Lemma, IncreasingInVariance) {
  double prev = lemma_opt_value(0.5, 0.1, 0.0);
  for (int i = 1; i <= 50; ++i) {
    double v = lemma_opt_value(0.5, 0.1, 0.001 * i);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Lemma, GridOracleIsFeasibleAndBelowClosedForm) {
  RngStream rng(1, 0);
  for (int t = 0; t < 5; ++t) {
    const double alpha = 0.3 + 0.5 * rng.uniform();
    const double c = alpha * (0.1 + 0.6 * rng.uniform());
    const double sigma2 = c * (alpha - c) * 0.9 * rng.uniform();
    LemmaGridResult g = lemma_grid_oracle(alpha, c, sigma2, 120, 4);
    double total = 0, mean = 0, second = 0, obj = 0;
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(g.pi[i], -1e-12);
      EXPECT_LE(g.x[i], alpha + 1e-12);
      EXPECT_GE(g.x[i], -1e-12);
      total += g.pi[i];
      mean += g.pi[i] * g.x[i];
      second += g.pi[i] * g.x[i] * g.x[i];
      obj += g.pi[i] * g.x[i] / (1 - g.x[i]);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_NEAR(mean, c, 1e-9);
    EXPECT_NEAR(second - c * c, sigma2, 1e-9);
    EXPECT_NEAR(obj, g.value, 1e-9);
    EXPECT_LE(g.value, lemma_opt_value(alpha, c, sigma2) + 1e-9);
    EXPECT_NEAR(g.value, lemma_opt_value(alpha, c, sigma2), 1e-4);
  }
}

TEST(GlobalNull, M0Values) {
  EXPECT_EQ(global_null_m0(1000, 0.1, 0.1), 528);
  EXPECT_EQ(global_null_m0(100, 0.1, 0.1), 54);
  EXPECT_EQ(global_null_m0(10000, 0.1, 0.1), 5265);
  // Exact FDR c p / m0 increases toward q + c(1-q).
  double prev = 0;
  for (Index p : {100, 1000, 10000}) {
    double fdr = 0.1 * p / global_null_m0(p, 0.1, 0.1);
    EXPECT_GT(fdr, prev);
    EXPECT_LT(fdr, 0.19);
    prev = fdr;
  }
  RngStream rng(1, 0);
  EXPECT_THROW(adversarial_global_null(5, 0.9, 0.01, rng), DomainError);
}

// Kolmogorov-Smirnov statistic against Unif[0,1].
double ks_uniform(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
  return d;
}

TEST(GlobalNull, MarginalsAreUniform) {
  const int draws = 100000;
  std::vector<double> first(draws), last(draws);
  RngStream rng(2, 0);
  for (int r = 0; r < draws; ++r) {
    std::vector<double> p = adversarial_global_null(100, 0.1, 0.1, rng);
    ASSERT_EQ(p.size(), 100u);
    first[r] = p[0];
    last[r] = p[99];
  }
  const double critical = 1.628 / std::sqrt(double(draws));  // 1% level
  EXPECT_LT(ks_uniform(first), critical);
  EXPECT_LT(ks_uniform(last), critical);
}

TEST(GlobalNull, BranchStructure) {
  RngStream rng(3, 0);
  int branch_one = 0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> p = adversarial_global_null(100, 0.1, 0.1, rng);
    long low = std::count_if(p.begin(), p.end(), [](double v) { return v <= 0.1; });
    ASSERT_TRUE(low == 0 || low == 54);
    if (low) ++branch_one;
  }
  const double pi = 10.0 / 54.0;
  EXPECT_NEAR(branch_one / double(reps), pi, 4 * std::sqrt(pi * (1 - pi) / reps));
}

TEST(GlobalNull, MonteCarloFdrMatchesTwoPointValue) {
  AdversarialSpec spec;
  spec.p = 100;
  MonteCarloFdr mc = adversarial_fdr(spec, 4000, RngStream(4, 0), 1);
  EXPECT_EQ(mc.replicates, 4000);
  EXPECT_NEAR(mc.fdr, 10.0 / 54.0, 4 * mc.std_error);
  EXPECT_EQ(mc.power, 0.0);
  MonteCarloFdr again = adversarial_fdr(spec, 4000, RngStream(4, 0), 3);
  EXPECT_EQ(mc.fdr, again.fdr);
}

TEST(Exchangeable, DesignAtFeasibilityBoundary) {
  const double limit = 0.1 * 0.9 / (0.1 + 0.1 * 0.9);
  ExchangeableDesign d = exchangeable_design(10000, 0.1, 0.1, limit);
  EXPECT_NEAR(d.x1, 0.0, 1e-12);
  EXPECT_EQ(d.n_nonnull, 100);
  EXPECT_EQ(d.n_null, 9900);
  EXPECT_NEAR(d.pi1 + d.pi2, 1.0, 1e-15);
  ExchangeableDesign inner = exchangeable_design(10000, 0.1, 0.1, 0.05);
  EXPECT_GT(inner.x1, 0.0);
  EXPECT_NEAR(inner.pi1 * inner.x1 + inner.pi2 * inner.x2, 0.1, 1e-12);
  EXPECT_THROW(exchangeable_design(10000, 0.1, 0.1, limit * 1.01), DomainError);
  EXPECT_THROW(exchangeable_design(3, 0.1, 0.1, 0.0), DomainError);
}

TEST(Exchangeable, NullIndicatorCorrelationBelowRho) {
  const Index p = 400;
  const double rho = 0.05;
  const int reps = 6000;
  RngStream rng(5, 0);
  // Pool correlations over a few null pairs.
  std::vector<std::pair<int, int>> pairs{{20, 21}, {30, 200}, {100, 399}};
  double worst = -1;
  for (auto [i, j] : pairs) {
    double si = 0, sj = 0, sij = 0;
    RngStream pair_rng = rng.derive(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    for (int r = 0; r < reps; ++r) {
      AdversarialDraw d = adversarial_exchangeable_rho(p, 0.1, 0.1, rho, pair_rng);
      ASSERT_EQ(d.n_nonnull, 20);
      for (Index k = 0; k < d.n_nonnull; ++k) ASSERT_EQ(d.pvals[k], 0.0);
      double a = d.pvals[i] <= 0.1, b = d.pvals[j] <= 0.1;
      si += a;
      sj += b;
      sij += a * b;
    }
    const double mi = si / reps, mj = sj / reps;
    const double corr = (sij / reps - mi * mj) / std::sqrt(mi * (1 - mi) * mj * (1 - mj));
    worst = std::max(worst, corr);
  }
  EXPECT_LE(worst, rho + 3.0 / std::sqrt(double(reps)));
}

TEST(Exchangeable, NullMarginalsAreUniform) {
  RngStream rng(6, 0);
  std::vector<double> v;
  for (int r = 0; r < 20000; ++r) v.push_back(adversarial_exchangeable_rho(100, 0.1, 0.1, 0.05, rng).pvals[50]);
  EXPECT_LT(ks_uniform(v), 1.628 / std::sqrt(double(v.size())) + 0.01);
}

TEST(Exchangeable, MonteCarloFdrRunsWithZeroNonnullPValues) {
  AdversarialSpec spec;
  spec.kind = AdversarialKind::exchangeable_rho_sharp;
  spec.p = 400;
  spec.rho = 0.05;
  MonteCarloFdr mc = adversarial_fdr(spec, 500, RngStream(8, 0), 1);
  EXPECT_EQ(mc.replicates, 500);
  EXPECT_GT(mc.power, 0.9);
  EXPECT_GT(mc.fdr, 0.0);
  EXPECT_LE(mc.fdr, bound_exchangeable(0.1, 0.1).value + 4 * mc.std_error);
}

TEST(AdversarialSpec, Validation) {
  AdversarialSpec s;
  s.kind = AdversarialKind::exchangeable_rho_sharp;
  s.rho = 0.9;
  EXPECT_THROW(s.validate(), DomainError);
  EXPECT_EQ(adversarial_kind_from_string(to_string(AdversarialKind::exchangeable_rho_sharp)),
            AdversarialKind::exchangeable_rho_sharp);
  EXPECT_THROW(adversarial_kind_from_string("other"), ParseError);
}

TEST(AjEstimate, IndependentNullsSitAtC) {
  const Index p = 6, n = 40;
  GaussianModel model = GaussianModel::block(p, 1, 0.0);
  Vector beta = Vector::Zero(p);
  CrtConfig cfg;
  cfg.statistic = AbsCorrelation{};
  AjEstimateConfig settings;
  settings.m_inner = 500;
  settings.m_outer = 4;
  AjEstimate est = estimate_aj(model, beta, 1.0, Vector(), n, cfg, settings, RngStream(7, 0), 1);
  ASSERT_EQ(est.max_aj.size(), 4u);
  ASSERT_EQ(est.all_aj.size(), 24u);
  EXPECT_EQ(est.empty_cells, 0);
  const double se = std::sqrt(0.3 * 0.7 / settings.m_inner);
  double mean = std::accumulate(est.all_aj.begin(), est.all_aj.end(), 0.0) / est.all_aj.size();
  EXPECT_LE(mean, 0.3 + 3 * se / std::sqrt(24.0));
  for (double a : est.all_aj) EXPECT_LE(a, 0.3 + 4 * se);
  AjEstimate again = estimate_aj(model, beta, 1.0, Vector(), n, cfg, settings, RngStream(7, 0), 2);
  EXPECT_EQ(est.all_aj, again.all_aj);
}

}  // namespace
}  // namespace seqcrt
