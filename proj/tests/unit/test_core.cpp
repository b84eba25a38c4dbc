#include "seqcrt/parallel.hpp"
#include "seqcrt/rng.hpp"
#include "seqcrt/types.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>

namespace seqcrt {
namespace {

TEST(RngStream, SameSeedAndStreamReplay) {
  RngStream a(7, 3), b(7, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DistinctStreamsAreUncorrelated) {
  RngStream a(7, 3), b(7, 4);
  const int n = 100000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    double u = a.uniform(), v = b.uniform();
    sa += u, sb += v, saa += u * u, sbb += v * v, sab += u * v;
  }
  double cov = sab / n - (sa / n) * (sb / n);
  double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::abs(corr), 0.02);
}

TEST(RngStream, UniformStaysInUnitInterval) {
  RngStream r(11, 0);
  for (int i = 0; i < 1000000; ++i) {
    double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStream, DeriveIsPureAndDoesNotAdvance) {
  RngStream r(5, 9);
  RngStream c1 = r.derive(42);
  r.next_u64();
  RngStream c2 = RngStream(5, 9).derive(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(c1.next_u64(), c2.next_u64());
  EXPECT_NE(RngStream(5, 9).derive(1).next_u64(), RngStream(5, 9).derive(2).next_u64());
}

TEST(RngStream, NormalMoments) {
  RngStream r(1, 1);
  const int n = 200000;
  double s = 0, ss = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = r.normal();
    s += z, ss += z * z, s4 += z * z * z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(ss / n, 1.0, 0.015);
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(RngStream, BelowIsUniform) {
  RngStream r(3, 0);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[r.below(7)];
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 16.81);  // 99% quantile, 6 degrees of freedom
}

TEST(RngStream, SampleWithoutReplacementIsDistinct) {
  RngStream r(2, 2);
  auto s = r.sample_without_replacement(50, 20);
  ASSERT_EQ(s.size(), 20u);
  std::set<int> uniq(s.begin(), s.end());
  EXPECT_EQ(uniq.size(), 20u);
  EXPECT_GE(*uniq.begin(), 0);
  EXPECT_LT(*uniq.rbegin(), 50);
}

TEST(RngStream, ShuffleIsPermutation) {
  RngStream r(2, 3);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  r.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(PValueRecord, IntegerRankThreshold) {
  // c(B+1) = 1 exactly at c = 0.1, B = 9 although 0.1 * 10 is computed in floating point.
  PValueRecord r{1, 9, 0.0, 1};
  EXPECT_DOUBLE_EQ(r.pvalue(), 0.1);
  EXPECT_TRUE(r.at_most(0.1));
  r.rank = 2;
  EXPECT_FALSE(r.at_most(0.1));
  // Non-integral c(B+1) = 1.5: only rank 1 qualifies.
  r.rank = 1;
  EXPECT_TRUE(r.at_most(0.15));
  r.rank = 2;
  EXPECT_FALSE(r.at_most(0.15));
  // c = 0.3, B = 19: c(B+1) = 6.
  PValueRecord s{6, 19, 0.0, 1};
  EXPECT_TRUE(s.at_most(0.3));
  s.rank = 7;
  EXPECT_FALSE(s.at_most(0.3));
}

TEST(Dataset, ValidateRejectsBadShapes) {
  Dataset d;
  d.x = Matrix::Zero(1, 2);
  d.y = Vector::Zero(1);
  EXPECT_THROW(d.validate(), DomainError);
  d.x = Matrix::Zero(3, 2);
  d.y = Vector::Zero(2);
  EXPECT_THROW(d.validate(), DomainError);
  d.y = Vector::Zero(3);
  EXPECT_NO_THROW(d.validate());
  d.response_kind = ResponseKind::binary;
  d.y[1] = 0.5;
  EXPECT_THROW(d.validate(), DomainError);
}

TEST(SeqStepParams, ValidateRange) {
  EXPECT_NO_THROW((SeqStepParams{0.1, 0.1}.validate()));
  EXPECT_THROW((SeqStepParams{0.0, 0.1}.validate()), DomainError);
  EXPECT_THROW((SeqStepParams{0.1, 1.0}.validate()), DomainError);
}

TEST(ParallelFor, ResultsIndependentOfWorkerCount) {
  auto run = [](int workers) {
    std::vector<std::uint64_t> out(257);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = RngStream(9, 0).derive(i).next_u64(); },
                 workers);
    return out;
  };
  EXPECT_EQ(run(1), run(4));
}

TEST(ParallelFor, RethrowsAfterAllIndicesRun) {
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(
                   100,
                   [&](std::size_t i) {
                     ++done;
                     if (i == 17) throw DomainError("boom");
                   },
                   3),
               DomainError);
  EXPECT_EQ(done.load(), 100);
}

TEST(Errors, ParseErrorCarriesLine) {
  ParseError e("bad value", 12);
  EXPECT_EQ(e.line(), 12u);
  EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos);
}

}  // namespace
}  // namespace seqcrt
