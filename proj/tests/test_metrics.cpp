#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "dagot/metrics.hpp"
#include "fixtures.hpp"

namespace dagot {
namespace {

using testing::collapse_tables;
using testing::cp_reduction;

TEST(TaskMetrics, SideBranchMergeCostsNothingButSavesNoCore) {
  Task pre = collapse_tables();
  Task post{collapse(pre.graph, 4, 5), pre.period, pre.deadline};
  TaskMetrics m = task_metrics(pre, post);
  EXPECT_DOUBLE_EQ(m.C_pre, 52.0);
  EXPECT_DOUBLE_EQ(m.C_post, 50.0);
  EXPECT_DOUBLE_EQ(m.L_pre, 32.0);
  EXPECT_DOUBLE_EQ(m.L_post, 33.0);
  EXPECT_DOUBLE_EQ(m.m_real_pre, 2.5);
  EXPECT_NEAR(m.m_real_post, 17.0 / 7.0, 1e-12);
  EXPECT_EQ(m.m_pre, std::optional<int>(3));
  EXPECT_EQ(m.m_post, std::optional<int>(3));  // ceil(2.43) stays 3
  EXPECT_EQ(m.m_saved, std::optional<int>(0));
  EXPECT_DOUBLE_EQ(m.delta_C, 2.0);
  EXPECT_DOUBLE_EQ(m.delta_L, 1.0);
}

TEST(TaskMetrics, PathMergeSavesACore) {
  Task pre = collapse_tables();
  Task post{collapse(pre.graph, 2, 3), pre.period, pre.deadline};
  TaskMetrics m = task_metrics(pre, post);
  EXPECT_DOUBLE_EQ(m.C_post, 49.0);
  EXPECT_DOUBLE_EQ(m.L_post, 29.0);
  EXPECT_NEAR(m.m_real_post, 20.0 / 11.0, 1e-12);
  EXPECT_EQ(m.m_post, std::optional<int>(2));
  EXPECT_EQ(m.m_saved, std::optional<int>(1));
  EXPECT_DOUBLE_EQ(m.delta_C, 3.0);
  EXPECT_DOUBLE_EQ(m.delta_L, -3.0);
}

TEST(TaskMetrics, IdenticalGraphsYieldZeroDeltas) {
  Task t = collapse_tables();
  TaskMetrics m = task_metrics(t, t);
  EXPECT_EQ(m.m_saved, std::optional<int>(0));
  EXPECT_DOUBLE_EQ(m.delta_C, 0.0);
  EXPECT_DOUBLE_EQ(m.delta_L, 0.0);
}

TEST(TaskMetrics, InfeasiblePreLeavesSavingsUndefined) {
  Task pre = cp_reduction();
  Task post{collapse(pre.graph, 1, 2), pre.period, pre.deadline};
  TaskMetrics m = task_metrics(pre, post);
  EXPECT_FALSE(m.m_pre.has_value());
  EXPECT_EQ(m.m_post, std::optional<int>(1));
  EXPECT_FALSE(m.m_saved.has_value());
  EXPECT_FALSE(m.m_real_pre > 0.0);
  EXPECT_DOUBLE_EQ(m.m_real_post, 0.0);
  EXPECT_DOUBLE_EQ(m.delta_C, 10.0);
  EXPECT_DOUBLE_EQ(m.delta_L, -10.0);
}

ResultRow row(double target, Approach ap, bool sched, int m_high, int dm, double dc,
              double dch, double dl) {
  ResultRow r;
  r.target_util = target;
  r.approach = ap;
  r.schedulable = sched;
  r.m_high = m_high;
  r.delta_m = dm;
  r.delta_C = dc;
  r.delta_C_high = dch;
  r.delta_L = dl;
  return r;
}

TEST(Aggregate, BucketsByTargetUtilizationAndApproach) {
  std::vector<ResultRow> rows = {
      row(0.5, Approach::b_np, true, 2, 1, 3.0, 2.0, -1.0),
      row(2.0, Approach::b_np, false, 4, 0, 1.0, 1.0, 0.0),
      row(2.0, Approach::ot_g, true, 3, 2, 5.0, 4.0, -2.0),
      row(4.0, Approach::b_np, true, 6, 0, 0.0, 0.0, 0.0),
      row(7.9, Approach::b_np, false, 8, 0, 0.0, 0.0, 0.0),
  };
  std::vector<PointSummary> sums = aggregate(rows, 4.0);
  ASSERT_EQ(sums.size(), 3u);

  // sorted by bucket, then approach enum order
  EXPECT_DOUBLE_EQ(sums[0].bucket_lo, 0.0);
  EXPECT_DOUBLE_EQ(sums[0].bucket_hi, 4.0);
  EXPECT_EQ(sums[0].approach, Approach::b_np);
  EXPECT_EQ(sums[0].n, 2u);
  EXPECT_DOUBLE_EQ(sums[0].sched_ratio, 0.5);
  EXPECT_DOUBLE_EQ(sums[0].mean_cores, 3.0);
  EXPECT_DOUBLE_EQ(sums[0].mean_delta_m, 0.5);
  EXPECT_DOUBLE_EQ(sums[0].mean_delta_C, 2.0);
  EXPECT_DOUBLE_EQ(sums[0].mean_delta_C_high, 1.5);
  EXPECT_DOUBLE_EQ(sums[0].mean_delta_L, -0.5);

  EXPECT_DOUBLE_EQ(sums[1].bucket_lo, 0.0);
  EXPECT_EQ(sums[1].approach, Approach::ot_g);
  EXPECT_EQ(sums[1].n, 1u);

  EXPECT_DOUBLE_EQ(sums[2].bucket_lo, 4.0);
  EXPECT_DOUBLE_EQ(sums[2].bucket_hi, 8.0);
  EXPECT_EQ(sums[2].n, 2u);  // targets 4.0 and 7.9 share the bucket
  EXPECT_DOUBLE_EQ(sums[2].sched_ratio, 0.5);

  // row order must not matter
  std::vector<ResultRow> shuffled = {rows[4], rows[2], rows[0], rows[3], rows[1]};
  std::vector<PointSummary> again = aggregate(shuffled, 4.0);
  ASSERT_EQ(again.size(), sums.size());
  for (size_t i = 0; i < sums.size(); ++i) {
    EXPECT_DOUBLE_EQ(again[i].bucket_lo, sums[i].bucket_lo);
    EXPECT_EQ(again[i].approach, sums[i].approach);
    EXPECT_EQ(again[i].n, sums[i].n);
    EXPECT_DOUBLE_EQ(again[i].sched_ratio, sums[i].sched_ratio);
  }
}

TEST(Aggregate, CustomWidthAndValidation) {
  std::vector<ResultRow> rows = {
      row(0.5, Approach::b_p, true, 1, 0, 0, 0, 0),
      row(1.5, Approach::b_p, true, 1, 0, 0, 0, 0),
  };
  std::vector<PointSummary> sums = aggregate(rows, 1.0);
  ASSERT_EQ(sums.size(), 2u);
  EXPECT_DOUBLE_EQ(sums[0].bucket_lo, 0.0);
  EXPECT_DOUBLE_EQ(sums[0].bucket_hi, 1.0);
  EXPECT_DOUBLE_EQ(sums[1].bucket_lo, 1.0);
  EXPECT_THROW(aggregate(rows, 0.0), std::invalid_argument);
  EXPECT_THROW(aggregate(rows, -1.0), std::invalid_argument);
  EXPECT_TRUE(aggregate({}, 4.0).empty());
}

TEST(Csv, Formatters) {
  EXPECT_EQ(fmt_general(2.5), "2.5");
  EXPECT_EQ(fmt_general(-3.0), "-3");
  EXPECT_EQ(fmt_general(1.0 / 3.0), "0.333333333");  // nine significant digits
  EXPECT_EQ(fmt_general(123456789.0), "123456789");  // nine significant digits
  EXPECT_EQ(fmt_general(1000000000.0), "1e+09");     // ten switch to exponent form
  EXPECT_EQ(fmt_ratio(0.95), "0.950000");
  EXPECT_EQ(fmt_ratio(2.0 / 3.0), "0.666667");
  EXPECT_EQ(fmt_ms(1.25), "1.250");
  EXPECT_EQ(fmt_ms(0.0), "0.000");
}

TEST(Csv, ResultRowRendering) {
  EXPECT_STREQ(results_csv_header(),
               "set_id,cores,target_U,approach,schedulable,reason,m_high,delta_m,"
               "delta_C,delta_L,elapsed_ms");
  ResultRow r;
  r.set_id = 7;
  r.cores = 8;
  r.target_util = 2.5;
  r.approach = Approach::ot_l;
  r.schedulable = true;
  r.reason = Reason::ok;
  r.m_high = 5;
  r.delta_m = 2;
  r.delta_C = 12.5;
  r.delta_L = -3.0;
  r.elapsed_ms = 1.25;
  EXPECT_EQ(result_row_csv(r), "7,8,2.5,OT-L,1,ok,5,2,12.5,-3,1.250");

  ResultRow fail;
  fail.set_id = 0;
  fail.cores = 4;
  fail.target_util = 16.0;
  fail.approach = Approach::b_np;
  fail.schedulable = false;
  fail.reason = Reason::insufficient_cores;
  EXPECT_EQ(result_row_csv(fail), "0,4,16,B-NP,0,insufficient_cores,0,0,0,0,0.000");
}

TEST(Csv, SummaryRowRendering) {
  EXPECT_STREQ(summary_csv_header(),
               "bucket_lo,bucket_hi,approach,n,sched_ratio,mean_cores,mean_delta_m,"
               "mean_delta_C,mean_delta_C_high,mean_delta_L");
  PointSummary s;
  s.bucket_lo = 4.0;
  s.bucket_hi = 8.0;
  s.approach = Approach::ot_g;
  s.n = 20;
  s.sched_ratio = 0.95;
  s.mean_cores = 3.25;
  s.mean_delta_m = 0.5;
  s.mean_delta_C = 2.25;
  s.mean_delta_C_high = 1.5;
  s.mean_delta_L = -0.75;
  EXPECT_EQ(summary_row_csv(s), "4,8,OT-G,20,0.950000,3.250000,0.500000,2.25,1.5,-0.75");
}

}  // namespace
}  // namespace dagot
