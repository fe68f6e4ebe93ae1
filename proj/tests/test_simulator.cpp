#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "dagot/collapse.hpp"
#include "dagot/simulator.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace dagot {
namespace {

using testing::dag_ex;
using testing::make_costed;
using testing::node_collapse;
using testing::random_task;

TEST(Simulate, MakespanByCoreCount) {
  Task t = dag_ex();
  EXPECT_DOUBLE_EQ(simulate(t.graph, 1).makespan, 70.0);
  EXPECT_DOUBLE_EQ(simulate(t.graph, 2).makespan, 60.0);
  EXPECT_DOUBLE_EQ(simulate(t.graph, 3).makespan, 60.0);  // only two-wide
}

TEST(Simulate, DeterministicTraceOnTwoCores) {
  Task t = dag_ex();
  SimTrace tr = simulate(t.graph, 2);
  ASSERT_EQ(tr.events.size(), 8u);

  struct Expect {
    double time;
    int core;
    NodeId node;
    bool start;
  };
  const Expect want[] = {
      {0, 0, 0, true},  {20, 0, 0, false}, {20, 0, 1, true}, {20, 1, 2, true},
      {30, 1, 2, false}, {40, 0, 1, false}, {40, 0, 3, true}, {60, 0, 3, false},
  };
  for (size_t i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(tr.events[i].time, want[i].time) << "event " << i;
    EXPECT_EQ(tr.events[i].core, want[i].core) << "event " << i;
    EXPECT_EQ(tr.events[i].node, want[i].node) << "event " << i;
    EXPECT_EQ(tr.events[i].start, want[i].start) << "event " << i;
  }
  ASSERT_EQ(tr.per_core_busy.size(), 2u);
  EXPECT_DOUBLE_EQ(tr.per_core_busy[0], 60.0);
  EXPECT_DOUBLE_EQ(tr.per_core_busy[1], 10.0);
  EXPECT_DOUBLE_EQ(measure_workload(tr), 70.0);
}

TEST(Simulate, FinishesPrecedeStartsAtEqualTimes) {
  Task t = dag_ex();
  SimTrace tr = simulate(t.graph, 2);
  for (size_t i = 1; i < tr.events.size(); ++i) {
    EXPECT_GE(tr.events[i].time, tr.events[i - 1].time);
    if (tr.events[i].time == tr.events[i - 1].time) {
      // once a start appears at an instant, no finish may follow it
      EXPECT_FALSE(tr.events[i - 1].start && !tr.events[i].start);
    }
  }
}

TEST(Simulate, DownstreamTieBreakPrefersLongerRemainingPath) {
  Task t = dag_ex();
  SimTrace tr = simulate(t.graph, 1);
  // after the source, u (remaining 40) beats v (remaining 30)
  ASSERT_GE(tr.events.size(), 3u);
  EXPECT_TRUE(tr.events[2].start);
  EXPECT_EQ(tr.events[2].node, 1);
}

TEST(Simulate, RandomTieBreakCoversBothOrders) {
  Task t = dag_ex();
  std::set<NodeId> picked;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    SimConfig cfg;
    cfg.tie_break = TieBreak::random;
    cfg.seed = seed;
    SimTrace tr = simulate(t.graph, 1, cfg);
    EXPECT_DOUBLE_EQ(tr.makespan, 70.0);  // one core serializes regardless
    picked.insert(tr.events[2].node);
  }
  EXPECT_EQ(picked, (std::set<NodeId>{1, 2}));
}

TEST(Simulate, SameSeedSameTrace) {
  Task t = dag_ex();
  SimConfig cfg;
  cfg.tie_break = TieBreak::random;
  cfg.seed = 7;
  cfg.early_floor = 0.5;
  SimTrace a = simulate(t.graph, 2, cfg);
  SimTrace b = simulate(t.graph, 2, cfg);
  ASSERT_EQ(a.events.size(), b.events.size());
  for (size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.events[i].time, b.events[i].time);
    EXPECT_EQ(a.events[i].node, b.events[i].node);
    EXPECT_EQ(a.events[i].core, b.events[i].core);
  }
  EXPECT_DOUBLE_EQ(a.makespan, b.makespan);
}

TEST(Simulate, SkipsCollapsedNodes) {
  Task t = node_collapse();
  TaskGraph merged = collapse(t.graph, 1, 2);
  SimTrace tr = simulate(merged, 2);
  EXPECT_DOUBLE_EQ(tr.makespan, 35.0);  // chain 5 + 12 + 18
  EXPECT_EQ(tr.events.size(), 6u);      // three alive nodes
  for (const SimEvent& e : tr.events) EXPECT_NE(e.node, 2);
}

TEST(Simulate, EarlyCompletionShortensWork) {
  Task t = dag_ex();
  SimConfig cfg;
  cfg.early_floor = 0.5;
  cfg.seed = 3;
  SimTrace tr = simulate(t.graph, 2, cfg);
  // every duration is scaled by a factor in [0.5, 1), so strictly less work
  EXPECT_LT(measure_workload(tr), 70.0);
  EXPECT_GE(measure_workload(tr), 35.0 - 1e-9);
  EXPECT_LT(tr.makespan, 70.0);
  // the nominal Graham bound still holds under early completion
  EXPECT_TRUE(check_graham(tr, t.graph, 2));
}

TEST(Simulate, InputValidation) {
  Task t = dag_ex();
  EXPECT_THROW(simulate(t.graph, 0), std::invalid_argument);
  TaskGraph cyclic = make_costed({1, 1, 1, 1}, {{0, 1}, {1, 2}, {2, 1}, {2, 3}});
  EXPECT_THROW(simulate(cyclic, 2), structural_error);
}

TEST(Graham, BoundHoldsAcrossRandomGraphsAndCoreCounts) {
  Rng rng(909);
  for (int i = 0; i < 40; ++i) {
    Task t = random_task(rng);
    double L = critical_path(t.graph).length;
    double C = workload(t.graph);
    for (int m : {1, 2, 3, 5}) {
      for (TieBreak tb : {TieBreak::downstream, TieBreak::random}) {
        SimConfig cfg;
        cfg.tie_break = tb;
        cfg.seed = static_cast<uint64_t>(i);
        SimTrace tr = simulate(t.graph, m, cfg);
        EXPECT_TRUE(check_graham(tr, t.graph, m)) << "graph " << i << " m " << m;
        // no schedule beats the critical path or perfect speedup
        EXPECT_GE(tr.makespan, L - 1e-9);
        EXPECT_GE(tr.makespan, C / m - 1e-9);
        EXPECT_NEAR(measure_workload(tr), C, 1e-9);
      }
    }
  }
}

TEST(Graham, BoundHoldsUnderEarlyCompletion) {
  Rng rng(910);
  for (int i = 0; i < 25; ++i) {
    Task t = random_task(rng);
    for (int m : {1, 2, 4}) {
      SimConfig cfg;
      cfg.tie_break = i % 2 == 0 ? TieBreak::downstream : TieBreak::random;
      cfg.seed = static_cast<uint64_t>(i);
      cfg.early_floor = 0.4;
      SimTrace tr = simulate(t.graph, m, cfg);
      EXPECT_TRUE(check_graham(tr, t.graph, m)) << "graph " << i << " m " << m;
      EXPECT_LE(measure_workload(tr), workload(t.graph) + 1e-9);
    }
  }
}

}  // namespace
}  // namespace dagot
