#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <vector>

#include "pec/metrics.hpp"
#include "pec/rng.hpp"

using namespace pec;

TEST_CASE("success rate") {
  RunMetrics m;
  for (int i = 0; i < 10; ++i) m.record_generated(TaskType::SRT);
  for (int i = 0; i < 5; ++i) m.record_success(TaskType::SRT, 1.0, 0.0, 1.0, Attribution::Baseline);
  CHECK(success_rate(m, TaskType::SRT) == doctest::Approx(0.5));
  CHECK_FALSE(success_rate(m, TaskType::HRT));
  CHECK_FALSE(average_delay(m, TaskType::HRT));
}

TEST_CASE("average delay counts failures in the sum and all generated tasks in the denominator") {
  RunMetrics m;
  for (int i = 0; i < 4; ++i) m.record_generated(TaskType::HRT);
  m.record_success(TaskType::HRT, 4.0, 1.0, 5.0, Attribution::Baseline);
  m.record_success(TaskType::HRT, 4.0, 1.0, 5.0, Attribution::Baseline);
  m.record_failure(TaskType::HRT, FailureReason::DeadlineMissed, 10.0, 5.0, 5.0);
  m.record_failure(TaskType::HRT, FailureReason::NoAvailableResources, 0.0, 0.0, 0.0);
  // (10 + 10 + 20 + 0) / 4
  CHECK(average_delay(m, TaskType::HRT) == doctest::Approx(10.0));
  CHECK(m.of(TaskType::HRT).total_failed() == 2);
}

TEST_CASE("excluded tasks leave the denominator") {
  RunMetrics m;
  m.record_generated(TaskType::NRT);
  m.record_generated(TaskType::NRT);
  m.record_excluded(TaskType::NRT);
  m.record_success(TaskType::NRT, 0.0, 0.0, 10.0, Attribution::Baseline);
  CHECK(success_rate(m, TaskType::NRT) == 1.0);
  CHECK(m.of(TaskType::NRT).excluded == 1);
}

TEST_CASE("attribution rules") {
  Task t;
  t.type = TaskType::HRT;
  CHECK(attribute_success(t) == Attribution::Baseline);
  t.jumped_queue = true;
  CHECK(attribute_success(t) == Attribution::Priority);
  t.reallocations = 1;
  CHECK(attribute_success(t) == Attribution::Reallocation);
  t.via_fallback = true;
  CHECK(attribute_success(t) == Attribution::EdgeServerFallback);

  Task s;
  s.type = TaskType::SRT;
  s.jumped_queue = true;
  CHECK(attribute_success(s) == Attribution::Baseline);
  for (std::size_t i = 0; i < kAttributionCount; ++i) {
    const auto a = static_cast<Attribution>(i);
    CHECK(parse_attribution(to_string(a)) == a);
  }
}

TEST_CASE("describe") {
  std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  const auto s = describe(v);
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.stddev == doctest::Approx(2.1380899));
  CHECK(s.min == 2.0);
  CHECK(s.max == 9.0);
  CHECK(s.n == 8);
  std::vector<double> one{3.0};
  CHECK(describe(one).stddev == 0.0);
  CHECK_THROWS(describe(std::vector<double>{}));
}

TEST_CASE("aggregate over runs") {
  std::vector<RunMetrics> runs(2);
  for (int i = 0; i < 10; ++i) runs[0].record_generated(TaskType::SRT);
  for (int i = 0; i < 6; ++i) runs[0].record_success(TaskType::SRT, 0, 0, 1, Attribution::Baseline);
  for (int i = 0; i < 10; ++i) runs[1].record_generated(TaskType::SRT);
  for (int i = 0; i < 8; ++i) runs[1].record_success(TaskType::SRT, 0, 0, 1, Attribution::Reallocation);
  runs[1].record_reallocation(TaskType::SRT, ReallocationReason::Mobility);
  const auto s = aggregate(runs);
  CHECK(s.runs == 2);
  const auto& srt = s.by_type[index_of(TaskType::SRT)];
  REQUIRE(srt.success_rate);
  CHECK(srt.success_rate->mean == doctest::Approx(0.7));
  CHECK_FALSE(s.by_type[index_of(TaskType::HRT)].success_rate);
  CHECK(s.mean_reallocations[index_of(ReallocationReason::Mobility)] == doctest::Approx(0.5));
  CHECK(s.attribution_share[0] == doctest::Approx(6.0 / 14.0));
  CHECK(s.attribution_share[static_cast<std::size_t>(Attribution::Reallocation)] == doctest::Approx(8.0 / 14.0));
  CHECK_THROWS(aggregate(std::vector<RunMetrics>{}));
}

TEST_CASE("csv rows") {
  CHECK(kCsvHeader ==
        "scenario,policy,seed,task_type,generated,succeeded,failed_deadline,failed_mobility,failed_incompatible,"
        "failed_no_resources,failed_dead_device,realloc_mobility,realloc_incompatible,realloc_power,avg_delay_ms,"
        "success_rate");
  RunMetrics m;
  m.record_generated(TaskType::HRT);
  m.record_generated(TaskType::HRT);
  m.record_success(TaskType::HRT, 5.0, 0.0, 5.0, Attribution::Baseline);
  m.record_failure(TaskType::HRT, FailureReason::Mobility, 1.0, 0.0, 0.0);
  m.record_reallocation(TaskType::HRT, ReallocationReason::InsufficientPower);
  std::ostringstream out;
  write_csv_rows(out, "pec50", "r-adworch", 3, m);
  CHECK(out.str() ==
        "pec50,r-adworch,3,HRT,2,1,0,1,0,0,0,0,0,1,5.5,0.5\n"
        "pec50,r-adworch,3,SRT,0,0,0,0,0,0,0,0,0,0,,\n"
        "pec50,r-adworch,3,NRT,0,0,0,0,0,0,0,0,0,0,,\n");
}

TEST_CASE("folding a trace gives the same metrics as direct recording") {
  Rng rng(21);
  RunMetrics direct;
  TraceMetricsFold fold;
  const char* tags[] = {"Baseline", "Priority", "Reallocation", "DelayPenaltyShaping", "EdgeServerFallback"};
  for (int i = 0; i < 3000; ++i) {
    const auto t = static_cast<TaskType>(rng.index(3));
    const std::string type = "type=" + std::string(to_string(t));
    direct.record_generated(t);
    fold.record({0.0, TraceKind::TaskGenerated, i, 0, type + " tag=0"});
    fold.record({0.0, TraceKind::Routed, i, 0, type + " decision=offload"});
    if (rng.bernoulli(0.2)) {
      const auto r = static_cast<ReallocationReason>(rng.index(3));
      direct.record_reallocation(t, r);
      fold.record({1.0, TraceKind::Reallocated, i, 0, type + " reason=" + std::string(to_string(r)) + " to=server"});
    }
    const double net = rng.uniform(0, 100), wait = rng.uniform(0, 100), exec = rng.uniform(0, 100);
    const std::string times = " net=" + format_number(net) + " wait=" + format_number(wait) + " exec=" +
                              format_number(exec);
    const double u = rng.uniform01();
    if (u < 0.6) {
      const auto a = static_cast<Attribution>(rng.index(5));
      direct.record_success(t, net, wait, exec, a);
      fold.record({2.0, TraceKind::Succeeded, i, 0, type + " tag=" + tags[static_cast<std::size_t>(a)] + times});
    } else if (u < 0.9) {
      const auto f = static_cast<FailureReason>(rng.index(5));
      direct.record_failure(t, f, net, wait, exec);
      fold.record({2.0, TraceKind::Failed, i, 0, type + " reason=" + std::string(to_string(f)) + times});
    } else {
      direct.record_excluded(t);
      fold.record({2.0, TraceKind::Excluded, i, -1, type});
    }
  }
  CHECK(fold.metrics() == direct);
  TraceMetricsFold bad;
  CHECK_THROWS(bad.record({0.0, TraceKind::TaskGenerated, 0, 0, ""}));
}
