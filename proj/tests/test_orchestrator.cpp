#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "pec/orchestrator.hpp"

using namespace pec;

namespace {

Task hrt() {
  Task t;
  t.type = TaskType::HRT;
  t.size_mi = 200.0;
  t.latency_budget_ms = 15.0;
  return t;
}

DeviceState device(DeviceId id, DeviceKind kind, double charge = 1.0) {
  DeviceState d;
  d.id = id;
  d.spec = default_spec(kind);
  d.battery_wh = d.spec.battery_capacity_wh * charge;
  if (d.spec.cpu_cores > 0) d.processor = Processor(d.spec.cpu_cores, false);
  return d;
}

}  // namespace

TEST_CASE("observation of an HRT task on an idle laptop") {
  auto d = device(0, DeviceKind::Laptop, 0.6);
  const auto obs = build_observation(hrt(), d);
  CHECK(obs.load == 0.0);
  CHECK(obs.expected_exec_s * 1000.0 == doctest::Approx(200.0 / 110.0));
  REQUIRE(obs.battery_fraction);
  CHECK(*obs.battery_fraction == doctest::Approx(0.6));
  CHECK(obs.cpu_cores == 8);

  const auto gw = build_observation(hrt(), device(1, DeviceKind::Gateway));
  CHECK_FALSE(gw.battery_fraction);
  CHECK(fuzzify(gw).battery == Level::Mains);
}

TEST_CASE("observed load follows the live queue") {
  auto gw = device(0, DeviceKind::Gateway);
  for (TaskId i = 0; i < 17; ++i) gw.processor.enqueue({i, TaskType::NRT, 10.0, false}, 0.0);
  gw.processor.fill_free_cores(0.0);  // 4 start, 13 wait
  CHECK(build_observation(hrt(), gw).load == doctest::Approx(3.25));
}

TEST_CASE("sensors and absent devices are not candidates") {
  auto s = device(0, DeviceKind::StationarySensor);
  CHECK_THROWS_AS(build_observation(hrt(), s), NotACandidateError);
  auto p = device(1, DeviceKind::Smartphone);
  p.present = false;
  CHECK_THROWS_AS(build_observation(hrt(), p), NotACandidateError);
}

TEST_CASE("fuzzy levels") {
  FuzzyConfig c;
  CHECK(fuzzy_level(0.0, c.load) == Level::Low);
  CHECK(fuzzy_level(0.95, c.exec_ratio) == Level::High);
  CHECK(fuzzy_level(5.0, c.load) == Level::High);
  // Exactly between two peaks: the lower level wins.
  CHECK(fuzzy_level(0.5, c.load) == Level::Low);
  CHECK(fuzzy_level(0.25, c.exec_ratio) == Level::Low);
  CHECK(fuzzy_level(0.26, c.exec_ratio) == Level::Medium);
  CHECK(fuzzy_level(0.1, c.battery) == Level::Low);
  CHECK(fuzzy_level(0.8, c.battery) == Level::High);
}

TEST_CASE("memberships are exhaustive and the chosen level is unique") {
  FuzzyConfig c;
  Rng rng(4);
  for (const Membership* m : {&c.load, &c.exec_ratio, &c.battery}) {
    for (int i = 0; i < 2000; ++i) {
      const double x = rng.uniform(-1.0, 4.0);
      const auto mu = memberships(x, *m);
      double sum = 0.0;
      for (double v : mu) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0));
      const auto level = fuzzy_level(x, *m);
      const auto li = static_cast<std::size_t>(level);
      for (std::size_t k = 0; k < 3; ++k) {
        if (k < li) CHECK(mu[k] < mu[li]);
        if (k > li) CHECK(mu[k] <= mu[li]);
      }
    }
  }
}

TEST_CASE("state index is a bijection over the 432 states") {
  std::vector<bool> seen(kFuzzyStateCount, false);
  for (auto t : kTaskTypes) {
    for (int load = 0; load < 3; ++load) {
      for (int exec = 0; exec < 3; ++exec) {
        for (int bat = 0; bat < 4; ++bat) {
          for (bool tm : {false, true}) {
            for (bool rm : {false, true}) {
              FuzzyObservation f{t, tm, rm, Level(load), Level(exec), Level(bat)};
              const auto i = f.index();
              REQUIRE(i < kFuzzyStateCount);
              CHECK_FALSE(seen[i]);
              seen[i] = true;
              CHECK(FuzzyObservation::from_index(i) == f);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("reward values") {
  for (auto t : kTaskTypes) CHECK(reward(true, t, 0.0, 15.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(reward(false, TaskType::HRT, 30.0, 15.0) == doctest::Approx(-6.0).epsilon(1e-9));
  CHECK(reward(true, TaskType::SRT, 250.0, 500.0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(reward(false, TaskType::NRT, 30000.0, 30000.0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_THROWS(reward(true, TaskType::HRT, 1.0, 0.0));
}

TEST_CASE("reward weight ordering and monotonicity") {
  RewardWeights w;
  CHECK(w.hrt == 3.0);
  CHECK(w.srt == 1.5);
  CHECK(w.nrt == 1.0);
  CHECK(w.of(TaskType::HRT) > w.of(TaskType::SRT));
  CHECK(w.of(TaskType::SRT) > w.of(TaskType::NRT));
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const double budget = rng.uniform(1.0, 1000.0);
    const double d1 = rng.uniform(0.0, 2000.0);
    const double d2 = d1 + rng.uniform(0.001, 100.0);
    for (bool ok : {false, true}) {
      for (auto t : kTaskTypes) CHECK(reward(ok, t, d2, budget) < reward(ok, t, d1, budget));
    }
    const double dp = rng.uniform(0.01, 3.0);
    const double pen_h = 1.0 - reward(true, TaskType::HRT, dp * budget, budget);
    const double pen_s = 1.0 - reward(true, TaskType::SRT, dp * budget, budget);
    const double pen_n = 1.0 - reward(true, TaskType::NRT, dp * budget, budget);
    CHECK(pen_h > pen_s);
    CHECK(pen_s > pen_n);
  }
  const auto u = RewardWeights::unweighted();
  CHECK(reward(false, TaskType::HRT, 30.0, 15.0, u) == doctest::Approx(-2.0));
}

TEST_CASE("q update") {
  QTable t;
  FuzzyObservation s;
  t.update(s, Action::Assign, 1.0, 0.1);
  CHECK(t.at(s, Action::Assign).q == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(t.at(s, Action::Assign).visits == 1);
  CHECK(t.at(s, Action::Reject).visits == 0);

  QTable fixed;
  fixed.update(s, Action::Assign, 0.7, 1.0);
  const auto before = fixed.at(s, Action::Assign).q;
  fixed.update(s, Action::Assign, 0.7, 0.1);
  CHECK(fixed.at(s, Action::Assign).q == before);

  QTable conv;
  double prev = 0.0;
  for (int i = 0; i < 300; ++i) {
    conv = q_update(conv, s, Action::Assign, -6.0, 0.1);
    const double q = conv.at(s, Action::Assign).q;
    CHECK(q < prev);
    CHECK(q >= -6.0);
    // Closed form of the geometric series.
    CHECK(q == doctest::Approx(-6.0 * (1.0 - std::pow(0.9, i + 1))).epsilon(1e-9));
    prev = q;
  }
}

TEST_CASE("q update contracts towards the reward") {
  Rng rng(12);
  FuzzyObservation s;
  for (int i = 0; i < 1000; ++i) {
    QTable t;
    const double q0 = rng.uniform(-7.0, 1.0);
    t.update(s, Action::Assign, q0, 1.0);
    const double r = rng.uniform(-7.0, 1.0);
    const double alpha = rng.uniform(0.01, 1.0);
    t.update(s, Action::Assign, r, alpha);
    CHECK(std::abs(t.at(s, Action::Assign).q - r) == doctest::Approx((1.0 - alpha) * std::abs(q0 - r)));
  }
}

TEST_CASE("q values stay within the reward range") {
  Rng rng(13);
  QTable t;
  const double w_max = 3.0;
  const double dp_max = 4.0;
  for (int i = 0; i < 20000; ++i) {
    const auto state = static_cast<std::uint16_t>(rng.index(kFuzzyStateCount));
    const bool ok = rng.bernoulli(0.5);
    const double r = reward(ok, TaskType::HRT, rng.uniform(0.0, dp_max * 15.0), 15.0);
    t.update(state, Action::Assign, r, rng.uniform(0.01, 1.0));
    const double q = t.at(state, Action::Assign).q;
    CHECK(q <= 1.0);
    CHECK(q >= -(1.0 + w_max * dp_max));
  }
}

TEST_CASE("reliability classification") {
  QTable t;
  FuzzyObservation s;
  auto cold = classify_reliability(t, s, 0.0, 5);
  CHECK(cold.reliable);
  CHECK(cold.score == 0.0);

  QTable bad;
  for (int i = 0; i < 10; ++i) bad.update(s, Action::Assign, -2.0, 1.0);
  CHECK_FALSE(classify_reliability(bad, s, 0.0, 5).reliable);
  CHECK(classify_reliability(bad, s, -3.0, 5).reliable);

  // Always-succeeding device whose results come back at 60% of the budget.
  QTable good;
  for (int i = 0; i < 200; ++i) {
    good.update(s, Action::Assign, reward(true, TaskType::SRT, 300.0, 500.0, RewardWeights::unweighted()), 0.1);
  }
  const auto r = classify_reliability(good, s, 0.0, 5);
  CHECK(r.reliable);
  CHECK(r.score == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("selection: argmax, tie-breaks, and no reliable candidate") {
  auto laptop = device(0, DeviceKind::Laptop);
  auto gateway = device(1, DeviceKind::Gateway);
  const auto task = hrt();
  const auto sl = fuzzify(build_observation(task, laptop)).index();
  const auto sg = fuzzify(build_observation(task, gateway)).index();
  REQUIRE(sl != sg);
  std::vector<const DeviceState*> both{&gateway, &laptop};
  Rng rng(1);
  SelectionParams greedy;

  QTable t;
  t.update(sl, Action::Assign, 0.1, 1.0);
  t.update(sg, Action::Assign, 0.4, 1.0);
  auto pick = select_device(task, both, t, greedy, rng);
  REQUIRE(pick);
  CHECK(pick->device == 1);
  CHECK(pick->score == doctest::Approx(0.4));
  CHECK(pick->reliable_count == 2);

  // Equal scores: the faster device (1.8 ms laptop over 12.5 ms gateway).
  QTable equal;
  auto tie = select_device(task, both, equal, greedy, rng);
  REQUIRE(tie);
  CHECK(tie->device == 0);
  CHECK(tie->expected_exec_s * 1000.0 == doctest::Approx(200.0 / 110.0));

  // Identical devices: lowest id.
  auto laptop2 = device(7, DeviceKind::Laptop);
  std::vector<const DeviceState*> twins{&laptop2, &laptop};
  CHECK(select_device(task, twins, equal, greedy, rng)->device == 0);

  QTable bad;
  for (auto s : {sl, sg}) bad.update(s, Action::Assign, -1.0, 1.0);
  CHECK_FALSE(select_device(task, both, bad, greedy, rng));
  CHECK_FALSE(select_device(task, {}, equal, greedy, rng));
}

TEST_CASE("greedy choice is invariant to positive rescaling of scores") {
  Rng rng(30);
  const auto task = hrt();
  std::vector<DeviceState> devs;
  for (DeviceId i = 0; i < 3; ++i) devs.push_back(device(i, DeviceKind::Laptop));
  devs.push_back(device(3, DeviceKind::Smartphone));
  devs.push_back(device(4, DeviceKind::Gateway));
  devs[1].battery_wh = devs[1].spec.battery_capacity_wh * 0.3;
  devs[2].processor.enqueue({0, TaskType::NRT, 1.0, false}, 0.0);
  std::vector<const DeviceState*> cands;
  for (auto& d : devs) cands.push_back(&d);
  SelectionParams greedy;
  greedy.threshold = -1e9;
  for (int trial = 0; trial < 200; ++trial) {
    QTable a;
    QTable b;
    const double k = rng.uniform(0.1, 10.0);
    for (auto* d : cands) {
      const auto s = fuzzify(build_observation(task, *d)).index();
      const double q = rng.uniform(-1.0, 1.0);
      a.update(s, Action::Assign, q, 1.0);
      b.update(s, Action::Assign, k * q, 1.0);
    }
    Rng r1(1);
    Rng r2(1);
    CHECK(select_device(task, cands, a, greedy, r1)->device == select_device(task, cands, b, greedy, r2)->device);
  }
}

TEST_CASE("exploration only picks reliable candidates") {
  auto laptop = device(0, DeviceKind::Laptop);
  auto gateway = device(1, DeviceKind::Gateway);
  auto phone = device(2, DeviceKind::Smartphone);
  const auto task = hrt();
  QTable t;
  t.update(fuzzify(build_observation(task, gateway)).index(), Action::Assign, -1.0, 1.0);
  std::vector<const DeviceState*> cands{&laptop, &gateway, &phone};
  SelectionParams explore;
  explore.epsilon = 1.0;
  Rng rng(2);
  int seen[3] = {0, 0, 0};
  for (int i = 0; i < 3000; ++i) {
    auto pick = select_device(task, cands, t, explore, rng);
    REQUIRE(pick);
    CHECK(pick->explored);
    ++seen[pick->device];
  }
  CHECK(seen[1] == 0);
  CHECK(seen[0] > 1300);
  CHECK(seen[2] > 1300);
}

TEST_CASE("per-type reliability bar and epsilon schedule") {
  Orchestrator robust({}, RewardWeights{}, Rng(1));
  CHECK(robust.threshold_for(TaskType::HRT) == doctest::Approx(-2.0));
  CHECK(robust.threshold_for(TaskType::SRT) == doctest::Approx(-0.5));
  CHECK(robust.threshold_for(TaskType::NRT) == doctest::Approx(0.0));
  Orchestrator base({}, RewardWeights::unweighted(), Rng(1));
  for (auto t : kTaskTypes) CHECK(base.threshold_for(t) == 0.0);
  CHECK(base.epsilon(0.0) == doctest::Approx(0.3));
  CHECK(base.epsilon(1.0) == doctest::Approx(0.02));
  CHECK(base.epsilon(0.5) == doctest::Approx(0.16));
  CHECK(base.epsilon(7.0) == doctest::Approx(0.02));
}

TEST_CASE("two-device world: learning settles on the device that always succeeds") {
  // The smartphone wins greedy ties against the gateway (shorter expected
  // execution), so the orchestrator must learn its way to the gateway.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (auto weights : {RewardWeights::unweighted(), RewardWeights{}}) {
      auto good = device(0, DeviceKind::Gateway);
      auto bad = device(1, DeviceKind::Smartphone);
      std::vector<const DeviceState*> cands{&good, &bad};
      Orchestrator orch({}, weights, Rng(seed, Stream::Policy));
      Task task;
      task.type = TaskType::SRT;
      task.size_mi = 5000.0;
      task.latency_budget_ms = 500.0;
      const int decisions = 200;
      int greedy_good = 0;
      int greedy_total = 0;
      for (int i = 0; i < decisions; ++i) {
        auto pick = orch.select(task, cands, static_cast<double>(i) / decisions);
        REQUIRE(pick);
        const bool ok = pick->device == 0;
        orch.learn(pick->state, ok, task, ok ? 320.0 : 200.0);
        if (i >= decisions / 2 && !pick->explored) {
          ++greedy_total;
          greedy_good += ok ? 1 : 0;
        }
      }
      REQUIRE(greedy_total > 0);
      CHECK(static_cast<double>(greedy_good) / greedy_total >= 0.95);
    }
  }
}

TEST_CASE("q-table text round trip") {
  QTable t;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    t.update(static_cast<std::uint16_t>(rng.index(kFuzzyStateCount)), rng.bernoulli(0.5) ? Action::Assign : Action::Reject,
             rng.uniform(-6.0, 1.0), 0.1);
  }
  std::stringstream ss;
  t.save(ss);
  const auto back = QTable::load(ss);
  CHECK(back == t);
  CHECK(back.visited_entries() == t.visited_entries());

  std::stringstream junk("HRT 0 0 low low bogus assign 0.1 3\n");
  CHECK_THROWS(QTable::load(junk));
}
