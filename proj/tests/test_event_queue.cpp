#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "pec/event_queue.hpp"
#include "pec/rng.hpp"

using namespace pec;

namespace {

Event at(double t, std::uint32_t tag = 0) {
  Event e;
  e.at_ms = t;
  e.aux = tag;
  return e;
}

}  // namespace

TEST_CASE("event at the current time runs before later events") {
  EventQueue q;
  q.schedule(at(5.0, 1));
  q.pop();
  q.schedule(at(9.0, 2));
  q.schedule(at(5.0, 3));
  CHECK(q.pop().aux == 3);
  CHECK(q.pop().aux == 2);
  CHECK(q.now() == 9.0);
}

TEST_CASE("same-time events leave in schedule order") {
  EventQueue q;
  for (std::uint32_t i = 0; i < 50; ++i) q.schedule(at(1.0, i));
  for (std::uint32_t i = 0; i < 50; ++i) CHECK(q.pop().aux == i);
  CHECK(q.empty());
}

TEST_CASE("scheduling into the past is fatal") {
  EventQueue q;
  q.schedule(at(10.0));
  q.pop();
  CHECK_THROWS_AS(q.schedule(at(9.0)), SimulationError);
  CHECK_NOTHROW(q.schedule(at(10.0)));
}

TEST_CASE("schedule returns increasing sequence numbers") {
  EventQueue q;
  const auto a = q.schedule(at(3.0));
  const auto b = q.schedule(at(1.0));
  CHECK(b > a);
  CHECK(q.pop().seq == b);
}

TEST_CASE("random schedules come out sorted by time then sequence") {
  Rng rng(21);
  EventQueue q;
  for (std::uint32_t i = 0; i < 2000; ++i) q.schedule(at(std::floor(rng.uniform(0.0, 100.0)), i));
  Event prev = q.pop();
  while (!q.empty()) {
    Event e = q.pop();
    CHECK((e.at_ms > prev.at_ms || (e.at_ms == prev.at_ms && e.seq > prev.seq)));
    prev = e;
  }
}

TEST_CASE("generator output is pinned across platforms") {
  // mt19937_64 is fully specified; 9981545732273789042 is its 10000th output
  // for the default seed, as stated in the standard.
  std::mt19937_64 ref;
  ref.discard(9999);
  CHECK(ref() == 9981545732273789042ULL);

  Rng a(1, Stream::Arrivals);
  Rng b(1, Stream::Arrivals);
  Rng c(1, Stream::Mobility);
  Rng d(2, Stream::Arrivals);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  CHECK(x != d.next());
}

TEST_CASE("hand-written distributions") {
  Rng rng(8);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += rng.exponential(2.0);
  }
  // Mean of Exp(2) is 0.5; standard error is 0.5 / sqrt(n).
  CHECK(std::abs(sum / n - 0.5) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
  for (int i = 0; i < 1000; ++i) CHECK(rng.index(7) < 7);
}
