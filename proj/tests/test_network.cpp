#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pec/network.hpp"

using namespace pec;

TEST_CASE("fixed bandwidth transfer") {
  NetworkModel net;
  net.fluctuation = false;
  net.internal_bandwidth_mbps = 10.0;
  net.internal_latency_ms = 2.0;
  Rng rng(1);
  CHECK(transfer_time(1.0, Link::Internal, net, rng) == doctest::Approx(102.0));
}

TEST_CASE("zero payload pays only the base latency and draws nothing") {
  NetworkModel net;
  Rng a(9);
  Rng b(9);
  CHECK(transfer_time(0.0, Link::Internal, net, a) == net.internal_latency_ms);
  CHECK(transfer_time(0.0, Link::Main, net, a) == net.main_latency_ms);
  CHECK(a.next() == b.next());
}

TEST_CASE("partitioned sender cannot use the main network") {
  NetworkModel net;
  Rng rng(1);
  CHECK_THROWS_AS(transfer_time(1.0, Link::Main, net, rng, true), UnreachableError);
  CHECK(transfer_time(1.0, Link::Internal, net, rng, true) > 0.0);
}

TEST_CASE("fluctuating bandwidth stays within its bounds") {
  NetworkModel net;
  Rng rng(3);
  const double payload = 2.0;
  const double fastest = net.main_latency_ms + payload / (net.main_bandwidth_mbps * net.fluctuation_max) * 1000.0;
  const double slowest = net.main_latency_ms + payload / (net.main_bandwidth_mbps * net.fluctuation_min) * 1000.0;
  double lo = 1e18;
  double hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double t = transfer_time(payload, Link::Main, net, rng);
    CHECK(t >= fastest);
    CHECK(t <= slowest);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  // The range is actually explored.
  CHECK(lo < fastest * 1.05);
  CHECK(hi > slowest * 0.95);
}

TEST_CASE("same seed, same delays") {
  NetworkModel net;
  Rng a(77, Stream::Network);
  Rng b(77, Stream::Network);
  for (int i = 0; i < 100; ++i) CHECK(transfer_time(1.5, Link::Internal, net, a) == transfer_time(1.5, Link::Internal, net, b));
}

TEST_CASE("negative payload is rejected") {
  NetworkModel net;
  Rng rng(1);
  CHECK_THROWS(transfer_time(-1.0, Link::Internal, net, rng));
}
