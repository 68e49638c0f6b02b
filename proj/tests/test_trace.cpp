#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "pec/rng.hpp"
#include "pec/trace.hpp"

using namespace pec;

TEST_CASE("record format") {
  TraceRecord r{1500.25, TraceKind::Succeeded, 42, 7, "type=SRT tag=Baseline net=10.5 wait=0 exec=200"};
  CHECK(format_record(r) == "1500.25\tSucceeded\t42\t7\ttype=SRT tag=Baseline net=10.5 wait=0 exec=200");
  CHECK(r.field("type") == "SRT");
  CHECK(r.field("tag") == "Baseline");
  CHECK(r.number("net") == 10.5);
  CHECK_FALSE(r.field("ty"));
  CHECK_FALSE(r.field("missing"));
  CHECK_FALSE(r.number("type"));
}

TEST_CASE("records survive a text round trip") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    TraceRecord r;
    r.time_ms = rng.uniform(0.0, 1.8e6);
    r.kind = static_cast<TraceKind>(rng.index(16));
    r.task = static_cast<std::int64_t>(rng.index(100000)) - 1;
    r.device = static_cast<std::int64_t>(rng.index(301)) - 1;
    r.detail = "type=HRT x=" + format_number(rng.uniform(-1.0, 1.0));
    auto back = parse_record(format_record(r));
    REQUIRE(back);
    CHECK(back->time_ms == r.time_ms);
    CHECK(back->kind == r.kind);
    CHECK(back->task == r.task);
    CHECK(back->device == r.device);
    CHECK(back->detail == r.detail);
  }
  CHECK_FALSE(parse_record("1\tNope\t1\t1\t"));
  CHECK_FALSE(parse_record("1\tRouted\t1"));
  CHECK_FALSE(parse_record("x\tRouted\t1\t1\t"));
  CHECK(parse_record("0\tDeviceDead\t-1\t3\t"));
}

TEST_CASE("hashing sink agrees with the text writer") {
  std::ostringstream text;
  TextTraceWriter writer(text);
  HashingTraceSink h1;
  HashingTraceSink h2;
  FanoutTraceSink fan({&writer, &h1});
  for (int i = 0; i < 50; ++i) fan.record({double(i), TraceKind::Queued, i, 2, "type=NRT jumped=0 queue=1"});
  CHECK(h1.bytes() == text.str().size());
  CHECK(h1.lines() == 50);
  for (int i = 0; i < 50; ++i) h2.record({double(i), TraceKind::Queued, i, 2, "type=NRT jumped=0 queue=1"});
  CHECK(h1.digest() == h2.digest());
  h2.record({0.0, TraceKind::Queued, 0, 2, ""});
  CHECK(h1.digest() != h2.digest());

  // FNV-1a of the single byte "a".
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h ^= 'a';
  h *= 0x100000001b3ULL;
  CHECK(h == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("trace kind names round trip") {
  for (std::size_t i = 0; i < 16; ++i) {
    const auto k = static_cast<TraceKind>(i);
    CHECK(parse_trace_kind(to_string(k)) == k);
  }
}
