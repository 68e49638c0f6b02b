#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pec {

enum class TraceKind : std::uint8_t {
  TaskGenerated,
  Routed,
  TransferComplete,
  Queued,
  Started,
  Paused,
  ExecutionComplete,
  ResultReturned,
  Reallocated,
  Succeeded,
  Failed,
  Excluded,
  Blacklisted,
  DeviceDead,
  DeviceDeparted,
  DeviceArrived,
};
std::string_view to_string(TraceKind k);
std::optional<TraceKind> parse_trace_kind(std::string_view s);

// One line of the event trace. `detail` is a space-separated list of
// key=value pairs whose keys depend on the kind.
struct TraceRecord {
  double time_ms = 0.0;
  TraceKind kind = TraceKind::TaskGenerated;
  std::int64_t task = -1;
  std::int64_t device = -1;
  std::string detail;

  std::optional<std::string_view> field(std::string_view key) const;
  std::optional<double> number(std::string_view key) const;
};

// time<TAB>kind<TAB>task<TAB>device<TAB>detail, numbers in shortest round-trip form.
std::string format_record(const TraceRecord& r);
std::optional<TraceRecord> parse_record(std::string_view line);

std::string format_number(double v);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceRecord& r) = 0;
};

class TextTraceWriter : public TraceSink {
 public:
  explicit TextTraceWriter(std::ostream& out) : out_(out) {}
  void record(const TraceRecord& r) override;

 private:
  std::ostream& out_;
};

class VectorTraceSink : public TraceSink {
 public:
  void record(const TraceRecord& r) override { records.push_back(r); }
  std::vector<TraceRecord> records;
};

class FanoutTraceSink : public TraceSink {
 public:
  explicit FanoutTraceSink(std::vector<TraceSink*> sinks) : sinks_(std::move(sinks)) {}
  void record(const TraceRecord& r) override {
    for (auto* s : sinks_) s->record(r);
  }

 private:
  std::vector<TraceSink*> sinks_;
};

// 64-bit FNV-1a over the formatted lines; cheap byte-level comparison of
// traces too large to keep around.
class HashingTraceSink : public TraceSink {
 public:
  void record(const TraceRecord& r) override;
  std::uint64_t digest() const { return hash_; }
  std::uint64_t bytes() const { return bytes_; }
  std::uint64_t lines() const { return lines_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
  std::uint64_t bytes_ = 0;
  std::uint64_t lines_ = 0;
};

}  // namespace pec
