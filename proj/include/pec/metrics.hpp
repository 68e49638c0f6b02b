#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pec/domain.hpp"
#include "pec/trace.hpp"

namespace pec {

enum class Attribution : std::uint8_t {
  Baseline = 0,
  Priority,
  Reallocation,
  DelayPenaltyShaping,
  EdgeServerFallback,
};
inline constexpr std::size_t kAttributionCount = 5;
std::string_view to_string(Attribution a);
std::optional<Attribution> parse_attribution(std::string_view s);

struct TypeMetrics {
  std::uint64_t generated = 0;  // in-flight tasks excluded at the horizon are taken out again
  std::uint64_t succeeded = 0;
  std::uint64_t excluded = 0;
  std::array<std::uint64_t, kFailureReasonCount> failed{};
  std::array<std::uint64_t, kReallocationReasonCount> reallocations{};
  std::array<std::uint64_t, kAttributionCount> attribution{};
  double network_ms = 0.0;
  double execution_ms = 0.0;
  double waiting_ms = 0.0;

  std::uint64_t total_failed() const;
  std::uint64_t total_reallocations() const;
  bool operator==(const TypeMetrics&) const = default;
};

struct RunMetrics {
  std::array<TypeMetrics, 3> by_type{};

  TypeMetrics& of(TaskType t) { return by_type[index_of(t)]; }
  const TypeMetrics& of(TaskType t) const { return by_type[index_of(t)]; }

  void record_generated(TaskType t) { ++of(t).generated; }
  void record_excluded(TaskType t);
  void record_success(TaskType t, double network_ms, double waiting_ms, double execution_ms, Attribution tag);
  void record_failure(TaskType t, FailureReason reason, double network_ms, double waiting_ms, double execution_ms);
  void record_reallocation(TaskType t, ReallocationReason reason) { ++of(t).reallocations[index_of(reason)]; }

  bool operator==(const RunMetrics&) const = default;
};

class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// succeeded / generated; nullopt when nothing was generated.
std::optional<double> success_rate(const RunMetrics& m, TaskType t);

// (network + execution + waiting) / generated; nullopt when nothing was generated.
std::optional<double> average_delay(const RunMetrics& m, TaskType t);

// Mechanism that gets credit for a successful task. Tags are checked in order:
// fallback routing to the edge server, any reallocation, an HRT queue jump or
// preemption; anything else is the baseline path.
Attribution attribute_success(const Task& task);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

// Throws std::invalid_argument on an empty sample.
Stat describe(std::span<const double> values);

struct TypeSummary {
  std::optional<Stat> success_rate;
  std::optional<Stat> average_delay_ms;
  Stat succeeded;
  Stat generated;
};

struct Summary {
  std::size_t runs = 0;
  std::array<TypeSummary, 3> by_type;
  std::array<double, kReallocationReasonCount> mean_reallocations{};
  std::array<double, kAttributionCount> attribution_share{};  // over all successes of all runs
};

// Throws std::invalid_argument on an empty list.
Summary aggregate(std::span<const RunMetrics> runs);

inline constexpr std::string_view kCsvHeader =
    "scenario,policy,seed,task_type,generated,succeeded,failed_deadline,failed_mobility,failed_incompatible,"
    "failed_no_resources,failed_dead_device,realloc_mobility,realloc_incompatible,realloc_power,avg_delay_ms,"
    "success_rate";

// Three rows, one per task type; no header.
void write_csv_rows(std::ostream& out, std::string_view scenario, std::string_view policy, std::uint64_t seed,
                    const RunMetrics& m);

// Rebuilds run metrics from a trace, folding terminal and reallocation records.
class TraceMetricsFold : public TraceSink {
 public:
  void record(const TraceRecord& r) override;
  const RunMetrics& metrics() const { return metrics_; }

 private:
  RunMetrics metrics_;
};

}  // namespace pec
