#include "pec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pec {

std::string_view to_string(Attribution a) {
  switch (a) {
    case Attribution::Baseline: return "Baseline";
    case Attribution::Priority: return "Priority";
    case Attribution::Reallocation: return "Reallocation";
    case Attribution::DelayPenaltyShaping: return "DelayPenaltyShaping";
    case Attribution::EdgeServerFallback: return "EdgeServerFallback";
  }
  return "?";
}

std::optional<Attribution> parse_attribution(std::string_view s) {
  for (std::size_t i = 0; i < kAttributionCount; ++i) {
    auto a = static_cast<Attribution>(i);
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

std::uint64_t TypeMetrics::total_failed() const { return std::accumulate(failed.begin(), failed.end(), 0ULL); }

std::uint64_t TypeMetrics::total_reallocations() const {
  return std::accumulate(reallocations.begin(), reallocations.end(), 0ULL);
}

void RunMetrics::record_excluded(TaskType t) {
  auto& m = of(t);
  --m.generated;
  ++m.excluded;
}

void RunMetrics::record_success(TaskType t, double network_ms, double waiting_ms, double execution_ms,
                                Attribution tag) {
  auto& m = of(t);
  ++m.succeeded;
  ++m.attribution[static_cast<std::size_t>(tag)];
  m.network_ms += network_ms;
  m.waiting_ms += waiting_ms;
  m.execution_ms += execution_ms;
}

void RunMetrics::record_failure(TaskType t, FailureReason reason, double network_ms, double waiting_ms,
                                double execution_ms) {
  auto& m = of(t);
  ++m.failed[index_of(reason)];
  m.network_ms += network_ms;
  m.waiting_ms += waiting_ms;
  m.execution_ms += execution_ms;
}

std::optional<double> success_rate(const RunMetrics& m, TaskType t) {
  const auto& tm = m.of(t);
  if (tm.generated == 0) return std::nullopt;
  return static_cast<double>(tm.succeeded) / static_cast<double>(tm.generated);
}

std::optional<double> average_delay(const RunMetrics& m, TaskType t) {
  const auto& tm = m.of(t);
  if (tm.generated == 0) return std::nullopt;
  return (tm.network_ms + tm.execution_ms + tm.waiting_ms) / static_cast<double>(tm.generated);
}

Attribution attribute_success(const Task& task) {
  if (task.via_fallback) return Attribution::EdgeServerFallback;
  if (task.reallocations > 0) return Attribution::Reallocation;
  if (task.type == TaskType::HRT && task.jumped_queue) return Attribution::Priority;
  return Attribution::Baseline;
}

Stat describe(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("describe: no values");
  Stat s;
  s.n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

Summary aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  Summary out;
  out.runs = runs.size();
  std::array<std::uint64_t, kAttributionCount> tags{};
  for (auto t : kTaskTypes) {
    std::vector<double> rates, delays, succeeded, generated;
    for (const auto& r : runs) {
      if (auto v = success_rate(r, t)) rates.push_back(*v);
      if (auto v = average_delay(r, t)) delays.push_back(*v);
      succeeded.push_back(static_cast<double>(r.of(t).succeeded));
      generated.push_back(static_cast<double>(r.of(t).generated));
      for (std::size_t i = 0; i < kReallocationReasonCount; ++i) {
        out.mean_reallocations[i] += static_cast<double>(r.of(t).reallocations[i]);
      }
      for (std::size_t i = 0; i < kAttributionCount; ++i) tags[i] += r.of(t).attribution[i];
    }
    auto& ts = out.by_type[index_of(t)];
    if (!rates.empty()) ts.success_rate = describe(rates);
    if (!delays.empty()) ts.average_delay_ms = describe(delays);
    ts.succeeded = describe(succeeded);
    ts.generated = describe(generated);
  }
  for (auto& v : out.mean_reallocations) v /= static_cast<double>(runs.size());
  const auto total = std::accumulate(tags.begin(), tags.end(), 0ULL);
  if (total > 0) {
    for (std::size_t i = 0; i < kAttributionCount; ++i) {
      out.attribution_share[i] = static_cast<double>(tags[i]) / static_cast<double>(total);
    }
  }
  return out;
}

void write_csv_rows(std::ostream& out, std::string_view scenario, std::string_view policy, std::uint64_t seed,
                    const RunMetrics& m) {
  for (auto t : kTaskTypes) {
    const auto& tm = m.of(t);
    out << scenario << ',' << policy << ',' << seed << ',' << to_string(t) << ',' << tm.generated << ','
        << tm.succeeded;
    for (auto f : tm.failed) out << ',' << f;
    for (auto r : tm.reallocations) out << ',' << r;
    out << ',';
    if (auto d = average_delay(m, t)) out << format_number(*d);
    out << ',';
    if (auto s = success_rate(m, t)) out << format_number(*s);
    out << '\n';
  }
}

void TraceMetricsFold::record(const TraceRecord& r) {
  auto type = [&]() -> TaskType {
    auto f = r.field("type");
    auto t = f ? parse_task_type(*f) : std::nullopt;
    if (!t) throw std::invalid_argument("trace record without task type: " + format_record(r));
    return *t;
  };
  switch (r.kind) {
    case TraceKind::TaskGenerated:
      metrics_.record_generated(type());
      break;
    case TraceKind::Excluded:
      metrics_.record_excluded(type());
      break;
    case TraceKind::Succeeded: {
      auto tag = parse_attribution(r.field("tag").value_or(""));
      metrics_.record_success(type(), r.number("net").value_or(0), r.number("wait").value_or(0),
                              r.number("exec").value_or(0), tag.value_or(Attribution::Baseline));
      break;
    }
    case TraceKind::Failed: {
      auto reason = parse_failure_reason(r.field("reason").value_or(""));
      if (!reason) throw std::invalid_argument("failure without reason: " + format_record(r));
      metrics_.record_failure(type(), *reason, r.number("net").value_or(0), r.number("wait").value_or(0),
                              r.number("exec").value_or(0));
      break;
    }
    case TraceKind::Reallocated: {
      auto reason = parse_reallocation_reason(r.field("reason").value_or(""));
      if (!reason) throw std::invalid_argument("reallocation without reason: " + format_record(r));
      metrics_.record_reallocation(type(), *reason);
      break;
    }
    default:
      break;
  }
}

}  // namespace pec
