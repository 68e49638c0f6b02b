#include "pec/trace.hpp"

#include <array>
#include <charconv>
#include <ostream>

namespace pec {

namespace {

constexpr std::array<std::string_view, 16> kTraceKindNames{
    "TaskGenerated", "Routed",    "TransferComplete", "Queued",      "Started",     "Paused",
    "ExecutionComplete", "ResultReturned", "Reallocated", "Succeeded", "Failed", "Excluded",
    "Blacklisted",   "DeviceDead", "DeviceDeparted",  "DeviceArrived"};

template <typename T>
std::optional<T> parse_int(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(TraceKind k) { return kTraceKindNames[static_cast<std::size_t>(k)]; }

std::optional<TraceKind> parse_trace_kind(std::string_view s) {
  for (std::size_t i = 0; i < kTraceKindNames.size(); ++i) {
    if (kTraceKindNames[i] == s) return static_cast<TraceKind>(i);
  }
  return std::nullopt;
}

std::optional<std::string_view> TraceRecord::field(std::string_view key) const {
  const std::string_view d = detail;
  std::size_t start = 0;
  while (start < d.size()) {
    std::size_t end = start;
    while (end < d.size() && d[end] != ' ') ++end;
    const std::string_view item = d.substr(start, end - start);
    if (item.size() > key.size() && item[key.size()] == '=' && item.substr(0, key.size()) == key) {
      return item.substr(key.size() + 1);
    }
    start = end + 1;
  }
  return std::nullopt;
}

std::optional<double> TraceRecord::number(std::string_view key) const {
  auto f = field(key);
  if (!f) return std::nullopt;
  return parse_double(*f);
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_record(const TraceRecord& r) {
  std::string line = format_number(r.time_ms);
  line += '\t';
  line += to_string(r.kind);
  line += '\t';
  line += std::to_string(r.task);
  line += '\t';
  line += std::to_string(r.device);
  line += '\t';
  line += r.detail;
  return line;
}

std::optional<TraceRecord> parse_record(std::string_view line) {
  std::array<std::string_view, 5> cols;
  std::size_t col = 0;
  while (col < 4) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) return std::nullopt;
    cols[col++] = line.substr(0, tab);
    line.remove_prefix(tab + 1);
  }
  cols[4] = line;

  TraceRecord r;
  auto t = parse_double(cols[0]);
  auto k = parse_trace_kind(cols[1]);
  auto task = parse_int<std::int64_t>(cols[2]);
  auto device = parse_int<std::int64_t>(cols[3]);
  if (!t || !k || !task || !device) return std::nullopt;
  r.time_ms = *t;
  r.kind = *k;
  r.task = *task;
  r.device = *device;
  r.detail = std::string(cols[4]);
  return r;
}

void TextTraceWriter::record(const TraceRecord& r) { out_ << format_record(r) << '\n'; }

void HashingTraceSink::record(const TraceRecord& r) {
  const std::string line = format_record(r) + '\n';
  for (unsigned char c : line) {
    hash_ ^= c;
    hash_ *= 0x100000001b3ULL;
  }
  bytes_ += line.size();
  ++lines_;
}

}  // namespace pec
