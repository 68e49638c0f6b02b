#pragma once

// Core entities of the pure-edge model: task classes, failure taxonomy,
// device profiles, and the two closed-form state features (device load and
// expected execution time).
//
// Units used throughout the project:
//   task size        million instructions (MI)
//   compute rate     MI per second (1 GIPS = 1000 MI/s)
//   time             milliseconds of simulated time
//   energy           watt-hours, power in watts
//   payloads         megabits, bandwidth in Mbps

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pec {

using TaskId = std::uint32_t;
using DeviceId = std::uint32_t;

inline constexpr double kMiPerSecondPerGips = 1000.0;
inline constexpr double kMsPerSecond = 1000.0;
inline constexpr double kMsPerHour = 3'600'000.0;

class InvalidDeviceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Declaration order is priority order: HRT > SRT > NRT.
enum class TaskType : std::uint8_t { HRT = 0, SRT = 1, NRT = 2 };
inline constexpr std::array<TaskType, 3> kTaskTypes{TaskType::HRT, TaskType::SRT, TaskType::NRT};

constexpr bool higher_priority(TaskType a, TaskType b) {
  return static_cast<int>(a) < static_cast<int>(b);
}
constexpr std::size_t index_of(TaskType t) { return static_cast<std::size_t>(t); }

std::string_view to_string(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view s);

enum class FailureReason : std::uint8_t {
  DeadlineMissed = 0,
  Mobility,
  IncompatibleHardwareSoftware,
  NoAvailableResources,
  DeadDevice,
};
inline constexpr std::size_t kFailureReasonCount = 5;
constexpr std::size_t index_of(FailureReason r) { return static_cast<std::size_t>(r); }
std::string_view to_string(FailureReason r);
std::optional<FailureReason> parse_failure_reason(std::string_view s);

enum class ReallocationReason : std::uint8_t {
  Mobility = 0,
  IncompatibleHardwareSoftware,
  InsufficientPower,
};
inline constexpr std::size_t kReallocationReasonCount = 3;
constexpr std::size_t index_of(ReallocationReason r) { return static_cast<std::size_t>(r); }
std::string_view to_string(ReallocationReason r);
std::optional<ReallocationReason> parse_reallocation_reason(std::string_view s);

enum class TaskStatus : std::uint8_t {
  Pending,
  Queued,
  Executing,
  Paused,
  Succeeded,
  Failed,
  Reallocated,
};
std::string_view to_string(TaskStatus s);

constexpr bool is_terminal(TaskStatus s) {
  return s == TaskStatus::Succeeded || s == TaskStatus::Failed;
}

// Pending -> Queued -> Executing -> {Succeeded, Failed, Paused}; Paused -> Queued;
// a task leaving its host early goes through Reallocated back to Pending.
bool is_legal_transition(TaskStatus from, TaskStatus to);

enum class DeviceKind : std::uint8_t {
  Laptop,
  Smartphone,
  Gateway,
  StationarySensor,
  MobileSensor,
  EdgeServer,
};
inline constexpr std::array<DeviceKind, 5> kEdgeDeviceKinds{
    DeviceKind::Laptop, DeviceKind::Smartphone, DeviceKind::Gateway,
    DeviceKind::StationarySensor, DeviceKind::MobileSensor};
std::string_view to_string(DeviceKind k);
std::optional<DeviceKind> parse_device_kind(std::string_view s);

// Capability tags are a bitmask over a small universe (at most 8 tags).
using TagSet = std::uint8_t;

struct DeviceSpec {
  DeviceKind kind = DeviceKind::Laptop;
  bool generates_tasks = false;
  bool mobile = false;
  double speed_mps = 0.0;
  bool battery_powered = false;
  double battery_capacity_wh = 0.0;
  double idle_power_w = 0.0;
  double max_power_w = 0.0;
  double cpu_rate_mips = 0.0;
  int cpu_cores = 0;

  bool is_computing() const { return cpu_rate_mips > 0.0 && cpu_cores > 0; }
};

// Device profile for one kind with the published defaults. Mobile sensors
// have no published capacity or power draw; callers supply those.
DeviceSpec default_spec(DeviceKind kind, double mobile_sensor_capacity_wh = 10.0,
                        double sensor_power_w = 0.0);
DeviceSpec edge_server_spec(double gips = 400.0, int cores = 16);

// Phase a task is currently accruing delay in.
enum class Phase : std::uint8_t { None, Network, Waiting, Executing };

struct Task {
  TaskId id = 0;
  TaskType type = TaskType::NRT;
  double size_mi = 0.0;
  double latency_budget_ms = 0.0;
  double request_mb = 0.0;
  double result_mb = 0.0;
  double generated_at_ms = 0.0;
  DeviceId generator = 0;
  bool generator_mobile = false;
  std::uint8_t required_tag = 0;

  std::optional<DeviceId> assigned_to;
  TaskStatus status = TaskStatus::Pending;
  std::optional<FailureReason> failure;

  double network_ms = 0.0;
  double waiting_ms = 0.0;
  double execution_ms = 0.0;

  Phase phase = Phase::None;
  double phase_started_ms = 0.0;

  int reallocations = 0;
  bool via_fallback = false;
  bool jumped_queue = false;
  bool on_server = false;
  std::uint64_t token = 0;  // invalidates stale transfer/result events
  std::optional<std::uint16_t> decision_state;  // fuzzy state of the pending Assign decision

  double total_delay_ms() const { return network_ms + waiting_ms + execution_ms; }
};

// Validates and applies a status change; throws std::logic_error on an illegal one.
void transition(Task& task, TaskStatus next);

// Closes the current phase at `now_ms` and starts `next`.
void enter_phase(Task& task, Phase next, double now_ms);

// d_l = d_ql / d_cc
double current_load(std::size_t queue_length, int cpu_cores);

// e_t = t_s / d_m, in seconds.
double expected_execution_time(double task_size_mi, double device_rate_mips);

bool is_deadline_met(double completed_at_ms, double generated_at_ms, double latency_budget_ms);

}  // namespace pec
