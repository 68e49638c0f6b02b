#include "pec/domain.hpp"

#include <string>

namespace pec {

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::HRT: return "HRT";
    case TaskType::SRT: return "SRT";
    case TaskType::NRT: return "NRT";
  }
  return "?";
}

std::optional<TaskType> parse_task_type(std::string_view s) {
  for (auto t : kTaskTypes) {
    if (to_string(t) == s) return t;
  }
  if (s == "hrt") return TaskType::HRT;
  if (s == "srt") return TaskType::SRT;
  if (s == "nrt") return TaskType::NRT;
  return std::nullopt;
}

std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::DeadlineMissed: return "DeadlineMissed";
    case FailureReason::Mobility: return "Mobility";
    case FailureReason::IncompatibleHardwareSoftware: return "IncompatibleHardwareSoftware";
    case FailureReason::NoAvailableResources: return "NoAvailableResources";
    case FailureReason::DeadDevice: return "DeadDevice";
  }
  return "?";
}

std::optional<FailureReason> parse_failure_reason(std::string_view s) {
  for (std::size_t i = 0; i < kFailureReasonCount; ++i) {
    auto r = static_cast<FailureReason>(i);
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view to_string(ReallocationReason r) {
  switch (r) {
    case ReallocationReason::Mobility: return "Mobility";
    case ReallocationReason::IncompatibleHardwareSoftware: return "IncompatibleHardwareSoftware";
    case ReallocationReason::InsufficientPower: return "InsufficientPower";
  }
  return "?";
}

std::optional<ReallocationReason> parse_reallocation_reason(std::string_view s) {
  for (std::size_t i = 0; i < kReallocationReasonCount; ++i) {
    auto r = static_cast<ReallocationReason>(i);
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Pending: return "Pending";
    case TaskStatus::Queued: return "Queued";
    case TaskStatus::Executing: return "Executing";
    case TaskStatus::Paused: return "Paused";
    case TaskStatus::Succeeded: return "Succeeded";
    case TaskStatus::Failed: return "Failed";
    case TaskStatus::Reallocated: return "Reallocated";
  }
  return "?";
}

bool is_legal_transition(TaskStatus from, TaskStatus to) {
  using S = TaskStatus;
  switch (from) {
    case S::Pending: return to == S::Queued || to == S::Failed;
    case S::Queued: return to == S::Executing || to == S::Failed || to == S::Reallocated;
    case S::Executing:
      return to == S::Succeeded || to == S::Failed || to == S::Paused || to == S::Reallocated;
    case S::Paused: return to == S::Queued;
    case S::Reallocated: return to == S::Pending;
    case S::Succeeded:
    case S::Failed: return false;
  }
  return false;
}

void transition(Task& task, TaskStatus next) {
  if (!is_legal_transition(task.status, next)) {
    throw std::logic_error("task " + std::to_string(task.id) + ": illegal transition " +
                           std::string(to_string(task.status)) + " -> " +
                           std::string(to_string(next)));
  }
  task.status = next;
}

void enter_phase(Task& task, Phase next, double now_ms) {
  const double elapsed = now_ms - task.phase_started_ms;
  switch (task.phase) {
    case Phase::Network: task.network_ms += elapsed; break;
    case Phase::Waiting: task.waiting_ms += elapsed; break;
    case Phase::Executing: task.execution_ms += elapsed; break;
    case Phase::None: break;
  }
  task.phase = next;
  task.phase_started_ms = now_ms;
}

std::string_view to_string(DeviceKind k) {
  switch (k) {
    case DeviceKind::Laptop: return "laptop";
    case DeviceKind::Smartphone: return "smartphone";
    case DeviceKind::Gateway: return "gateway";
    case DeviceKind::StationarySensor: return "stationary_sensor";
    case DeviceKind::MobileSensor: return "mobile_sensor";
    case DeviceKind::EdgeServer: return "edge_server";
  }
  return "?";
}

std::optional<DeviceKind> parse_device_kind(std::string_view s) {
  for (auto k : kEdgeDeviceKinds) {
    if (to_string(k) == s) return k;
  }
  if (s == "edge_server") return DeviceKind::EdgeServer;
  return std::nullopt;
}

DeviceSpec default_spec(DeviceKind kind, double mobile_sensor_capacity_wh, double sensor_power_w) {
  DeviceSpec s;
  s.kind = kind;
  switch (kind) {
    case DeviceKind::Laptop:
      s.battery_powered = true;
      s.battery_capacity_wh = 56.2;
      s.idle_power_w = 1.7;
      s.max_power_w = 23.6;
      s.cpu_rate_mips = 110 * kMiPerSecondPerGips;
      s.cpu_cores = 8;
      break;
    case DeviceKind::Smartphone:
      s.generates_tasks = true;
      s.mobile = true;
      s.speed_mps = 1.4;
      s.battery_powered = true;
      s.battery_capacity_wh = 18.75;
      s.idle_power_w = 0.2;
      s.max_power_w = 5.0;
      s.cpu_rate_mips = 25 * kMiPerSecondPerGips;
      s.cpu_cores = 8;
      break;
    case DeviceKind::Gateway:
      s.idle_power_w = 3.8;
      s.max_power_w = 5.5;
      s.cpu_rate_mips = 16 * kMiPerSecondPerGips;
      s.cpu_cores = 4;
      break;
    case DeviceKind::StationarySensor:
      s.generates_tasks = true;
      break;
    case DeviceKind::MobileSensor:
      s.generates_tasks = true;
      s.mobile = true;
      s.speed_mps = 1.4;
      s.battery_powered = true;
      s.battery_capacity_wh = mobile_sensor_capacity_wh;
      s.idle_power_w = sensor_power_w;
      s.max_power_w = sensor_power_w;
      break;
    case DeviceKind::EdgeServer:
      return edge_server_spec();
  }
  return s;
}

DeviceSpec edge_server_spec(double gips, int cores) {
  DeviceSpec s;
  s.kind = DeviceKind::EdgeServer;
  s.cpu_rate_mips = gips * kMiPerSecondPerGips;
  s.cpu_cores = cores;
  return s;
}

double current_load(std::size_t queue_length, int cpu_cores) {
  if (cpu_cores <= 0) throw InvalidDeviceError("current_load: device has no CPU cores");
  return static_cast<double>(queue_length) / static_cast<double>(cpu_cores);
}

double expected_execution_time(double task_size_mi, double device_rate_mips) {
  if (device_rate_mips <= 0.0) {
    throw InvalidDeviceError("expected_execution_time: not a computing device");
  }
  if (task_size_mi <= 0.0) throw std::invalid_argument("expected_execution_time: task size must be > 0");
  return task_size_mi / device_rate_mips;
}

bool is_deadline_met(double completed_at_ms, double generated_at_ms, double latency_budget_ms) {
  return completed_at_ms - generated_at_ms <= latency_budget_ms;
}

}  // namespace pec
