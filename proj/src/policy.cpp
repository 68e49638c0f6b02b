#include "pec/policy.hpp"

namespace pec {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Priority: return "priority";
    case Mechanism::Reallocation: return "reallocation";
    case Mechanism::RewardShaping: return "reward-shaping";
    case Mechanism::EdgeFallback: return "edge-fallback";
  }
  return "?";
}

std::optional<Mechanism> parse_mechanism(std::string_view s) {
  for (auto m : kMechanisms) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

PolicyConfig PolicyConfig::baseline() {
  PolicyConfig p;
  p.priority = false;
  p.reallocation = false;
  p.reward_shaping = false;
  p.edge_fallback = false;
  return p;
}

PolicyConfig PolicyConfig::robust() { return PolicyConfig{}; }

bool PolicyConfig::enabled(Mechanism m) const {
  switch (m) {
    case Mechanism::Priority: return priority;
    case Mechanism::Reallocation: return reallocation;
    case Mechanism::RewardShaping: return reward_shaping;
    case Mechanism::EdgeFallback: return edge_fallback;
  }
  return false;
}

PolicyConfig PolicyConfig::without(Mechanism m) const {
  PolicyConfig p = *this;
  switch (m) {
    case Mechanism::Priority: p.priority = false; break;
    case Mechanism::Reallocation: p.reallocation = false; break;
    case Mechanism::RewardShaping: p.reward_shaping = false; break;
    case Mechanism::EdgeFallback: p.edge_fallback = false; break;
  }
  return p;
}

std::string PolicyConfig::name() const {
  bool any = false;
  bool all = true;
  for (auto m : kMechanisms) {
    any = any || enabled(m);
    all = all && enabled(m);
  }
  if (!any) return "adworch";
  std::string n = "r-adworch";
  if (all) return n;
  for (auto m : kMechanisms) {
    if (!enabled(m)) n += "-no-" + std::string(to_string(m));
  }
  return n;
}

std::optional<PolicyConfig> parse_policy(std::string_view name) {
  if (name == "adworch" || name == "baseline") return PolicyConfig::baseline();
  if (name == "r-adworch" || name == "robust") return PolicyConfig::robust();
  constexpr std::string_view kRobust = "r-adworch";
  constexpr std::string_view kNo = "-no-";
  if (!name.starts_with(kRobust)) return std::nullopt;
  PolicyConfig p = PolicyConfig::robust();
  std::string_view rest = name.substr(kRobust.size());
  while (!rest.empty()) {
    if (!rest.starts_with(kNo)) return std::nullopt;
    rest.remove_prefix(kNo.size());
    const auto next = rest.find(kNo);
    auto m = parse_mechanism(rest.substr(0, next));
    if (!m) return std::nullopt;
    p = p.without(*m);
    rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next);
  }
  return p;
}

std::string_view to_string(RoutingDecision::Kind k) {
  switch (k) {
    case RoutingDecision::Kind::OffloadTo: return "offload";
    case RoutingDecision::Kind::SendToEdgeServer: return "server";
    case RoutingDecision::Kind::FailNow: return "fail";
  }
  return "?";
}

RoutingDecision route_task(const Task& task, std::optional<DeviceId> selected, bool edge_server_reachable,
                           const PolicyConfig& policy) {
  if (selected) return RoutingDecision::offload(*selected);
  // NRT work never goes to the edge server.
  if (policy.edge_fallback && task.type != TaskType::NRT && edge_server_reachable) {
    return RoutingDecision::edge_server();
  }
  return RoutingDecision::fail();
}

std::optional<ReallocationReason> reallocation_reason_for(FailureReason r) {
  switch (r) {
    case FailureReason::Mobility: return ReallocationReason::Mobility;
    case FailureReason::IncompatibleHardwareSoftware: return ReallocationReason::IncompatibleHardwareSoftware;
    case FailureReason::DeadDevice: return ReallocationReason::InsufficientPower;
    case FailureReason::DeadlineMissed:
    case FailureReason::NoAvailableResources: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<ReallocationReason> on_task_failed(const Task& task, FailureReason reason, bool edge_server_reachable,
                                                 const PolicyConfig& policy) {
  if (!policy.reallocation || task.type != TaskType::SRT || task.on_server) return std::nullopt;
  if (!edge_server_reachable || task.reallocations >= policy.reallocation_cap) return std::nullopt;
  return reallocation_reason_for(reason);
}

LowBatteryOutcome on_low_battery(DeviceState& device, const PolicyConfig& policy,
                                 const std::function<bool(TaskId)>& may_reallocate) {
  LowBatteryOutcome out;
  if (!policy.reallocation) return out;
  device.blacklisted = true;
  out.blacklisted = true;
  if (!device.spec.is_computing()) return out;
  out.reallocate = device.processor.take_queued(
      [&](const Job& j) { return j.type != TaskType::HRT && may_reallocate(j.task); });
  return out;
}

bool rejects_on_arrival(const DeviceState& device, const Task& task, const PolicyConfig& policy) {
  return policy.reallocation && device.blacklisted && task.type != TaskType::HRT &&
         task.reallocations < policy.reallocation_cap;
}

double edge_server_service_ms(const Task& task, const DeviceSpec& server) {
  return expected_execution_time(task.size_mi, server.cpu_rate_mips) * kMsPerSecond;
}

}  // namespace pec
