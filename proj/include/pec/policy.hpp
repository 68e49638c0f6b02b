#pragma once

// Robust layer over the learning orchestrator: edge-server fallback routing,
// HRT priority with NRT preemption, SRT reallocation after non-latency
// failures, and low-battery reallocation with device blacklisting.
//
// Every mechanism can be switched off on its own; with all of them off the
// policy is the plain adaptive orchestrator.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pec/device.hpp"
#include "pec/domain.hpp"
#include "pec/orchestrator.hpp"

namespace pec {

enum class Mechanism : std::uint8_t { Priority, Reallocation, RewardShaping, EdgeFallback };
inline constexpr std::array<Mechanism, 4> kMechanisms{Mechanism::Priority, Mechanism::Reallocation,
                                                      Mechanism::RewardShaping, Mechanism::EdgeFallback};
std::string_view to_string(Mechanism m);
std::optional<Mechanism> parse_mechanism(std::string_view s);

struct PolicyConfig {
  bool priority = true;
  bool reallocation = true;
  bool reward_shaping = true;
  bool edge_fallback = true;
  int reallocation_cap = 3;
  RewardWeights shaped_weights{};

  static PolicyConfig baseline();
  static PolicyConfig robust();

  bool enabled(Mechanism m) const;
  PolicyConfig without(Mechanism m) const;
  RewardWeights weights() const { return reward_shaping ? shaped_weights : RewardWeights::unweighted(); }

  // "adworch", "r-adworch", or "r-adworch-no-<mechanism>[-no-...]".
  std::string name() const;
};

// Accepts adworch|baseline, r-adworch|robust, and the ablated names produced by name().
std::optional<PolicyConfig> parse_policy(std::string_view name);

struct RoutingDecision {
  enum class Kind : std::uint8_t { OffloadTo, SendToEdgeServer, FailNow };
  Kind kind = Kind::FailNow;
  DeviceId device = 0;  // OffloadTo only

  static RoutingDecision offload(DeviceId d) { return {Kind::OffloadTo, d}; }
  static RoutingDecision edge_server() { return {Kind::SendToEdgeServer, 0}; }
  static RoutingDecision fail() { return {Kind::FailNow, 0}; }
  bool operator==(const RoutingDecision&) const = default;
};
std::string_view to_string(RoutingDecision::Kind k);

// `selected` is the orchestrator's pick (nullopt when no candidate is reliable).
RoutingDecision route_task(const Task& task, std::optional<DeviceId> selected, bool edge_server_reachable,
                           const PolicyConfig& policy);

struct ReallocationRecord {
  TaskId task = 0;
  TaskType type = TaskType::NRT;
  DeviceId from = 0;
  ReallocationReason reason = ReallocationReason::Mobility;
};

std::optional<ReallocationReason> reallocation_reason_for(FailureReason r);

// Reallocation reason when a failed task should go to the edge server,
// nullopt when the failure is final.
std::optional<ReallocationReason> on_task_failed(const Task& task, FailureReason reason, bool edge_server_reachable,
                                                 const PolicyConfig& policy);

struct LowBatteryOutcome {
  std::vector<Job> reallocate;  // queued non-HRT jobs, in queue order
  bool blacklisted = false;
};

// Marks the device as closed to new offloads and pulls its queued non-HRT jobs
// (including paused ones) for reallocation. Running jobs and queued HRT jobs
// stay. `may_reallocate` filters jobs that have exhausted their reallocation cap.
LowBatteryOutcome on_low_battery(DeviceState& device, const PolicyConfig& policy,
                                 const std::function<bool(TaskId)>& may_reallocate);

// A task arriving at a blacklisted device: non-HRT tasks bounce back to routing.
bool rejects_on_arrival(const DeviceState& device, const Task& task, const PolicyConfig& policy);

// Service time on the edge server (size / server rate), in milliseconds.
double edge_server_service_ms(const Task& task, const DeviceSpec& server);

}  // namespace pec
