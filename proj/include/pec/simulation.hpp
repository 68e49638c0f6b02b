#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pec/device.hpp"
#include "pec/domain.hpp"
#include "pec/event_queue.hpp"
#include "pec/metrics.hpp"
#include "pec/network.hpp"
#include "pec/orchestrator.hpp"
#include "pec/policy.hpp"
#include "pec/rng.hpp"
#include "pec/scenario.hpp"
#include "pec/trace.hpp"

namespace pec {

struct EngineStats {
  std::uint64_t events = 0;
  std::uint64_t tasks = 0;
  std::uint64_t preemptions = 0;
  std::uint64_t offloads = 0;
  std::uint64_t server_routes = 0;
  std::uint64_t blacklisted_devices = 0;
  std::uint64_t dead_devices = 0;
  std::uint64_t departures = 0;
};

struct RunOutput {
  RunMetrics metrics;
  QTable qtable;
  std::vector<ReallocationRecord> reallocations;
  EngineStats stats;
};

// One simulated run of one scenario under one policy and seed.
//
// The policy stream is the only source of randomness the orchestrator
// touches, so the workload, device placement, mobility and initial batteries
// are identical across policies for a given seed.
class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed, TraceSink* trace = nullptr,
             const QTable* warm_start = nullptr);

  // Runs with a hand-built population instead of the configured one.
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed, std::vector<DeviceState> devices,
             TraceSink* trace = nullptr, const QTable* warm_start = nullptr);

  // Adds a one-off task, generated at `at_ms`, on top of the arrival process.
  void inject_task(DeviceId generator, TaskType type, double at_ms, std::uint8_t tag = 0);

  RunOutput run();

  const std::vector<DeviceState>& devices() const { return devices_; }
  const DeviceState& server() const { return server_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  DeviceId server_id() const { return server_.id; }
  double now() const { return now_; }

 private:
  static constexpr std::uint32_t kInjected = 1U << 8;

  void init();
  void schedule(EventKind kind, double at_ms, std::uint32_t task = 0, std::uint32_t device = 0,
                std::uint32_t aux = 0, std::uint64_t token = 0);
  void handle(const Event& e);

  void on_generated(const Event& e);
  void on_transfer_complete(const Event& e);
  void on_execution_complete(const Event& e);
  void on_result_returned(const Event& e);
  void on_mobility_tick(const Event& e);
  void on_battery_tick(const Event& e);

  Task& create_task(DeviceId generator, TaskType type, std::uint8_t tag);
  void route(Task& task);
  void send_to_device(Task& task, DeviceId dest);
  void send_to_server(Task& task);
  void start_ready(DeviceState& host);
  void device_failure(Task& task, FailureReason reason, DeviceId where);
  void reallocate_to_server(Task& task, ReallocationReason reason, DeviceId from);
  void reallocate_for_power(Task& task, DeviceId from);
  void fail(Task& task, FailureReason reason);
  void succeed(Task& task);
  void learn(Task& task, bool success);
  void kill(DeviceState& device);
  void finish_horizon();

  bool server_reachable(const Task& task) const;
  bool within_reach(const DeviceState& a, const DeviceState& b) const;
  double progress() const { return now_ / horizon_ms_; }
  DeviceState& host(DeviceId id) { return id == server_.id ? server_ : devices_[id]; }

  void trace(TraceKind kind, std::int64_t task, std::int64_t device, std::string detail);
  bool tracing() const { return trace_ != nullptr; }
  std::string task_times(const Task& t) const;

  ScenarioConfig cfg_;
  PolicyConfig policy_;
  std::uint64_t seed_;
  TraceSink* trace_;
  double horizon_ms_;

  Rng arrivals_rng_;
  Rng mobility_rng_;
  Rng network_rng_;
  Orchestrator orchestrator_;

  std::vector<DeviceState> devices_;
  DeviceState server_;
  std::vector<std::size_t> computing_;
  std::vector<double> last_busy_ms_;
  std::vector<Task> tasks_;
  EventQueue queue_;
  double now_ = 0.0;
  double per_generator_rate_per_ms_[3] = {0, 0, 0};

  RunMetrics metrics_;
  std::vector<ReallocationRecord> reallocations_;
  EngineStats stats_;
  bool started_ = false;
};

}  // namespace pec
