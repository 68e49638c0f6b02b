#include "pec/simulation.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pec {

namespace {

std::string kv(std::string_view key, std::string_view value) {
  std::string s;
  s.reserve(key.size() + value.size() + 2);
  s.append(key).append("=").append(value);
  return s;
}

std::string kv(std::string_view key, double value) { return kv(key, format_number(value)); }

std::string join(std::initializer_list<std::string> parts) {
  std::string s;
  for (const auto& p : parts) {
    if (!s.empty()) s += ' ';
    s += p;
  }
  return s;
}

}  // namespace

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed, TraceSink* trace, const QTable* warm_start)
    : Simulation(cfg, seed,
                 [&] {
                   Rng population(seed, Stream::Population);
                   return build_population(cfg, population);
                 }(),
                 trace, warm_start) {}

Simulation::Simulation(const ScenarioConfig& cfg, std::uint64_t seed, std::vector<DeviceState> devices,
                       TraceSink* trace, const QTable* warm_start)
    : cfg_(cfg),
      policy_(cfg.policy),
      seed_(seed),
      trace_(trace),
      horizon_ms_(cfg.duration_ms()),
      arrivals_rng_(seed, Stream::Arrivals),
      mobility_rng_(seed, Stream::Mobility),
      network_rng_(seed, Stream::Network),
      orchestrator_(cfg.orchestrator, cfg.policy.weights(), Rng(seed, Stream::Policy)),
      devices_(std::move(devices)) {
  if (horizon_ms_ <= 0.0) throw SimulationError("simulation horizon must be positive");
  if (warm_start != nullptr) orchestrator_.table() = *warm_start;
  server_.id = static_cast<DeviceId>(devices_.size());
  server_.spec = edge_server_spec(cfg.edge_server.gips, cfg.edge_server.cores);
  server_.processor = Processor(server_.spec.cpu_cores, false);
  server_.tags = static_cast<TagSet>(0xFF);
  for (std::size_t i = 0; i < devices_.size(); ++i) {
    if (devices_[i].id != i) throw SimulationError("device ids must be 0..n-1 in order");
    if (!devices_[i].spec.is_computing()) continue;
    devices_[i].processor = Processor(devices_[i].spec.cpu_cores, policy_.priority);
    computing_.push_back(i);
  }
  last_busy_ms_.assign(devices_.size(), 0.0);
}

void Simulation::schedule(EventKind kind, double at_ms, std::uint32_t task, std::uint32_t device, std::uint32_t aux,
                          std::uint64_t token) {
  Event e;
  e.at_ms = at_ms;
  e.kind = kind;
  e.task = task;
  e.device = device;
  e.aux = aux;
  e.token = token;
  queue_.schedule(e);
}

void Simulation::inject_task(DeviceId generator, TaskType type, double at_ms, std::uint8_t tag) {
  if (generator >= devices_.size()) throw SimulationError("inject_task: unknown generator");
  if (started_) throw SimulationError("inject_task: run already started");
  schedule(EventKind::TaskGenerated, at_ms, 0, generator,
           static_cast<std::uint32_t>(index_of(type)) | kInjected | (static_cast<std::uint32_t>(tag) << 16));
}

void Simulation::init() {
  std::size_t generators = 0;
  for (const auto& d : devices_) generators += d.spec.generates_tasks ? 1 : 0;
  for (auto t : kTaskTypes) {
    const double per_minute = cfg_.arrivals.rates_per_minute[index_of(t)];
    double rate = per_minute / 60'000.0;
    if (cfg_.arrivals.interpretation == RateInterpretation::SystemWide) {
      rate = generators == 0 ? 0.0 : rate / static_cast<double>(generators);
    }
    per_generator_rate_per_ms_[index_of(t)] = rate;
  }
  for (const auto& d : devices_) {
    if (!d.spec.generates_tasks) continue;
    for (auto t : kTaskTypes) {
      const double rate = per_generator_rate_per_ms_[index_of(t)];
      if (rate <= 0.0) continue;
      const double first = cfg_.arrivals.process == ArrivalProcess::Poisson
                               ? arrivals_rng_.exponential(rate)
                               : arrivals_rng_.uniform(0.0, 1.0 / rate);
      schedule(EventKind::TaskGenerated, first, 0, d.id, static_cast<std::uint32_t>(index_of(t)));
    }
  }
  bool any_mobile = false;
  for (const auto& d : devices_) any_mobile = any_mobile || d.spec.mobile;
  if (any_mobile) schedule(EventKind::DeviceMoved, cfg_.mobility.tick_ms);
  schedule(EventKind::BatteryTick, 0.0);
}

RunOutput Simulation::run() {
  if (started_) throw SimulationError("run() may only be called once");
  started_ = true;
  init();
  while (!queue_.empty() && queue_.top().at_ms < horizon_ms_) {
    const Event e = queue_.pop();
    now_ = e.at_ms;
    ++stats_.events;
    handle(e);
  }
  now_ = horizon_ms_;
  finish_horizon();
  RunOutput out;
  out.metrics = metrics_;
  out.qtable = orchestrator_.table();
  out.reallocations = reallocations_;
  out.stats = stats_;
  return out;
}

void Simulation::handle(const Event& e) {
  switch (e.kind) {
    case EventKind::TaskGenerated: on_generated(e); break;
    case EventKind::TransferComplete: on_transfer_complete(e); break;
    case EventKind::ExecutionComplete: on_execution_complete(e); break;
    case EventKind::ResultReturned: on_result_returned(e); break;
    case EventKind::DeviceMoved: on_mobility_tick(e); break;
    case EventKind::BatteryTick: on_battery_tick(e); break;
    case EventKind::DeviceDeparted:
    case EventKind::DeviceArrived:
      // Presence changes are folded into the mobility tick.
      break;
  }
}

void Simulation::trace(TraceKind kind, std::int64_t task, std::int64_t device, std::string detail) {
  TraceRecord r;
  r.time_ms = now_;
  r.kind = kind;
  r.task = task;
  r.device = device;
  r.detail = std::move(detail);
  trace_->record(r);
}

std::string Simulation::task_times(const Task& t) const {
  return join({kv("net", t.network_ms), kv("wait", t.waiting_ms), kv("exec", t.execution_ms)});
}

bool Simulation::within_reach(const DeviceState& a, const DeviceState& b) const {
  if (!cfg_.reachability_radius_m) return true;
  return distance(a.position, b.position) <= *cfg_.reachability_radius_m;
}

bool Simulation::server_reachable(const Task& task) const {
  const auto& g = devices_[task.generator];
  return g.present && g.alive && !g.main_partitioned;
}

Task& Simulation::create_task(DeviceId generator, TaskType type, std::uint8_t tag) {
  const auto& gen = devices_[generator];
  const auto& app = cfg_.app(type);
  Task t;
  t.id = static_cast<TaskId>(tasks_.size());
  t.type = type;
  t.size_mi = app.size_mi;
  t.latency_budget_ms = app.latency_ms;
  t.request_mb = app.request_mb;
  t.result_mb = app.result_mb;
  t.generated_at_ms = now_;
  t.generator = generator;
  t.generator_mobile = gen.spec.mobile;
  t.required_tag = tag;
  tasks_.push_back(t);
  ++stats_.tasks;
  metrics_.record_generated(type);
  if (tracing()) {
    trace(TraceKind::TaskGenerated, t.id, generator, join({kv("type", to_string(type)), kv("tag", double(tag))}));
  }
  return tasks_.back();
}

void Simulation::on_generated(const Event& e) {
  const auto type = static_cast<TaskType>(e.aux & 0xFF);
  auto& gen = devices_[e.device];
  std::uint8_t tag = 0;
  if ((e.aux & kInjected) != 0) {
    tag = static_cast<std::uint8_t>(e.aux >> 16);
  } else {
    // Draws happen whether or not the generator can emit, so the workload
    // stream stays aligned across policies.
    if (cfg_.capabilities.tags > 0) tag = static_cast<std::uint8_t>(arrivals_rng_.index(cfg_.capabilities.tags));
    const double rate = per_generator_rate_per_ms_[index_of(type)];
    const double gap =
        cfg_.arrivals.process == ArrivalProcess::Poisson ? arrivals_rng_.exponential(rate) : 1.0 / rate;
    schedule(EventKind::TaskGenerated, now_ + gap, 0, e.device, e.aux);
  }
  if (!gen.present || !gen.alive) return;
  Task& task = create_task(gen.id, type, tag);
  route(task);
}

void Simulation::route(Task& task) {
  const auto& gen = devices_[task.generator];
  std::vector<const DeviceState*> candidates;
  candidates.reserve(computing_.size());
  for (auto i : computing_) {
    const auto& d = devices_[i];
    if (!d.present || !d.alive || d.blacklisted) continue;
    if (!within_reach(gen, d)) continue;
    candidates.push_back(&d);
  }
  const auto sel = orchestrator_.select(task, candidates, progress());
  const bool reachable = server_reachable(task);
  const auto decision =
      route_task(task, sel ? std::optional<DeviceId>(sel->device) : std::nullopt, reachable, policy_);
  if (tracing()) {
    std::int64_t dest = -1;
    if (decision.kind == RoutingDecision::Kind::OffloadTo) dest = decision.device;
    if (decision.kind == RoutingDecision::Kind::SendToEdgeServer) dest = server_.id;
    trace(TraceKind::Routed, task.id, dest,
          join({kv("type", to_string(task.type)), kv("decision", to_string(decision.kind)),
                kv("candidates", double(candidates.size())),
                kv("reliable", double(sel ? sel->reliable_count : 0)), kv("reachable", reachable ? "1" : "0"),
                kv("explored", sel && sel->explored ? "1" : "0")}));
  }
  switch (decision.kind) {
    case RoutingDecision::Kind::OffloadTo:
      ++stats_.offloads;
      task.assigned_to = decision.device;
      task.on_server = false;
      task.decision_state = sel->state;
      send_to_device(task, decision.device);
      break;
    case RoutingDecision::Kind::SendToEdgeServer:
      ++stats_.server_routes;
      task.via_fallback = true;
      task.assigned_to = server_.id;
      task.on_server = true;
      send_to_server(task);
      break;
    case RoutingDecision::Kind::FailNow:
      fail(task, FailureReason::NoAvailableResources);
      break;
  }
}

void Simulation::send_to_device(Task& task, DeviceId dest) {
  enter_phase(task, Phase::Network, now_);
  const double dt =
      dest == task.generator ? 0.0 : transfer_time(task.request_mb, Link::Internal, cfg_.network, network_rng_);
  schedule(EventKind::TransferComplete, now_ + dt, task.id, dest, 0, ++task.token);
}

void Simulation::send_to_server(Task& task) {
  enter_phase(task, Phase::Network, now_);
  const double dt = transfer_time(task.request_mb, Link::Main, cfg_.network, network_rng_,
                                  devices_[task.generator].main_partitioned);
  schedule(EventKind::TransferComplete, now_ + dt, task.id, server_.id, 0, ++task.token);
}

void Simulation::on_transfer_complete(const Event& e) {
  Task& task = tasks_[e.task];
  if (e.token != task.token || is_terminal(task.status)) return;
  if (tracing()) trace(TraceKind::TransferComplete, task.id, e.device, kv("type", to_string(task.type)));
  transition(task, TaskStatus::Queued);
  DeviceState& dest = host(e.device);
  if (e.device != server_.id) {
    if (!dest.alive) return device_failure(task, FailureReason::DeadDevice, dest.id);
    if (!dest.present) return device_failure(task, FailureReason::Mobility, dest.id);
    if (rejects_on_arrival(dest, task, policy_)) return reallocate_for_power(task, dest.id);
    if (cfg_.capabilities.tags > 0 && !dest.supports(task.required_tag)) {
      return device_failure(task, FailureReason::IncompatibleHardwareSoftware, dest.id);
    }
  }
  enter_phase(task, Phase::Waiting, now_);
  Job job;
  job.task = task.id;
  job.type = task.type;
  job.remaining_ms = expected_execution_time(task.size_mi, dest.spec.cpu_rate_mips) * kMsPerSecond;
  const auto outcome = dest.processor.enqueue(job, now_);
  if (outcome.jumped && task.type == TaskType::HRT) task.jumped_queue = true;
  if (tracing()) {
    trace(TraceKind::Queued, task.id, dest.id,
          join({kv("type", to_string(task.type)), kv("jumped", outcome.jumped ? "1" : "0"),
                kv("queue", double(dest.processor.queue_length()))}));
  }
  if (outcome.preempted) {
    ++stats_.preemptions;
    Task& victim = tasks_[outcome.preempted->task];
    transition(victim, TaskStatus::Paused);
    transition(victim, TaskStatus::Queued);
    enter_phase(victim, Phase::Waiting, now_);
    if (tracing()) {
      trace(TraceKind::Paused, victim.id, dest.id,
            join({kv("type", to_string(victim.type)), kv("by", double(task.id)),
                  kv("remaining", outcome.preempted->remaining_ms)}));
    }
  }
  start_ready(dest);
}

void Simulation::start_ready(DeviceState& h) {
  for (const auto& s : h.processor.fill_free_cores(now_)) {
    Task& task = tasks_[s.task];
    transition(task, TaskStatus::Executing);
    enter_phase(task, Phase::Executing, now_);
    schedule(EventKind::ExecutionComplete, s.finish_at_ms, task.id, h.id, static_cast<std::uint32_t>(s.core),
             s.token);
    if (tracing()) {
      trace(TraceKind::Started, task.id, h.id,
            join({kv("type", to_string(task.type)), kv("core", double(s.core)), kv("resumed", s.resumed ? "1" : "0"),
                  kv("until", s.finish_at_ms)}));
    }
  }
}

void Simulation::on_execution_complete(const Event& e) {
  DeviceState& h = host(e.device);
  const auto job = h.processor.finish(e.aux, e.token, now_);
  if (!job) return;
  Task& task = tasks_[job->task];
  if (tracing()) trace(TraceKind::ExecutionComplete, task.id, h.id, kv("type", to_string(task.type)));
  enter_phase(task, Phase::Network, now_);
  double dt = 0.0;
  if (h.id == server_.id) {
    dt = transfer_time(task.result_mb, Link::Main, cfg_.network, network_rng_);
  } else if (h.id != task.generator) {
    dt = transfer_time(task.result_mb, Link::Internal, cfg_.network, network_rng_);
  }
  schedule(EventKind::ResultReturned, now_ + dt, task.id, h.id, 0, ++task.token);
  start_ready(h);
}

void Simulation::on_result_returned(const Event& e) {
  Task& task = tasks_[e.task];
  if (e.token != task.token || is_terminal(task.status)) return;
  if (tracing()) trace(TraceKind::ResultReturned, task.id, e.device, kv("type", to_string(task.type)));
  const auto& gen = devices_[task.generator];
  if (e.device == server_.id) {
    if (!gen.present) return fail(task, FailureReason::Mobility);
    if (!gen.alive) return fail(task, FailureReason::DeadDevice);
  } else {
    const auto& exec = devices_[e.device];
    if (!exec.present || !gen.present || !within_reach(gen, exec)) {
      return device_failure(task, FailureReason::Mobility, exec.id);
    }
    if (!gen.alive) return device_failure(task, FailureReason::DeadDevice, exec.id);
  }
  if (is_deadline_met(now_, task.generated_at_ms, task.latency_budget_ms)) {
    succeed(task);
  } else {
    learn(task, false);
    fail(task, FailureReason::DeadlineMissed);
  }
}

void Simulation::learn(Task& task, bool success) {
  if (!task.decision_state) return;
  orchestrator_.learn(*task.decision_state, success, task, now_ - task.generated_at_ms);
  task.decision_state.reset();
}

void Simulation::device_failure(Task& task, FailureReason reason, DeviceId where) {
  learn(task, false);
  const auto realloc = on_task_failed(task, reason, server_reachable(task), policy_);
  if (realloc) return reallocate_to_server(task, *realloc, where);
  fail(task, reason);
}

void Simulation::reallocate_to_server(Task& task, ReallocationReason reason, DeviceId from) {
  enter_phase(task, Phase::None, now_);
  transition(task, TaskStatus::Reallocated);
  ++task.reallocations;
  metrics_.record_reallocation(task.type, reason);
  reallocations_.push_back({task.id, task.type, from, reason});
  if (tracing()) {
    trace(TraceKind::Reallocated, task.id, from,
          join({kv("type", to_string(task.type)), kv("reason", to_string(reason)), kv("to", "server")}));
  }
  transition(task, TaskStatus::Pending);
  task.assigned_to = server_.id;
  task.on_server = true;
  send_to_server(task);
}

void Simulation::reallocate_for_power(Task& task, DeviceId from) {
  const auto reason = ReallocationReason::InsufficientPower;
  enter_phase(task, Phase::None, now_);
  transition(task, TaskStatus::Reallocated);
  ++task.reallocations;
  task.decision_state.reset();
  metrics_.record_reallocation(task.type, reason);
  reallocations_.push_back({task.id, task.type, from, reason});
  if (tracing()) {
    trace(TraceKind::Reallocated, task.id, from,
          join({kv("type", to_string(task.type)), kv("reason", to_string(reason)), kv("to", "orchestrator")}));
  }
  transition(task, TaskStatus::Pending);
  task.assigned_to.reset();
  route(task);
}

void Simulation::fail(Task& task, FailureReason reason) {
  enter_phase(task, Phase::None, now_);
  transition(task, TaskStatus::Failed);
  task.failure = reason;
  metrics_.record_failure(task.type, reason, task.network_ms, task.waiting_ms, task.execution_ms);
  if (tracing()) {
    const std::int64_t where = task.assigned_to ? std::int64_t(*task.assigned_to) : -1;
    trace(TraceKind::Failed, task.id, where,
          join({kv("type", to_string(task.type)), kv("reason", to_string(reason)), task_times(task)}));
  }
}

void Simulation::succeed(Task& task) {
  learn(task, true);
  enter_phase(task, Phase::None, now_);
  transition(task, TaskStatus::Succeeded);
  const auto tag = attribute_success(task);
  metrics_.record_success(task.type, task.network_ms, task.waiting_ms, task.execution_ms, tag);
  if (tracing()) {
    trace(TraceKind::Succeeded, task.id, task.assigned_to ? std::int64_t(*task.assigned_to) : -1,
          join({kv("type", to_string(task.type)), kv("tag", to_string(tag)), task_times(task)}));
  }
}

void Simulation::on_mobility_tick(const Event&) {
  const double dt = cfg_.mobility.tick_ms;
  for (auto& d : devices_) {
    if (!d.spec.mobile) continue;
    const auto change = step_mobility(d, dt, cfg_.mobility, mobility_rng_);
    if (change == MobilityChange::Departed) {
      ++stats_.departures;
      if (tracing()) trace(TraceKind::DeviceDeparted, -1, d.id, "");
    } else if (change == MobilityChange::Arrived) {
      if (tracing()) trace(TraceKind::DeviceArrived, -1, d.id, "");
    }
  }
  schedule(EventKind::DeviceMoved, now_ + dt);
}

void Simulation::kill(DeviceState& d) {
  ++stats_.dead_devices;
  if (tracing()) trace(TraceKind::DeviceDead, -1, d.id, "");
  if (!d.spec.is_computing()) return;
  for (const auto& job : d.processor.take_all(now_)) {
    device_failure(tasks_[job.task], FailureReason::DeadDevice, d.id);
  }
}

void Simulation::on_battery_tick(const Event&) {
  const double dt = cfg_.energy.tick_ms;
  for (auto i : computing_) {
    auto& d = devices_[i];
    const double busy = d.processor.busy_core_ms(now_);
    const double span = std::min(now_, dt);
    if (d.alive && d.spec.battery_powered && span > 0.0) {
      const double fraction = (busy - last_busy_ms_[i]) / (span * d.spec.cpu_cores);
      if (drain_battery(d, span, fraction).died) kill(d);
    }
    last_busy_ms_[i] = busy;
    if (!d.alive || d.low_battery_notified) continue;
    const auto level = d.battery_fraction();
    if (!level || *level >= cfg_.energy.threshold_fraction) continue;
    d.low_battery_notified = true;
    const auto outcome =
        on_low_battery(d, policy_, [&](TaskId id) { return tasks_[id].reallocations < policy_.reallocation_cap; });
    if (!outcome.blacklisted) continue;
    ++stats_.blacklisted_devices;
    if (tracing()) {
      trace(TraceKind::Blacklisted, -1, d.id,
            join({kv("battery", *level), kv("reallocated", double(outcome.reallocate.size()))}));
    }
    for (const auto& job : outcome.reallocate) reallocate_for_power(tasks_[job.task], d.id);
  }
  // Non-computing battery devices (mobile sensors) drain at their idle draw.
  for (auto& d : devices_) {
    if (d.spec.is_computing() || !d.spec.battery_powered || !d.alive || now_ <= 0.0) continue;
    if (drain_battery(d, std::min(now_, dt), 0.0).died) kill(d);
  }
  schedule(EventKind::BatteryTick, now_ + dt);
}

void Simulation::finish_horizon() {
  for (auto& task : tasks_) {
    if (is_terminal(task.status)) continue;
    const bool overdue = now_ - task.generated_at_ms > task.latency_budget_ms;
    if (overdue || !cfg_.exclude_in_flight) {
      fail(task, FailureReason::DeadlineMissed);
      continue;
    }
    enter_phase(task, Phase::None, now_);
    metrics_.record_excluded(task.type);
    if (tracing()) trace(TraceKind::Excluded, task.id, -1, kv("type", to_string(task.type)));
  }
}

}  // namespace pec
