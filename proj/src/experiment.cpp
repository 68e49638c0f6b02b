#include "pec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"

namespace pec {

namespace {

using nlohmann::ordered_json;

ordered_json to_json(const Stat& s) {
  return ordered_json{{"mean", s.mean}, {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}, {"n", s.n}};
}

ordered_json to_json(const std::optional<Stat>& s) { return s ? to_json(*s) : ordered_json(nullptr); }

ordered_json to_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

// Policies in first-seen order, each with its metrics in run order.
std::vector<std::pair<std::string, std::vector<RunMetrics>>> by_policy(std::span<const RunRecord> runs) {
  std::vector<std::pair<std::string, std::vector<RunMetrics>>> out;
  for (const auto& r : runs) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == r.policy; });
    if (it == out.end()) {
      out.emplace_back(r.policy, std::vector<RunMetrics>{});
      it = std::prev(out.end());
    }
    it->second.push_back(r.output.metrics);
  }
  return out;
}

std::optional<double> mean_of(std::span<const RunMetrics> runs, TaskType t,
                              std::optional<double> (*metric)(const RunMetrics&, TaskType)) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : runs) {
    if (auto v = metric(m, t)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

std::vector<RunRecord> run_batch(const ScenarioConfig& cfg, std::span<const PolicyConfig> policies,
                                 const BatchOptions& options) {
  validate(cfg);
  std::vector<RunRecord> out(policies.size() * cfg.seeds.size());
  if (out.empty()) return out;
  if (options.trace_dir) std::filesystem::create_directories(*options.trace_dir);

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < out.size(); i = next++) {
      const auto& policy = policies[i / cfg.seeds.size()];
      const auto seed = cfg.seeds[i % cfg.seeds.size()];
      try {
        ScenarioConfig run_cfg = cfg;
        run_cfg.policy = policy;
        std::ofstream trace_file;
        std::optional<TextTraceWriter> writer;
        if (options.trace_dir) {
          const auto path = *options.trace_dir / (policy.name() + "_seed" + std::to_string(seed) + ".trace");
          trace_file.open(path);
          if (!trace_file) throw std::runtime_error("cannot open trace file " + path.string());
          writer.emplace(trace_file);
        }
        Simulation sim(run_cfg, seed, writer ? &*writer : nullptr, options.warm_start);
        out[i] = RunRecord{policy.name(), seed, sim.run()};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = out.size();
      }
    }
  };

  unsigned jobs = options.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, out.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void write_runs_csv(std::ostream& out, std::string_view scenario, std::span<const RunRecord> runs) {
  out << kCsvHeader << '\n';
  for (const auto& r : runs) write_csv_rows(out, scenario, r.policy, r.seed, r.output.metrics);
}

std::vector<PolicyConfig> ablation_policies() {
  std::vector<PolicyConfig> out{PolicyConfig::robust()};
  for (auto m : kMechanisms) out.push_back(PolicyConfig::robust().without(m));
  return out;
}

std::vector<AblationRow> ablation_table(std::span<const RunRecord> runs) {
  const auto groups = by_policy(runs);
  auto find = [&](const std::string& name) -> const std::vector<RunMetrics>* {
    for (const auto& g : groups) {
      if (g.first == name) return &g.second;
    }
    return nullptr;
  };
  std::vector<AblationRow> rows;
  const auto* full = find(PolicyConfig::robust().name());
  if (full == nullptr) return rows;
  for (auto m : kMechanisms) {
    const auto* ablated = find(PolicyConfig::robust().without(m).name());
    if (ablated == nullptr) continue;
    AblationRow row;
    row.removed = m;
    for (auto t : kTaskTypes) {
      const auto fs = mean_of(*full, t, success_rate);
      const auto as = mean_of(*ablated, t, success_rate);
      if (fs && as) row.success_rate_drop[index_of(t)] = *fs - *as;
      const auto fd = mean_of(*full, t, average_delay);
      const auto ad = mean_of(*ablated, t, average_delay);
      if (fd && ad) row.delay_increase_ms[index_of(t)] = *ad - *fd;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string summary_json(std::string_view scenario, std::span<const RunRecord> runs) {
  ordered_json doc;
  doc["scenario"] = std::string(scenario);
  ordered_json policies = ordered_json::object();
  for (const auto& [name, metrics] : by_policy(runs)) {
    const auto s = aggregate(metrics);
    ordered_json p;
    p["runs"] = s.runs;
    ordered_json types = ordered_json::object();
    for (auto t : kTaskTypes) {
      const auto& ts = s.by_type[index_of(t)];
      types[std::string(to_string(t))] = ordered_json{{"success_rate", to_json(ts.success_rate)},
                                                     {"average_delay_ms", to_json(ts.average_delay_ms)},
                                                     {"generated", to_json(ts.generated)},
                                                     {"succeeded", to_json(ts.succeeded)}};
    }
    p["task_types"] = std::move(types);
    ordered_json realloc = ordered_json::object();
    for (std::size_t i = 0; i < kReallocationReasonCount; ++i) {
      realloc[std::string(to_string(static_cast<ReallocationReason>(i)))] = s.mean_reallocations[i];
    }
    p["mean_reallocations"] = std::move(realloc);
    ordered_json shares = ordered_json::object();
    for (std::size_t i = 0; i < kAttributionCount; ++i) {
      shares[std::string(to_string(static_cast<Attribution>(i)))] = s.attribution_share[i];
    }
    p["attribution_share"] = std::move(shares);
    policies[name] = std::move(p);
  }
  doc["policies"] = std::move(policies);
  const auto rows = ablation_table(runs);
  if (!rows.empty()) {
    ordered_json table = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json drop = ordered_json::object();
      ordered_json delay = ordered_json::object();
      for (auto t : kTaskTypes) {
        drop[std::string(to_string(t))] = to_json(row.success_rate_drop[index_of(t)]);
        delay[std::string(to_string(t))] = to_json(row.delay_increase_ms[index_of(t)]);
      }
      table.push_back(ordered_json{{"removed", std::string(to_string(row.removed))},
                                   {"success_rate_drop", std::move(drop)},
                                   {"delay_increase_ms", std::move(delay)}});
    }
    doc["ablation"] = std::move(table);
  }
  return doc.dump(2) + "\n";
}

}  // namespace pec
