#pragma once

// Batches of runs over policies and seeds, and their reports.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pec/metrics.hpp"
#include "pec/policy.hpp"
#include "pec/scenario.hpp"
#include "pec/simulation.hpp"

namespace pec {

struct RunRecord {
  std::string policy;
  std::uint64_t seed = 0;
  RunOutput output;
};

struct BatchOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  const QTable* warm_start = nullptr;
  std::optional<std::filesystem::path> trace_dir;  // one <policy>_seed<n>.trace per run
};

// Runs every (policy, seed) pair. Results come back ordered by policy, then
// seed, whatever the number of worker threads.
std::vector<RunRecord> run_batch(const ScenarioConfig& cfg, std::span<const PolicyConfig> policies,
                                 const BatchOptions& options = {});

void write_runs_csv(std::ostream& out, std::string_view scenario, std::span<const RunRecord> runs);

// Full robust policy followed by one variant per removed mechanism.
std::vector<PolicyConfig> ablation_policies();

struct AblationRow {
  Mechanism removed = Mechanism::Priority;
  // full minus ablated, mean over seeds; nullopt when undefined on either side
  std::array<std::optional<double>, 3> success_rate_drop{};
  std::array<std::optional<double>, 3> delay_increase_ms{};
};

// Empty unless the runs hold the full robust policy and at least one ablation.
std::vector<AblationRow> ablation_table(std::span<const RunRecord> runs);

// Per-policy summary (mean, sample stddev, min, max over seeds) plus the
// ablation table when the runs include one. Pretty-printed JSON.
std::string summary_json(std::string_view scenario, std::span<const RunRecord> runs);

}  // namespace pec
