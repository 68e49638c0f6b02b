#pragma once

// Learning orchestrator: builds a state observation for a (task, device) pair,
// fuzzifies it, scores the device's reliability from the Q-table, picks an
// offloading destination, and learns from returned results.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pec/device.hpp"
#include "pec/domain.hpp"
#include "pec/rng.hpp"

namespace pec {

class NotACandidateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Observation {
  // task attributes
  double latency_budget_ms = 0.0;
  double size_mi = 0.0;
  bool generator_mobile = false;
  TaskType type = TaskType::NRT;
  // resource characteristics
  std::size_t queue_length = 0;
  int cpu_cores = 0;
  double load = 0.0;
  double cpu_rate_mips = 0.0;
  double expected_exec_s = 0.0;
  bool resource_mobile = false;
  std::optional<double> battery_fraction;  // nullopt: mains-powered

  double exec_budget_ratio() const { return expected_exec_s * kMsPerSecond / latency_budget_ms; }
};

Observation build_observation(const Task& task, const DeviceState& device);

enum class Level : std::uint8_t { Low = 0, Medium = 1, High = 2, Mains = 3 };
std::string_view to_string(Level l);

// Three triangular sets peaking at low/mid/high; the outer two are shoulders.
struct Membership {
  double low = 0.0;
  double mid = 0.5;
  double high = 1.0;
};

std::array<double, 3> memberships(double x, const Membership& m);

// Level with the largest membership; ties go to the lower level.
Level fuzzy_level(double x, const Membership& m);

struct FuzzyConfig {
  Membership load{0.0, 1.0, 2.0};
  Membership exec_ratio{0.0, 0.5, 1.0};
  Membership battery{0.2, 0.5, 1.0};
};

inline constexpr std::size_t kFuzzyStateCount = 3 * 3 * 4 * 3 * 2 * 2;

struct FuzzyObservation {
  TaskType type = TaskType::NRT;
  bool task_mobile = false;
  bool resource_mobile = false;
  Level load = Level::Low;
  Level exec = Level::Low;
  Level battery = Level::Low;

  std::uint16_t index() const;
  static FuzzyObservation from_index(std::uint16_t index);
  bool operator==(const FuzzyObservation&) const = default;
};

FuzzyObservation fuzzify(const Observation& obs, const FuzzyConfig& config = {});

enum class Action : std::uint8_t { Reject = 0, Assign = 1 };

class QTable {
 public:
  struct Entry {
    double q = 0.0;
    std::uint32_t visits = 0;
  };

  QTable();

  const Entry& at(const FuzzyObservation& s, Action a) const { return at(s.index(), a); }
  const Entry& at(std::uint16_t state, Action a) const;

  // Bandit-form update: q <- q + alpha * (r - q).
  void update(std::uint16_t state, Action a, double reward, double alpha);
  void update(const FuzzyObservation& s, Action a, double reward, double alpha) {
    update(s.index(), a, reward, alpha);
  }

  std::size_t visited_entries() const;

  // One line per visited entry:
  //   type task_mobile resource_mobile load exec battery action q visits
  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

  bool operator==(const QTable&) const;

 private:
  std::vector<Entry> entries_;
};

QTable q_update(QTable table, const FuzzyObservation& state, Action a, double reward, double alpha);

struct RewardWeights {
  double hrt = 3.0;
  double srt = 1.5;
  double nrt = 1.0;

  static RewardWeights unweighted() { return {1.0, 1.0, 1.0}; }
  double of(TaskType t) const;
};

// R = R_s - w * D_p, with D_p = T_d / T_l.
double reward(bool success, TaskType type, double delay_ms, double latency_budget_ms,
              const RewardWeights& weights = {});

struct Reliability {
  bool reliable = false;
  double score = 0.0;
};

// score = q(state, Assign); reliable when score >= threshold or the entry has
// fewer than `warmup_visits` visits.
Reliability classify_reliability(const QTable& table, const FuzzyObservation& state,
                                 double threshold = 0.0, std::uint32_t warmup_visits = 0);

struct SelectionParams {
  double epsilon = 0.0;
  double threshold = 0.0;
  std::uint32_t warmup_visits = 0;
  FuzzyConfig fuzzy;
};

struct Selection {
  DeviceId device = 0;
  std::uint16_t state = 0;
  double score = 0.0;
  double expected_exec_s = 0.0;
  bool explored = false;
  std::size_t reliable_count = 0;
};

// Epsilon-greedy choice among reliable candidates: explore uniformly with
// probability epsilon, otherwise take the best score, then the shortest
// expected execution time, then the lowest id. No reliable candidate -> nullopt.
std::optional<Selection> select_device(const Task& task, std::span<const DeviceState* const> candidates,
                                       const QTable& table, const SelectionParams& params, Rng& rng);

struct OrchestratorConfig {
  double alpha = 0.1;
  double epsilon_start = 0.3;
  double epsilon_end = 0.02;
  double reliability_threshold = 0.0;
  std::uint32_t warmup_visits = 5;
  FuzzyConfig fuzzy;
};

// Owns the Q-table for one run. The reliability bar for a task type is the
// configured threshold shifted by (1 - w), the reward of a success that lands
// exactly on its deadline; with unit weights it is the configured threshold.
class Orchestrator {
 public:
  Orchestrator(OrchestratorConfig config, RewardWeights weights, Rng rng);

  double epsilon(double progress) const;
  double threshold_for(TaskType t) const;

  std::optional<Selection> select(const Task& task, std::span<const DeviceState* const> candidates,
                                  double progress);

  // Reward for a returned result of an Assign decision made in `state`.
  double learn(std::uint16_t state, bool success, const Task& task, double delay_ms);

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const RewardWeights& weights() const { return weights_; }
  const OrchestratorConfig& config() const { return config_; }

 private:
  OrchestratorConfig config_;
  RewardWeights weights_;
  Rng rng_;
  QTable table_;
};

}  // namespace pec
