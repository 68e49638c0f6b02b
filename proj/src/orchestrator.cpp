#include "pec/orchestrator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace pec {

Observation build_observation(const Task& task, const DeviceState& device) {
  if (!device.spec.is_computing()) {
    throw NotACandidateError("device " + std::to_string(device.id) + " cannot execute tasks");
  }
  if (!device.present) {
    throw NotACandidateError("device " + std::to_string(device.id) + " is outside the area");
  }
  Observation obs;
  obs.latency_budget_ms = task.latency_budget_ms;
  obs.size_mi = task.size_mi;
  obs.generator_mobile = task.generator_mobile;
  obs.type = task.type;
  obs.queue_length = device.processor.queue_length();
  obs.cpu_cores = device.spec.cpu_cores;
  obs.load = current_load(obs.queue_length, obs.cpu_cores);
  obs.cpu_rate_mips = device.spec.cpu_rate_mips;
  obs.expected_exec_s = expected_execution_time(task.size_mi, obs.cpu_rate_mips);
  obs.resource_mobile = device.spec.mobile;
  obs.battery_fraction = device.battery_fraction();
  return obs;
}

std::string_view to_string(Level l) {
  switch (l) {
    case Level::Low: return "low";
    case Level::Medium: return "medium";
    case Level::High: return "high";
    case Level::Mains: return "mains";
  }
  return "?";
}

namespace {

std::optional<Level> parse_level(std::string_view s) {
  for (auto l : {Level::Low, Level::Medium, Level::High, Level::Mains}) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

}  // namespace

std::array<double, 3> memberships(double x, const Membership& m) {
  std::array<double, 3> mu{0.0, 0.0, 0.0};
  if (x <= m.low) {
    mu[0] = 1.0;
  } else if (x < m.mid) {
    mu[0] = (m.mid - x) / (m.mid - m.low);
    mu[1] = (x - m.low) / (m.mid - m.low);
  } else if (x < m.high) {
    mu[1] = (m.high - x) / (m.high - m.mid);
    mu[2] = (x - m.mid) / (m.high - m.mid);
  } else {
    mu[2] = 1.0;
  }
  return mu;
}

Level fuzzy_level(double x, const Membership& m) {
  const auto mu = memberships(x, m);
  std::size_t best = 0;
  for (std::size_t i = 1; i < mu.size(); ++i) {
    if (mu[i] > mu[best]) best = i;
  }
  return static_cast<Level>(best);
}

std::uint16_t FuzzyObservation::index() const {
  std::uint16_t i = static_cast<std::uint16_t>(type);
  i = static_cast<std::uint16_t>(i * 3 + static_cast<std::uint16_t>(load));
  i = static_cast<std::uint16_t>(i * 3 + static_cast<std::uint16_t>(exec));
  i = static_cast<std::uint16_t>(i * 4 + static_cast<std::uint16_t>(battery));
  i = static_cast<std::uint16_t>(i * 2 + (task_mobile ? 1 : 0));
  i = static_cast<std::uint16_t>(i * 2 + (resource_mobile ? 1 : 0));
  return i;
}

FuzzyObservation FuzzyObservation::from_index(std::uint16_t index) {
  FuzzyObservation s;
  s.resource_mobile = index % 2;
  index /= 2;
  s.task_mobile = index % 2;
  index /= 2;
  s.battery = static_cast<Level>(index % 4);
  index /= 4;
  s.exec = static_cast<Level>(index % 3);
  index /= 3;
  s.load = static_cast<Level>(index % 3);
  index /= 3;
  s.type = static_cast<TaskType>(index);
  return s;
}

FuzzyObservation fuzzify(const Observation& obs, const FuzzyConfig& config) {
  FuzzyObservation f;
  f.type = obs.type;
  f.task_mobile = obs.generator_mobile;
  f.resource_mobile = obs.resource_mobile;
  f.load = fuzzy_level(obs.load, config.load);
  f.exec = fuzzy_level(obs.exec_budget_ratio(), config.exec_ratio);
  f.battery = obs.battery_fraction ? fuzzy_level(*obs.battery_fraction, config.battery) : Level::Mains;
  return f;
}

QTable::QTable() : entries_(kFuzzyStateCount * 2) {}

const QTable::Entry& QTable::at(std::uint16_t state, Action a) const {
  return entries_.at(static_cast<std::size_t>(state) * 2 + static_cast<std::size_t>(a));
}

void QTable::update(std::uint16_t state, Action a, double r, double alpha) {
  Entry& e = entries_.at(static_cast<std::size_t>(state) * 2 + static_cast<std::size_t>(a));
  e.q += alpha * (r - e.q);
  ++e.visits;
}

std::size_t QTable::visited_entries() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) { return e.visits > 0; }));
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void QTable::save(std::ostream& out) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    if (e.visits == 0) continue;
    const auto s = FuzzyObservation::from_index(static_cast<std::uint16_t>(i / 2));
    const auto a = static_cast<Action>(i % 2);
    out << to_string(s.type) << ' ' << (s.task_mobile ? 1 : 0) << ' ' << (s.resource_mobile ? 1 : 0) << ' '
        << to_string(s.load) << ' ' << to_string(s.exec) << ' ' << to_string(s.battery) << ' '
        << (a == Action::Assign ? "assign" : "reject") << ' ' << format_double(e.q) << ' ' << e.visits << '\n';
  }
}

QTable QTable::load(std::istream& in) {
  QTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string type, tm, rm, load, exec, battery, action, q;
    std::uint32_t visits = 0;
    if (!(ls >> type >> tm >> rm >> load >> exec >> battery >> action >> q >> visits)) {
      throw std::invalid_argument("q-table line " + std::to_string(lineno) + ": expected 9 fields");
    }
    FuzzyObservation s;
    auto tt = parse_task_type(type);
    auto l = parse_level(load), x = parse_level(exec), b = parse_level(battery);
    if (!tt || !l || !x || !b || (tm != "0" && tm != "1") || (rm != "0" && rm != "1") ||
        (action != "assign" && action != "reject")) {
      throw std::invalid_argument("q-table line " + std::to_string(lineno) + ": bad state tuple");
    }
    s.type = *tt;
    s.task_mobile = tm == "1";
    s.resource_mobile = rm == "1";
    s.load = *l;
    s.exec = *x;
    s.battery = *b;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(q.data(), q.data() + q.size(), value);
    if (ec != std::errc() || ptr != q.data() + q.size()) {
      throw std::invalid_argument("q-table line " + std::to_string(lineno) + ": bad q value");
    }
    const auto a = action == "assign" ? Action::Assign : Action::Reject;
    Entry& e = t.entries_.at(static_cast<std::size_t>(s.index()) * 2 + static_cast<std::size_t>(a));
    e.q = value;
    e.visits = visits;
  }
  return t;
}

bool QTable::operator==(const QTable& other) const {
  return std::equal(entries_.begin(), entries_.end(), other.entries_.begin(), other.entries_.end(),
                    [](const Entry& a, const Entry& b) { return a.q == b.q && a.visits == b.visits; });
}

QTable q_update(QTable table, const FuzzyObservation& state, Action a, double r, double alpha) {
  table.update(state, a, r, alpha);
  return table;
}

double RewardWeights::of(TaskType t) const {
  switch (t) {
    case TaskType::HRT: return hrt;
    case TaskType::SRT: return srt;
    case TaskType::NRT: return nrt;
  }
  return nrt;
}

double reward(bool success, TaskType type, double delay_ms, double latency_budget_ms,
              const RewardWeights& weights) {
  if (latency_budget_ms <= 0.0) throw std::invalid_argument("reward: latency budget must be > 0");
  const double rs = success ? 1.0 : 0.0;
  const double penalty = delay_ms / latency_budget_ms;
  return rs - weights.of(type) * penalty;
}

Reliability classify_reliability(const QTable& table, const FuzzyObservation& state, double threshold,
                                 std::uint32_t warmup_visits) {
  const auto& e = table.at(state, Action::Assign);
  return {e.visits < warmup_visits || e.q >= threshold, e.q};
}

namespace {

struct Scored {
  const DeviceState* device;
  std::uint16_t state;
  double score;
  double exec_s;
};

bool better(const Scored& a, const Scored& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.exec_s != b.exec_s) return a.exec_s < b.exec_s;
  return a.device->id < b.device->id;
}

}  // namespace

std::optional<Selection> select_device(const Task& task, std::span<const DeviceState* const> candidates,
                                       const QTable& table, const SelectionParams& params, Rng& rng) {
  std::vector<Scored> reliable;
  reliable.reserve(candidates.size());
  for (const DeviceState* d : candidates) {
    const Observation obs = build_observation(task, *d);
    const FuzzyObservation f = fuzzify(obs, params.fuzzy);
    const Reliability r = classify_reliability(table, f, params.threshold, params.warmup_visits);
    if (r.reliable) reliable.push_back({d, f.index(), r.score, obs.expected_exec_s});
  }
  if (reliable.empty()) return std::nullopt;

  const Scored* pick = nullptr;
  bool explored = false;
  if (params.epsilon > 0.0 && rng.bernoulli(params.epsilon)) {
    pick = &reliable[rng.index(reliable.size())];
    explored = true;
  } else {
    pick = &*std::min_element(reliable.begin(), reliable.end(), better);
  }
  return Selection{pick->device->id, pick->state, pick->score, pick->exec_s, explored, reliable.size()};
}

Orchestrator::Orchestrator(OrchestratorConfig config, RewardWeights weights, Rng rng)
    : config_(config), weights_(weights), rng_(rng) {}

double Orchestrator::epsilon(double progress) const {
  const double p = std::clamp(progress, 0.0, 1.0);
  return config_.epsilon_start + (config_.epsilon_end - config_.epsilon_start) * p;
}

double Orchestrator::threshold_for(TaskType t) const {
  return config_.reliability_threshold + (1.0 - weights_.of(t));
}

std::optional<Selection> Orchestrator::select(const Task& task, std::span<const DeviceState* const> candidates,
                                              double progress) {
  SelectionParams params;
  params.epsilon = epsilon(progress);
  params.threshold = threshold_for(task.type);
  params.warmup_visits = config_.warmup_visits;
  params.fuzzy = config_.fuzzy;
  return select_device(task, candidates, table_, params, rng_);
}

double Orchestrator::learn(std::uint16_t state, bool success, const Task& task, double delay_ms) {
  const double r = reward(success, task.type, delay_ms, task.latency_budget_ms, weights_);
  table_.update(state, Action::Assign, r, config_.alpha);
  return r;
}

}  // namespace pec
