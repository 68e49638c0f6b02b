#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pec/device.hpp"
#include "pec/domain.hpp"
#include "pec/network.hpp"
#include "pec/orchestrator.hpp"
#include "pec/policy.hpp"
#include "pec/rng.hpp"

namespace pec {

// Validation failure, carrying the dotted key path it refers to.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct AppProfile {
  double latency_ms = 0.0;
  double size_mi = 0.0;
  double request_mb = 0.0;
  double result_mb = 0.0;
};

enum class ArrivalProcess : std::uint8_t { Poisson, Periodic };
enum class RateInterpretation : std::uint8_t { SystemWide, PerDevice };

struct ArrivalConfig {
  ArrivalProcess process = ArrivalProcess::Poisson;
  RateInterpretation interpretation = RateInterpretation::PerDevice;
  std::array<double, 3> rates_per_minute{135.0, 135.0, 270.0};  // HRT, SRT, NRT
};

struct EnergyConfig {
  double threshold_fraction = 0.2;
  double tick_ms = 1000.0;
  double initial_charge_min = 0.1;
  double initial_charge_max = 1.0;
  double mobile_sensor_capacity_wh = 10.0;
  double sensor_power_w = 0.1;
};

struct EdgeServerConfig {
  double gips = 400.0;
  int cores = 16;
};

struct CapabilityConfig {
  int tags = 3;
  double tag_probability = 0.75;
};

struct ScenarioConfig {
  std::string name = "default";
  int device_count = 50;
  std::array<double, 5> device_mix{0.11, 0.18, 0.11, 0.28, 0.32};  // kEdgeDeviceKinds order
  ArrivalConfig arrivals;
  std::array<AppProfile, 3> apps{AppProfile{15.0, 200.0, 0.1, 0.01}, AppProfile{500.0, 5000.0, 2.0, 0.1},
                                 AppProfile{30000.0, 10000.0, 5.0, 0.1}};
  NetworkModel network;
  bool emergency = false;
  double emergency_fraction = 0.5;
  double duration_minutes = 30.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  PolicyConfig policy = PolicyConfig::robust();
  EnergyConfig energy;
  MobilityModel mobility;
  std::optional<double> reachability_radius_m;
  OrchestratorConfig orchestrator;
  EdgeServerConfig edge_server;
  CapabilityConfig capabilities;
  bool exclude_in_flight = true;

  double duration_ms() const { return duration_minutes * 60'000.0; }
  const AppProfile& app(TaskType t) const { return apps[index_of(t)]; }
};

// Parses a JSON document; an empty document yields all defaults. Unknown keys
// and out-of-range values are rejected with their key path.
ScenarioConfig parse_and_validate(std::string_view text);

// Throws ConfigError on the first violated constraint.
void validate(const ScenarioConfig& cfg);

// Resolved configuration as pretty-printed JSON, re-parseable by parse_and_validate.
std::string to_json_text(const ScenarioConfig& cfg);

// Largest-remainder apportionment of `total` over `fractions`; ties go to the
// earlier entry.
std::vector<int> apportion(std::span<const double> fractions, int total);

// Edge devices (no server), ids 0..n-1 grouped by kind in table order.
std::vector<DeviceState> build_population(const ScenarioConfig& cfg, Rng& rng);

}  // namespace pec
