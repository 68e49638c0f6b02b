#pragma once

#include <optional>

#include "pec/domain.hpp"
#include "pec/processor.hpp"
#include "pec/rng.hpp"

namespace pec {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(Position a, Position b);

struct Area {
  double width_m = 200.0;
  double height_m = 200.0;
};

struct DeviceState {
  DeviceId id = 0;
  DeviceSpec spec;
  Position position;
  std::optional<Position> waypoint;
  double battery_wh = 0.0;
  Processor processor;
  TagSet tags = 0;
  bool present = true;
  bool alive = true;
  bool blacklisted = false;
  bool main_partitioned = false;
  bool low_battery_notified = false;

  // remaining / capacity, or nullopt for mains-powered devices.
  std::optional<double> battery_fraction() const;
  bool supports(std::uint8_t tag) const { return (tags >> tag) & 1U; }
};

struct MobilityModel {
  Area area;
  double tick_ms = 1000.0;
  double depart_probability = 0.001;
  double arrive_probability = 0.001;
};

enum class MobilityChange { None, Departed, Arrived };

// Random waypoint motion for one tick. Present devices walk toward their
// waypoint at spec speed (drawing a new waypoint on arrival) and may leave the
// area; departed devices may come back. Exactly one presence draw is made per
// call for mobile devices; stationary devices are left untouched.
MobilityChange step_mobility(DeviceState& device, double dt_ms, const MobilityModel& model, Rng& rng);

// Energy drawn over dt at the given fraction of busy cores, in Wh.
double energy_consumed_wh(const DeviceSpec& spec, double busy_fraction, double dt_ms);

struct DrainOutcome {
  double consumed_wh = 0.0;
  bool died = false;
};

// Battery never goes below zero; a device reaching zero is marked dead.
DrainOutcome drain_battery(DeviceState& device, double dt_ms, double busy_fraction);

}  // namespace pec
