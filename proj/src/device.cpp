#include "pec/device.hpp"

#include <algorithm>
#include <cmath>

namespace pec {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::optional<double> DeviceState::battery_fraction() const {
  if (!spec.battery_powered) return std::nullopt;
  return battery_wh / spec.battery_capacity_wh;
}

namespace {

Position random_point(const Area& area, Rng& rng) {
  const double x = rng.uniform(0.0, area.width_m);
  const double y = rng.uniform(0.0, area.height_m);
  return {x, y};
}

}  // namespace

MobilityChange step_mobility(DeviceState& device, double dt_ms, const MobilityModel& model, Rng& rng) {
  if (!device.spec.mobile) return MobilityChange::None;

  if (device.present) {
    if (!device.waypoint) device.waypoint = random_point(model.area, rng);
    double budget = device.spec.speed_mps * dt_ms / kMsPerSecond;
    const double dx = device.waypoint->x - device.position.x;
    const double dy = device.waypoint->y - device.position.y;
    const double gap = std::hypot(dx, dy);
    if (gap <= budget) {
      device.position = *device.waypoint;
      device.waypoint = random_point(model.area, rng);
    } else {
      device.position.x += dx / gap * budget;
      device.position.y += dy / gap * budget;
    }
    if (rng.bernoulli(model.depart_probability)) {
      device.present = false;
      return MobilityChange::Departed;
    }
    return MobilityChange::None;
  }

  if (rng.bernoulli(model.arrive_probability)) {
    device.present = true;
    return MobilityChange::Arrived;
  }
  return MobilityChange::None;
}

double energy_consumed_wh(const DeviceSpec& spec, double busy_fraction, double dt_ms) {
  const double busy = std::clamp(busy_fraction, 0.0, 1.0);
  const double watts = spec.idle_power_w + (spec.max_power_w - spec.idle_power_w) * busy;
  return watts * dt_ms / kMsPerHour;
}

DrainOutcome drain_battery(DeviceState& device, double dt_ms, double busy_fraction) {
  DrainOutcome out;
  if (!device.spec.battery_powered || !device.alive) return out;
  const double want = energy_consumed_wh(device.spec, busy_fraction, dt_ms);
  out.consumed_wh = std::min(want, device.battery_wh);
  device.battery_wh -= out.consumed_wh;
  if (device.battery_wh <= 0.0) {
    device.battery_wh = 0.0;
    device.alive = false;
    out.died = true;
  }
  return out;
}

}  // namespace pec
