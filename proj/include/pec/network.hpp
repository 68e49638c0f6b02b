#pragma once

#include <stdexcept>

#include "pec/rng.hpp"

namespace pec {

enum class Link { Internal, Main };

class UnreachableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two-tier network: the internal device network and the main network that
// reaches the edge server. No packet-level effects; each transfer sees its own
// fluctuating bandwidth.
struct NetworkModel {
  double internal_bandwidth_mbps = 100.0;
  double main_bandwidth_mbps = 50.0;
  double internal_latency_ms = 2.0;
  double main_latency_ms = 10.0;
  bool fluctuation = true;
  double fluctuation_min = 0.5;
  double fluctuation_max = 1.5;
};

// base latency + payload / (bandwidth * fluctuation). Zero-size messages pay
// only the base latency and draw nothing from `rng`.
double transfer_time(double payload_mb, Link link, const NetworkModel& network, Rng& rng,
                     bool sender_partitioned = false);

}  // namespace pec
