#include "pec/network.hpp"

#include "pec/domain.hpp"

namespace pec {

double transfer_time(double payload_mb, Link link, const NetworkModel& network, Rng& rng,
                     bool sender_partitioned) {
  if (link == Link::Main && sender_partitioned) {
    throw UnreachableError("sender is cut off from the main network");
  }
  if (payload_mb < 0.0) throw std::invalid_argument("transfer_time: negative payload");
  const bool internal = link == Link::Internal;
  const double base = internal ? network.internal_latency_ms : network.main_latency_ms;
  if (payload_mb == 0.0) return base;
  double bandwidth = internal ? network.internal_bandwidth_mbps : network.main_bandwidth_mbps;
  if (network.fluctuation) bandwidth *= rng.uniform(network.fluctuation_min, network.fluctuation_max);
  return base + payload_mb / bandwidth * kMsPerSecond;
}

}  // namespace pec
