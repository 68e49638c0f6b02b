#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace pec {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EventKind : std::uint8_t {
  TaskGenerated,
  TransferComplete,
  ExecutionComplete,
  DeviceMoved,
  BatteryTick,
  DeviceDeparted,
  DeviceArrived,
  ResultReturned,
};
std::string_view to_string(EventKind k);

struct Event {
  double at_ms = 0.0;
  std::uint64_t seq = 0;  // assigned by the queue
  EventKind kind = EventKind::TaskGenerated;
  std::uint32_t task = 0;
  std::uint32_t device = 0;
  std::uint32_t aux = 0;
  std::uint64_t token = 0;
};

// Min-queue on (at, seq). Scheduling into the past is a fatal error.
class EventQueue {
 public:
  std::uint64_t schedule(Event e);  // returns the assigned seq
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double now() const { return now_ms_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at_ms != b.at_ms) return a.at_ms > b.at_ms;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  double now_ms_ = 0.0;
};

}  // namespace pec
