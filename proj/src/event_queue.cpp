#include "pec/event_queue.hpp"

#include <string>

namespace pec {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::TaskGenerated: return "TaskGenerated";
    case EventKind::TransferComplete: return "TransferComplete";
    case EventKind::ExecutionComplete: return "ExecutionComplete";
    case EventKind::DeviceMoved: return "DeviceMoved";
    case EventKind::BatteryTick: return "BatteryTick";
    case EventKind::DeviceDeparted: return "DeviceDeparted";
    case EventKind::DeviceArrived: return "DeviceArrived";
    case EventKind::ResultReturned: return "ResultReturned";
  }
  return "?";
}

std::uint64_t EventQueue::schedule(Event e) {
  if (e.at_ms < now_ms_) {
    throw SimulationError("event " + std::string(to_string(e.kind)) + " scheduled at " +
                          std::to_string(e.at_ms) + " ms, before the clock (" +
                          std::to_string(now_ms_) + " ms)");
  }
  e.seq = next_seq_++;
  heap_.push(e);
  return e.seq;
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  now_ms_ = e.at_ms;
  return e;
}

}  // namespace pec
