#include "pec/processor.hpp"

#include <algorithm>
#include <stdexcept>

namespace pec {

Processor::Processor(int cores, bool priority) : slots_(static_cast<std::size_t>(cores)), priority_(priority) {
  if (cores <= 0) throw InvalidDeviceError("processor needs at least one core");
}

void Processor::accrue(double now_ms) {
  busy_integral_ms_ += busy_ * (now_ms - last_accrual_ms_);
  last_accrual_ms_ = now_ms;
}

double Processor::busy_core_ms(double now_ms) {
  accrue(now_ms);
  return busy_integral_ms_;
}

std::size_t Processor::non_hrt_head() const {
  std::size_t i = 0;
  while (i < queue_.size() && queue_[i].type == TaskType::HRT) ++i;
  return i;
}

EnqueueOutcome Processor::enqueue(Job job, double now_ms) {
  EnqueueOutcome out;
  if (!priority_ || job.type != TaskType::HRT) {
    queue_.push_back(job);
    return out;
  }

  const std::size_t head = non_hrt_head();
  out.jumped = head < queue_.size();
  queue_.insert(queue_.begin() + static_cast<std::ptrdiff_t>(head), job);

  if (busy_ < cores()) return out;

  std::optional<std::size_t> victim;
  double victim_remaining = -1.0;
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    const Slot& s = slots_[c];
    if (!s.occupied || s.job.type != TaskType::NRT) continue;
    const double remaining = s.job.remaining_ms - (now_ms - s.started_ms);
    if (remaining > victim_remaining) {
      victim = c;
      victim_remaining = remaining;
    }
  }
  if (!victim) return out;

  accrue(now_ms);
  Slot& s = slots_[*victim];
  Job paused = s.job;
  paused.remaining_ms = std::max(0.0, victim_remaining);
  paused.was_paused = true;
  s.occupied = false;
  --busy_;
  queue_.insert(queue_.begin() + static_cast<std::ptrdiff_t>(non_hrt_head()), paused);

  out.jumped = true;
  out.preempted = Preempted{paused.task, *victim, paused.remaining_ms};
  return out;
}

std::vector<Started> Processor::fill_free_cores(double now_ms) {
  std::vector<Started> started;
  if (queue_.empty() || busy_ == cores()) return started;
  accrue(now_ms);
  for (std::size_t c = 0; c < slots_.size() && !queue_.empty(); ++c) {
    Slot& s = slots_[c];
    if (s.occupied) continue;
    s.job = queue_.front();
    queue_.pop_front();
    s.started_ms = now_ms;
    s.token = next_token_++;
    s.occupied = true;
    ++busy_;
    started.push_back({s.job.task, c, now_ms + s.job.remaining_ms, s.token, s.job.was_paused});
  }
  return started;
}

std::optional<Job> Processor::finish(std::size_t core, std::uint64_t token, double now_ms) {
  if (core >= slots_.size()) return std::nullopt;
  Slot& s = slots_[core];
  if (!s.occupied || s.token != token) return std::nullopt;
  accrue(now_ms);
  s.occupied = false;
  --busy_;
  Job done = s.job;
  done.remaining_ms = 0.0;
  return done;
}

std::vector<Job> Processor::take_queued(const std::function<bool(const Job&)>& pred) {
  std::vector<Job> taken;
  std::deque<Job> kept;
  for (const Job& j : queue_) {
    if (pred(j)) {
      taken.push_back(j);
    } else {
      kept.push_back(j);
    }
  }
  queue_.swap(kept);
  return taken;
}

std::vector<Job> Processor::take_all(double now_ms) {
  accrue(now_ms);
  std::vector<Job> taken;
  for (Slot& s : slots_) {
    if (!s.occupied) continue;
    Job j = s.job;
    j.remaining_ms = std::max(0.0, j.remaining_ms - (now_ms - s.started_ms));
    taken.push_back(j);
    s.occupied = false;
  }
  busy_ = 0;
  taken.insert(taken.end(), queue_.begin(), queue_.end());
  queue_.clear();
  return taken;
}

std::optional<Job> Processor::running(std::size_t core) const {
  if (core >= slots_.size() || !slots_[core].occupied) return std::nullopt;
  return slots_[core].job;
}

std::optional<std::size_t> Processor::core_of(TaskId task) const {
  for (std::size_t c = 0; c < slots_.size(); ++c) {
    if (slots_[c].occupied && slots_[c].job.task == task) return c;
  }
  return std::nullopt;
}

}  // namespace pec
