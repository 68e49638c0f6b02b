#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "pec/domain.hpp"

namespace pec {

// A unit of work held by a processor. remaining_ms is the service still owed;
// it is only up to date for queued jobs (running jobs are charged on exit).
struct Job {
  TaskId task = 0;
  TaskType type = TaskType::NRT;
  double remaining_ms = 0.0;
  bool was_paused = false;
};

struct Started {
  TaskId task = 0;
  std::size_t core = 0;
  double finish_at_ms = 0.0;
  std::uint64_t token = 0;
  bool resumed = false;  // had been paused before
};

struct Preempted {
  TaskId task = 0;
  std::size_t core = 0;
  double remaining_ms = 0.0;
};

struct EnqueueOutcome {
  bool jumped = false;  // inserted ahead of a queued lower-class task or preempted one
  std::optional<Preempted> preempted;
};

// Per-core executor with a single waiting queue.
//
// Without priority the queue is FIFO and nothing is preempted. With priority,
// HRT jobs go ahead of every non-HRT job (FIFO among HRT); SRT and NRT share
// one FIFO class. An HRT arrival that finds every core busy pauses the running
// NRT job with the most remaining service, which goes back to the head of the
// non-HRT class and later resumes with its remaining service intact. SRT jobs
// are never paused and never preempt.
class Processor {
 public:
  Processor() = default;
  Processor(int cores, bool priority);

  EnqueueOutcome enqueue(Job job, double now_ms);

  // Starts queued jobs on free cores in queue order.
  std::vector<Started> fill_free_cores(double now_ms);

  // Frees `core` if `token` matches the job running there; stale tokens return nullopt.
  std::optional<Job> finish(std::size_t core, std::uint64_t token, double now_ms);

  // Removes queued jobs matching `pred`, preserving queue order.
  std::vector<Job> take_queued(const std::function<bool(const Job&)>& pred);

  // Removes every job, running ones first (by core), then the queue.
  std::vector<Job> take_all(double now_ms);

  std::size_t queue_length() const { return queue_.size(); }
  int cores() const { return static_cast<int>(slots_.size()); }
  int busy_cores() const { return busy_; }
  bool priority() const { return priority_; }
  const std::deque<Job>& queued() const { return queue_; }
  std::optional<Job> running(std::size_t core) const;
  std::optional<std::size_t> core_of(TaskId task) const;

  // Integral of busy cores over time, in core-milliseconds, up to now_ms.
  double busy_core_ms(double now_ms);

 private:
  struct Slot {
    Job job;
    double started_ms = 0.0;
    std::uint64_t token = 0;
    bool occupied = false;
  };

  void accrue(double now_ms);
  std::size_t non_hrt_head() const;

  std::vector<Slot> slots_;
  std::deque<Job> queue_;
  bool priority_ = false;
  int busy_ = 0;
  std::uint64_t next_token_ = 1;
  double busy_integral_ms_ = 0.0;
  double last_accrual_ms_ = 0.0;
};

}  // namespace pec
