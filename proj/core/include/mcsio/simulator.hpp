#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcsio/model.hpp"
#include "mcsio/replenishment.hpp"

namespace mcsio {

enum class EventKind {
  RELEASE,
  DISPATCH,
  PREEMPT,
  BLOCK,
  DEPLETE,
  REPLENISH_POST,
  REPLENISH_MERGE,
  IO_INIT,
  IRQ_TOP,
  BH_START,
  BH_END,
  MODE_CHANGE,
  JOB_END,
  DEADLINE_MISS,
};

std::string to_string(EventKind kind);

struct TraceEvent {
  Time time = 0;
  EventKind kind = EventKind::RELEASE;
  std::string subject;
  std::string detail;

  bool operator==(const TraceEvent&) const = default;
};

struct SimTrace {
  std::vector<TraceEvent> events;
  bool mode_changed = false;
  Time mode_change_time = -1;
  // Budget snapshots taken right after the mode-change adjustments: per
  // server the outstanding replenishment total, per pibs the refill time.
  std::map<std::string, Time> post_change_outstanding;
  std::map<std::string, Time> post_change_pibs_replenish;

  std::size_t count(EventKind kind) const;
  std::size_t count(EventKind kind, const std::string& subject) const;
};

// Synthetic interrupt source: K bottom halves, the first arriving F after the
// I/O is initiated, the rest spaced I apart. Each bottom half costs B(mode at
// arrival) ticks on the handling server or PIBS.
struct InterruptStreamSpec {
  std::string handler;    // pibs id, or a server id dedicated to bottom halves
  int count = 0;          // K
  Time bh_lo = 0;         // B(LO)
  Time bh_hi = 0;         // B(HI)
  Time first_delay = 0;   // F
  Time inter_arrival = 0; // I, must exceed the bottom-half cost
};

// Repeating job of one server: released every period, `busy` ticks of work
// (busy_hi after the mode change, when given). An attached stream models the
// read issued at job completion; when blocking, the next job waits for all
// its bottom halves.
struct JobSpec {
  std::string server;
  Time busy = 0;
  std::optional<Time> busy_hi;
  std::optional<InterruptStreamSpec> io;
  bool io_blocking = true;
};

// Free-standing I/O initiation, not tied to any job.
struct TimedStream {
  InterruptStreamSpec stream;
  std::string requester;  // server whose period/priority the handler inherits
  Time at = 0;
};

struct SimConfig {
  Time horizon = 0;  // exclusive: events strictly before it are recorded
  std::size_t list_length = 8;
  MergePolicy merge_policy = MergePolicy::MERGE_NEXT;
  std::optional<Time> force_mode_change_at;
  Time dispatch_overhead = 0;  // budget+time ticks charged per DISPATCH
};

struct Workload {
  std::vector<JobSpec> jobs;
  std::vector<TimedStream> streams;
  SimConfig config;
};

// Deterministic fixed-priority preemptive execution of the task set under
// the workload. Identical inputs produce bit-identical traces.
SimTrace simulate(const TaskSet& set, const Workload& workload);

// The two built-in replay scenarios (ss-only and ss+pibs bottom-half
// handling of a blocked read). Returns the task set and workload so callers
// can inspect or re-run them.
struct ReplayScenario {
  TaskSet set;
  Workload workload;
};
ReplayScenario replay_scenario(const std::string& name);

}  // namespace mcsio
