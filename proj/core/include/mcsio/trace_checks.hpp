#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mcsio/simulator.hpp"

namespace mcsio {

// Execution intervals of one subject recovered from its DISPATCH /
// PREEMPT / BLOCK / DEPLETE / JOB_END events. A dispatch still open at the
// horizon is closed there.
std::vector<std::pair<Time, Time>> execution_intervals(const SimTrace& trace,
                                                       const std::string& subject,
                                                       Time horizon);

// Largest number of executed ticks inside any window of the given length.
Time max_window_execution(const std::vector<std::pair<Time, Time>>& intervals,
                          Time window);

// Structural trace invariants: non-decreasing times, paired dispatches, at
// most one mode change. Returns human-readable violations (empty = clean).
std::vector<std::string> check_trace_structure(const SimTrace& trace);

struct ObservedBehaviour {
  std::map<std::string, Time> worst_response;  // completion - release, per server
  std::set<std::string> missed;                // servers that missed a deadline up to judge_until
};

// Job response times observed in a trace. Only deadline misses at or before
// judge_until count; run the simulation at least one tick past it so
// completions exactly at a deadline are recorded.
ObservedBehaviour observe_jobs(const SimTrace& trace, Time judge_until);

}  // namespace mcsio
