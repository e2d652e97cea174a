#pragma once

#include <map>
#include <optional>
#include <string>

#include "mcsio/model.hpp"

namespace mcsio {

enum class AnalysisModel { SS_ONLY, SS_PIBS };

struct AmcOptions {
  // false: LO-criticality servers are dropped at the mode change (their HI
  // budget is treated as zero). true: they continue with their reduced HI
  // budget and must still meet deadlines.
  bool lo_tasks_survive = false;
  AnalysisModel model = AnalysisModel::SS_ONLY;
};

struct AmcTimes {
  std::optional<Time> r_lo;
  std::optional<Time> r_hi;
  std::optional<Time> r_star;
  std::optional<Time> r_lo_star;
};

struct AmcVerdict {
  std::string test_name;
  std::map<std::string, AmcTimes> tasks;
  // pibs id -> candidate server id -> times
  std::map<std::string, std::map<std::string, AmcTimes>> pibs;
  bool schedulable = false;
};

// pibs_interference with the utilization picked by criticality mode.
Rat crit_interference(Time t, Time host_period, const PibsSpec& pibs,
                      CritLevel level);

// Steady states for server-only systems (PIBS must be absent).
AmcVerdict amc_steady_lo(const TaskSet& set);
AmcVerdict amc_steady_hi(const TaskSet& set);

// Mode-change bound for server-only systems. Classic variant checks HI
// servers; the extension also carries surviving LO servers at their HI
// budget. The verdict folds in the LO steady state.
AmcVerdict amc_rtb(const TaskSet& set, const AmcOptions& opts = {});

// Steady states with PIBS interference. In HI mode only HI subjects are
// checked; LO PIBS with a nonzero HI utilization join the checked set when
// lo_tasks_survive is on (they always contribute interference).
AmcVerdict io_amc_steady(const TaskSet& set, CritLevel mode,
                         const AmcOptions& opts = {});

// Mode-change bound for combined server + PIBS systems.
AmcVerdict io_amc_rtb(const TaskSet& set, const AmcOptions& opts);

// Schedulability tests audsley_assign can target.
enum class SchedTest {
  SS_RTA,
  SS_PIBS_RTA,
  AMC_RTB,
  AMC_RTB_EXT,
  IO_AMC_RTB,
  IO_AMC_RTB_EXT,
  AMC_UB,
  IO_AMC_UB,
};

std::string to_string(SchedTest test);
SchedTest sched_test_from_string(const std::string& name);

// Runs the named test under the set's current priority assignment.
bool run_sched_test(const TaskSet& set, SchedTest test);

// Lowest-priority-first optimal priority assignment. Returns a copy of the
// set with priorities under which `test` accepts, or nullopt when no level
// admits any remaining server. Candidates are tried in id order.
std::optional<TaskSet> audsley_assign(const TaskSet& set, SchedTest test);

}  // namespace mcsio
