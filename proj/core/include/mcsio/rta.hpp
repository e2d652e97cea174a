#pragma once

#include <map>
#include <optional>
#include <string>

#include "mcsio/model.hpp"

namespace mcsio {

// Response times from the single-criticality analyses. A missing value means
// the recurrence crossed the deadline before converging.
struct RtaResult {
  std::map<std::string, std::optional<Time>> server_response;
  // pibs id -> (candidate server id -> response time). Bound PIBS are checked
  // against their bound server only; unbound PIBS against every server.
  std::map<std::string, std::map<std::string, std::optional<Time>>> pibs_response;
  bool schedulable = false;
};

// Upper bound on the CPU time a bandwidth-preserving server with utilization
// util can steal over a window of length t when hosted by a server of period
// host_period: (1 + ceil(t/T) - U) * T * U. Exact; callers round only when
// folding into a response time.
Rat pibs_interference(Time t, Time host_period, const Util& util);

// Response times for a sporadic-server-only system (equivalent periodic
// tasks). Any PIBS in the set are ignored.
RtaResult ss_rta(const TaskSet& set);

// Combined analysis: servers take PIBS interference on top of preemption;
// each PIBS is analyzed against every server it may run on behalf of.
RtaResult ss_pibs_rta(const TaskSet& set);

}  // namespace mcsio
