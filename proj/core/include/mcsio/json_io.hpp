#pragma once

#include <string>

#include "mcsio/amc.hpp"
#include "mcsio/model.hpp"
#include "mcsio/rta.hpp"
#include "mcsio/simulator.hpp"

namespace mcsio {

// Task-set interchange document:
//   {"servers":[{"id","T","C_lo","C_hi"?,"crit","priority"?}],
//    "pibs":[{"id","U_lo","U_hi"?,"crit"}],
//    "bindings":{"<pibs-id>":"<server-id>"}?}
// Times are integer ticks, utilizations "p/q" strings. "priority" is an
// optional extension; the canonical writer emits it only when assigned.
TaskSet task_set_from_json(const std::string& text);
std::string task_set_to_json(const TaskSet& set);

// Workload document:
//   {"jobs":[{"ss","busy","busy_hi"?,"io":{"K","B_lo","B_hi","F","I","pibs",
//             "blocking"?}?}],
//    "streams":[{"pibs","ss","K","B_lo","B_hi","F","I","at"}]?,
//    "horizon","list_len"?,"merge_policy"?,"force_mode_change_at"?,
//    "dispatch_overhead"?}
// "pibs" names the bottom-half handler and may also be a server id.
Workload workload_from_json(const std::string& text);
std::string workload_to_json(const Workload& wl);

std::string trace_to_ndjson(const SimTrace& trace);
std::string trace_to_csv(const SimTrace& trace);

std::string rta_result_to_json(const RtaResult& result);
std::string amc_verdict_to_json(const AmcVerdict& verdict);

TaskSet load_task_set(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace mcsio
