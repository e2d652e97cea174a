#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcsio/rational.hpp"

namespace mcsio {

enum class CritLevel { LO = 0, HI = 1 };

inline CritLevel min_level(CritLevel a, CritLevel b) {
  return (a == CritLevel::LO || b == CritLevel::LO) ? CritLevel::LO : CritLevel::HI;
}

std::string to_string(CritLevel level);
CritLevel crit_from_string(const std::string& text);

// Sporadic server: budget C per period T, deadline equal to the period.
// Lower priority number = higher priority.
struct SporadicServerSpec {
  std::string id;
  Time period = 0;
  Time deadline = 0;  // kept separate from period to make the D = T assumption auditable
  Time capacity_lo = 0;
  std::optional<Time> capacity_hi;
  CritLevel criticality = CritLevel::LO;
  int priority = -1;

  Time capacity(CritLevel level) const {
    if (level == CritLevel::LO) return capacity_lo;
    return capacity_hi.value_or(0);
  }
};

// Bandwidth-preserving server for interrupt bottom halves. Defined by
// utilization only; period and priority are inherited from the sporadic
// server it is currently running on behalf of.
struct PibsSpec {
  std::string id;
  Util util_lo;
  std::optional<Util> util_hi;
  CritLevel criticality = CritLevel::LO;

  Util util(CritLevel level) const {
    if (level == CritLevel::LO) return util_lo;
    return util_hi.value_or(Util(0));
  }
};

struct TaskSet {
  std::vector<SporadicServerSpec> servers;
  std::vector<PibsSpec> pibs;
  // pibs id -> server id; a-priori knowledge of which server a PIBS serves.
  std::map<std::string, std::string> bindings;

  std::size_t server_index(const std::string& id) const;
  std::size_t pibs_index(const std::string& id) const;
  bool priorities_assigned() const;

  // Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

// Servers of equal or higher priority than i, excluding i itself.
// Deterministic order: by priority, ties by id.
std::vector<std::string> hp(const TaskSet& set, const std::string& id);
std::vector<std::string> hip(const TaskSet& set, const std::string& id);
std::vector<std::string> hpH(const TaskSet& set, const std::string& id);
std::vector<std::string> hpL(const TaskSet& set, const std::string& id);
// hipH always contains the queried server itself; hipL contains it only if
// it is LO-criticality.
std::vector<std::string> hipH(const TaskSet& set, const std::string& id);
std::vector<std::string> hipL(const TaskSet& set, const std::string& id);

// Index-based variants used by the analyses.
std::vector<std::size_t> hp_indices(const TaskSet& set, std::size_t i);

// Priorities ordered by ascending period, ties by ascending id. Overwrites
// any existing assignment.
TaskSet assign_rate_monotonic(TaskSet set);

}  // namespace mcsio
