#include "mcsio/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mcsio {

std::string to_string(CritLevel level) {
  return level == CritLevel::LO ? "LO" : "HI";
}

CritLevel crit_from_string(const std::string& text) {
  if (text == "LO") return CritLevel::LO;
  if (text == "HI") return CritLevel::HI;
  throw std::invalid_argument("bad criticality level: " + text);
}

std::size_t TaskSet::server_index(const std::string& id) const {
  for (std::size_t i = 0; i < servers.size(); ++i)
    if (servers[i].id == id) return i;
  throw std::invalid_argument("unknown server id: " + id);
}

std::size_t TaskSet::pibs_index(const std::string& id) const {
  for (std::size_t i = 0; i < pibs.size(); ++i)
    if (pibs[i].id == id) return i;
  throw std::invalid_argument("unknown pibs id: " + id);
}

bool TaskSet::priorities_assigned() const {
  for (const auto& s : servers)
    if (s.priority < 0) return false;
  return true;
}

void TaskSet::validate() const {
  std::set<std::string> ids;
  for (const auto& s : servers) {
    if (!ids.insert(s.id).second)
      throw std::invalid_argument("duplicate id: " + s.id);
    if (s.period <= 0)
      throw std::invalid_argument(s.id + ": period must be positive");
    if (s.deadline != s.period)
      throw std::invalid_argument(s.id + ": deadline must equal period");
    if (s.capacity_lo <= 0)
      throw std::invalid_argument(s.id + ": LO capacity must be positive");
    if (s.criticality == CritLevel::HI) {
      if (!s.capacity_hi.has_value())
        throw std::invalid_argument(s.id + ": HI server needs a HI capacity");
      if (*s.capacity_hi < s.capacity_lo)
        throw std::invalid_argument(s.id + ": HI capacity below LO capacity");
    } else if (s.capacity_hi.has_value() && *s.capacity_hi > s.capacity_lo) {
      throw std::invalid_argument(s.id + ": LO server HI capacity above LO capacity");
    }
  }
  for (const auto& p : pibs) {
    if (!ids.insert(p.id).second)
      throw std::invalid_argument("duplicate id: " + p.id);
    if (!(Util(0) < p.util_lo) || !(p.util_lo <= Util(1)))
      throw std::invalid_argument(p.id + ": LO utilization must be in (0,1]");
    if (p.util_hi.has_value()) {
      if (*p.util_hi < Util(0) || Util(1) < *p.util_hi)
        throw std::invalid_argument(p.id + ": HI utilization must be in [0,1]");
      if (p.criticality == CritLevel::HI && *p.util_hi < p.util_lo)
        throw std::invalid_argument(p.id + ": HI pibs utilization must not shrink");
      if (p.criticality == CritLevel::LO && !(*p.util_hi < p.util_lo))
        throw std::invalid_argument(p.id + ": LO pibs HI utilization must shrink");
    }
  }
  for (const auto& [pid, sid] : bindings) {
    pibs_index(pid);
    server_index(sid);
  }
  if (priorities_assigned()) {
    std::set<int> prios;
    for (const auto& s : servers)
      if (!prios.insert(s.priority).second)
        throw std::invalid_argument("duplicate priority " + std::to_string(s.priority));
  }
}

namespace {

std::vector<std::size_t> sorted_by_priority(const TaskSet& set,
                                            const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> out = idx;
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = set.servers[a];
    const auto& sb = set.servers[b];
    if (sa.priority != sb.priority) return sa.priority < sb.priority;
    return sa.id < sb.id;
  });
  return out;
}

std::vector<std::string> to_ids(const TaskSet& set, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(set.servers[i].id);
  return out;
}

}  // namespace

std::vector<std::size_t> hp_indices(const TaskSet& set, std::size_t i) {
  if (!set.priorities_assigned())
    throw std::logic_error("priorities not assigned");
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < set.servers.size(); ++j) {
    if (j == i) continue;
    if (set.servers[j].priority <= set.servers[i].priority) out.push_back(j);
  }
  return sorted_by_priority(set, out);
}

std::vector<std::string> hp(const TaskSet& set, const std::string& id) {
  return to_ids(set, hp_indices(set, set.server_index(id)));
}

std::vector<std::string> hip(const TaskSet& set, const std::string& id) {
  std::size_t i = set.server_index(id);
  auto idx = hp_indices(set, i);
  idx.push_back(i);
  return to_ids(set, sorted_by_priority(set, idx));
}

namespace {

std::vector<std::string> hp_filtered(const TaskSet& set, const std::string& id,
                                     CritLevel level, bool include_self,
                                     bool self_needs_level) {
  std::size_t i = set.server_index(id);
  std::vector<std::size_t> out;
  for (auto j : hp_indices(set, i))
    if (set.servers[j].criticality == level) out.push_back(j);
  if (include_self &&
      (!self_needs_level || set.servers[i].criticality == level))
    out.push_back(i);
  return to_ids(set, sorted_by_priority(set, out));
}

}  // namespace

std::vector<std::string> hpH(const TaskSet& set, const std::string& id) {
  return hp_filtered(set, id, CritLevel::HI, false, false);
}

std::vector<std::string> hpL(const TaskSet& set, const std::string& id) {
  return hp_filtered(set, id, CritLevel::LO, false, false);
}

std::vector<std::string> hipH(const TaskSet& set, const std::string& id) {
  return hp_filtered(set, id, CritLevel::HI, true, false);
}

std::vector<std::string> hipL(const TaskSet& set, const std::string& id) {
  return hp_filtered(set, id, CritLevel::LO, true, true);
}

TaskSet assign_rate_monotonic(TaskSet set) {
  std::vector<std::size_t> order(set.servers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = set.servers[a];
    const auto& sb = set.servers[b];
    if (sa.period != sb.period) return sa.period < sb.period;
    return sa.id < sb.id;
  });
  for (std::size_t rank = 0; rank < order.size(); ++rank)
    set.servers[order[rank]].priority = static_cast<int>(rank);
  return set;
}

}  // namespace mcsio
