#include "mcsio/trace_checks.hpp"

#include <algorithm>

namespace mcsio {

std::vector<std::pair<Time, Time>> execution_intervals(const SimTrace& trace,
                                                       const std::string& subject,
                                                       Time horizon) {
  std::vector<std::pair<Time, Time>> out;
  std::optional<Time> open;
  for (const auto& e : trace.events) {
    if (e.subject != subject) continue;
    switch (e.kind) {
      case EventKind::DISPATCH:
        if (!open) open = e.time;
        break;
      case EventKind::PREEMPT:
      case EventKind::BLOCK:
      case EventKind::DEPLETE:
      case EventKind::JOB_END:
        if (open) {
          if (e.time > *open) out.emplace_back(*open, e.time);
          open.reset();
        }
        break;
      default:
        break;
    }
  }
  if (open && horizon > *open) out.emplace_back(*open, horizon);
  // merge back-to-back intervals (job handover at the same tick)
  std::vector<std::pair<Time, Time>> merged;
  for (auto& iv : out) {
    if (!merged.empty() && merged.back().second == iv.first)
      merged.back().second = iv.second;
    else
      merged.push_back(iv);
  }
  return merged;
}

Time max_window_execution(const std::vector<std::pair<Time, Time>>& intervals,
                          Time window) {
  Time best = 0;
  // The maximum is attained by a window starting at an interval start.
  for (const auto& iv : intervals) {
    Time lo = iv.first;
    Time hi = lo + window;
    Time sum = 0;
    for (const auto& [a, b] : intervals) {
      Time from = std::max(a, lo);
      Time to = std::min(b, hi);
      if (to > from) sum += to - from;
    }
    best = std::max(best, sum);
  }
  return best;
}

std::vector<std::string> check_trace_structure(const SimTrace& trace) {
  std::vector<std::string> issues;
  Time last = 0;
  std::map<std::string, bool> open;
  int mode_changes = 0;
  for (const auto& e : trace.events) {
    if (e.time < last)
      issues.push_back("time went backwards at " + std::to_string(e.time));
    last = e.time;
    switch (e.kind) {
      case EventKind::DISPATCH:
        if (open[e.subject])
          issues.push_back(e.subject + ": dispatch while already dispatched at t=" +
                           std::to_string(e.time));
        open[e.subject] = true;
        break;
      case EventKind::PREEMPT:
      case EventKind::BLOCK:
      case EventKind::DEPLETE:
        if (!open[e.subject])
          issues.push_back(e.subject + ": " + to_string(e.kind) +
                           " without open dispatch at t=" + std::to_string(e.time));
        open[e.subject] = false;
        break;
      case EventKind::JOB_END:
        open[e.subject] = false;
        break;
      case EventKind::MODE_CHANGE:
        ++mode_changes;
        break;
      default:
        break;
    }
  }
  if (mode_changes > 1) issues.push_back("more than one mode change");
  return issues;
}

namespace {

// pulls the value of "key=<number>" out of an event detail string
std::optional<Time> detail_number(const std::string& detail, const std::string& key) {
  auto pos = detail.find(key + "=");
  if (pos == std::string::npos) return std::nullopt;
  pos += key.size() + 1;
  auto end = detail.find(' ', pos);
  try {
    return std::stoll(detail.substr(pos, end - pos));
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
}

}  // namespace

ObservedBehaviour observe_jobs(const SimTrace& trace, Time judge_until) {
  ObservedBehaviour out;
  std::map<std::pair<std::string, Time>, Time> release;  // (subject, job#) -> time
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::RELEASE) {
      auto job = detail_number(e.detail, "job");
      if (job) release[{e.subject, *job}] = e.time;
    } else if (e.kind == EventKind::JOB_END) {
      auto job = detail_number(e.detail, "job");
      if (!job) continue;
      auto it = release.find({e.subject, *job});
      if (it == release.end()) continue;
      Time r = e.time - it->second;
      auto& w = out.worst_response[e.subject];
      w = std::max(w, r);
    } else if (e.kind == EventKind::DEADLINE_MISS) {
      auto deadline = detail_number(e.detail, "deadline");
      if (deadline && *deadline <= judge_until) out.missed.insert(e.subject);
    }
  }
  return out;
}

}  // namespace mcsio
