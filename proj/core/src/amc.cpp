#include "mcsio/amc.hpp"

#include <algorithm>
#include <stdexcept>

#include "mcsio/rta.hpp"
#include "analysis.hpp"

namespace mcsio {

namespace {

using detail::AnalysisContext;

void require_server_only(const TaskSet& set, const char* what) {
  if (!set.pibs.empty())
    throw std::invalid_argument(std::string(what) + " runs on server-only sets");
}

bool within(const std::optional<Time>& r, Time deadline) {
  return r.has_value() && *r <= deadline;
}

// True when the pibs keeps running after the mode change and therefore needs
// a mode-change response-time check of its own.
bool pibs_runs_in_hi(const PibsSpec& p) {
  return p.criticality == CritLevel::HI ||
         (p.util_hi.has_value() && Util(0) < *p.util_hi);
}

bool server_runs_in_hi(const SporadicServerSpec& s, bool lo_survive) {
  if (s.criticality == CritLevel::HI) return true;
  return lo_survive && s.capacity_hi.value_or(0) > 0;
}

}  // namespace

Rat crit_interference(Time t, Time host_period, const PibsSpec& pibs,
                      CritLevel level) {
  return pibs_interference(t, host_period, pibs.util(level));
}

AmcVerdict amc_steady_lo(const TaskSet& set) {
  require_server_only(set, "amc_steady_lo");
  AnalysisContext ctx(set);
  AmcVerdict v;
  v.test_name = "amc-steady-lo";
  v.schedulable = true;
  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    auto r = detail::task_lo_response(ctx, i, false);
    v.tasks[set.servers[i].id].r_lo = r;
    if (!r) v.schedulable = false;
  }
  return v;
}

AmcVerdict amc_steady_hi(const TaskSet& set) {
  require_server_only(set, "amc_steady_hi");
  AnalysisContext ctx(set);
  AmcVerdict v;
  v.test_name = "amc-steady-hi";
  v.schedulable = true;
  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    if (set.servers[i].criticality != CritLevel::HI) continue;
    auto r = detail::task_hi_response(ctx, i, false);
    v.tasks[set.servers[i].id].r_hi = r;
    if (!r) v.schedulable = false;
  }
  return v;
}

AmcVerdict amc_rtb(const TaskSet& set, const AmcOptions& opts) {
  require_server_only(set, "amc_rtb");
  if (opts.model != AnalysisModel::SS_ONLY)
    throw std::invalid_argument("amc_rtb expects the SS_ONLY model");
  AnalysisContext ctx(set);
  AmcVerdict v;
  v.test_name = opts.lo_tasks_survive ? "amc-rtb-ext" : "amc-rtb";
  v.schedulable = true;
  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    const auto& srv = set.servers[i];
    auto& times = v.tasks[srv.id];
    times.r_lo = detail::task_lo_response(ctx, i, false);
    if (!within(times.r_lo, srv.deadline)) v.schedulable = false;
    times.r_lo_star = detail::task_lo_star(ctx, i, false);
    const bool subject = srv.criticality == CritLevel::HI ||
                         (opts.lo_tasks_survive && server_runs_in_hi(srv, true));
    if (!subject) continue;
    // Classic AMC bounds LO interference by the plain LO response time;
    // the extension swaps in the tighter starred value.
    std::optional<Time> lo_ref = opts.lo_tasks_survive ? times.r_lo_star : times.r_lo;
    if (!lo_ref) {
      v.schedulable = false;
      continue;
    }
    times.r_star =
        detail::task_mode_change(ctx, i, *lo_ref, false, opts.lo_tasks_survive);
    if (!within(times.r_star, srv.deadline)) v.schedulable = false;
  }
  return v;
}

AmcVerdict io_amc_steady(const TaskSet& set, CritLevel mode,
                         const AmcOptions& opts) {
  AnalysisContext ctx(set);
  AmcVerdict v;
  v.test_name = mode == CritLevel::LO ? "io-amc-steady-lo" : "io-amc-steady-hi";
  v.schedulable = true;
  if (mode == CritLevel::LO) {
    for (std::size_t i = 0; i < set.servers.size(); ++i) {
      auto r = detail::task_lo_response(ctx, i, true);
      v.tasks[set.servers[i].id].r_lo = r;
      if (!r) v.schedulable = false;
    }
    for (std::size_t k = 0; k < set.pibs.size(); ++k) {
      auto& per_server = v.pibs[set.pibs[k].id];
      for (std::size_t s : ctx.bound_or_all[k]) {
        auto r = detail::pibs_lo_response(ctx, k, s);
        per_server[set.servers[s].id].r_lo = r;
        if (!r) v.schedulable = false;
      }
    }
    return v;
  }
  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    if (set.servers[i].criticality != CritLevel::HI) continue;
    auto r = detail::task_hi_response(ctx, i, true);
    v.tasks[set.servers[i].id].r_hi = r;
    if (!r) v.schedulable = false;
  }
  for (std::size_t k = 0; k < set.pibs.size(); ++k) {
    const auto& p = set.pibs[k];
    const bool checked = p.criticality == CritLevel::HI ||
                         (opts.lo_tasks_survive && pibs_runs_in_hi(p));
    if (!checked) continue;
    auto& per_server = v.pibs[p.id];
    for (std::size_t s : ctx.hi_candidates(k, opts.lo_tasks_survive)) {
      auto r = detail::pibs_hi_response(ctx, k, s);
      per_server[set.servers[s].id].r_hi = r;
      if (!r) v.schedulable = false;
    }
  }
  return v;
}

AmcVerdict io_amc_rtb(const TaskSet& set, const AmcOptions& opts) {
  if (opts.model != AnalysisModel::SS_PIBS)
    throw std::invalid_argument("io_amc_rtb expects the SS_PIBS model");
  AnalysisContext ctx(set);
  const bool ext = opts.lo_tasks_survive;
  AmcVerdict v;
  v.test_name = ext ? "io-amc-rtb-ext" : "io-amc-rtb";
  v.schedulable = true;

  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    const auto& srv = set.servers[i];
    auto& times = v.tasks[srv.id];
    times.r_lo = detail::task_lo_response(ctx, i, true);
    if (!within(times.r_lo, srv.deadline)) v.schedulable = false;
    times.r_lo_star = detail::task_lo_star(ctx, i, true);
    const bool subject = srv.criticality == CritLevel::HI ||
                         (ext && server_runs_in_hi(srv, true));
    if (!subject) continue;
    if (!times.r_lo_star) {
      v.schedulable = false;
      continue;
    }
    times.r_star =
        detail::task_mode_change(ctx, i, *times.r_lo_star, true, ext);
    if (!within(times.r_star, srv.deadline)) v.schedulable = false;
  }

  for (std::size_t k = 0; k < set.pibs.size(); ++k) {
    const auto& p = set.pibs[k];
    auto& per_server = v.pibs[p.id];
    for (std::size_t s : ctx.bound_or_all[k]) {
      auto r = detail::pibs_lo_response(ctx, k, s);
      per_server[set.servers[s].id].r_lo = r;
      if (!r) v.schedulable = false;
    }
    if (!pibs_runs_in_hi(p)) continue;
    for (std::size_t s : ctx.star_candidates(k, ext)) {
      auto& times = per_server[set.servers[s].id];
      times.r_lo_star = detail::pibs_lo_star(ctx, k, s);
      if (!times.r_lo_star) {
        v.schedulable = false;
        continue;
      }
      times.r_star = detail::pibs_mode_change(ctx, k, s, *times.r_lo_star, ext);
      if (!times.r_star) v.schedulable = false;
    }
  }
  return v;
}

std::string to_string(SchedTest test) {
  switch (test) {
    case SchedTest::SS_RTA: return "SS-rta";
    case SchedTest::SS_PIBS_RTA: return "SS+PIBS-rta";
    case SchedTest::AMC_RTB: return "AMC-rtb";
    case SchedTest::AMC_RTB_EXT: return "AMC-rtb-ext";
    case SchedTest::IO_AMC_RTB: return "IO-AMC-rtb";
    case SchedTest::IO_AMC_RTB_EXT: return "IO-AMC-rtb-ext";
    case SchedTest::AMC_UB: return "AMC UB";
    case SchedTest::IO_AMC_UB: return "IO-AMC UB";
  }
  throw std::logic_error("bad test");
}

SchedTest sched_test_from_string(const std::string& name) {
  for (auto t : {SchedTest::SS_RTA, SchedTest::SS_PIBS_RTA, SchedTest::AMC_RTB,
                 SchedTest::AMC_RTB_EXT, SchedTest::IO_AMC_RTB,
                 SchedTest::IO_AMC_RTB_EXT, SchedTest::AMC_UB,
                 SchedTest::IO_AMC_UB})
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown schedulability test: " + name);
}

bool run_sched_test(const TaskSet& set, SchedTest test) {
  switch (test) {
    case SchedTest::SS_RTA:
      return ss_rta(set).schedulable;
    case SchedTest::SS_PIBS_RTA:
      return ss_pibs_rta(set).schedulable;
    case SchedTest::AMC_RTB:
      return amc_rtb(set, {false, AnalysisModel::SS_ONLY}).schedulable;
    case SchedTest::AMC_RTB_EXT:
      return amc_rtb(set, {true, AnalysisModel::SS_ONLY}).schedulable;
    case SchedTest::IO_AMC_RTB:
      return io_amc_rtb(set, {false, AnalysisModel::SS_PIBS}).schedulable;
    case SchedTest::IO_AMC_RTB_EXT:
      return io_amc_rtb(set, {true, AnalysisModel::SS_PIBS}).schedulable;
    case SchedTest::AMC_UB:
      return amc_steady_lo(set).schedulable && amc_steady_hi(set).schedulable;
    case SchedTest::IO_AMC_UB:
      return io_amc_steady(set, CritLevel::LO).schedulable &&
             io_amc_steady(set, CritLevel::HI).schedulable;
  }
  throw std::logic_error("bad test");
}

namespace {

// Audsley candidate check: all conditions attached to server `i` at its
// trial level — the server's own response-time checks plus, for the
// combined-model tests, the checks of every pibs that may be served by it.
// Every equation involved depends only on the unordered set of tasks above
// the candidate, which is what makes lowest-priority-first search sound.
bool level_ok(const TaskSet& set, std::size_t i, SchedTest test) {
  AnalysisContext ctx(set);
  const auto& srv = set.servers[i];
  const Time d = srv.deadline;

  auto pibs_lo_ok = [&]() {
    for (std::size_t k = 0; k < set.pibs.size(); ++k) {
      const auto& cands = ctx.bound_or_all[k];
      if (std::find(cands.begin(), cands.end(), i) == cands.end()) continue;
      if (!detail::pibs_lo_response(ctx, k, i)) return false;
    }
    return true;
  };

  switch (test) {
    case SchedTest::SS_RTA:
      return detail::task_lo_response(ctx, i, false).has_value();
    case SchedTest::SS_PIBS_RTA:
      return detail::task_lo_response(ctx, i, true).has_value() && pibs_lo_ok();
    case SchedTest::AMC_RTB:
    case SchedTest::AMC_RTB_EXT: {
      const bool ext = test == SchedTest::AMC_RTB_EXT;
      auto r_lo = detail::task_lo_response(ctx, i, false);
      if (!within(r_lo, d)) return false;
      const bool subject = srv.criticality == CritLevel::HI ||
                           (ext && server_runs_in_hi(srv, true));
      if (!subject) return true;
      auto lo_ref = ext ? detail::task_lo_star(ctx, i, false) : r_lo;
      if (!lo_ref) return false;
      return within(detail::task_mode_change(ctx, i, *lo_ref, false, ext), d);
    }
    case SchedTest::IO_AMC_RTB:
    case SchedTest::IO_AMC_RTB_EXT: {
      const bool ext = test == SchedTest::IO_AMC_RTB_EXT;
      if (!within(detail::task_lo_response(ctx, i, true), d)) return false;
      if (!pibs_lo_ok()) return false;
      const bool subject = srv.criticality == CritLevel::HI ||
                           (ext && server_runs_in_hi(srv, true));
      if (subject) {
        auto lo_star = detail::task_lo_star(ctx, i, true);
        if (!lo_star) return false;
        if (!within(detail::task_mode_change(ctx, i, *lo_star, true, ext), d))
          return false;
      }
      for (std::size_t k = 0; k < set.pibs.size(); ++k) {
        if (!pibs_runs_in_hi(set.pibs[k])) continue;
        const auto cands = ctx.star_candidates(k, ext);
        if (std::find(cands.begin(), cands.end(), i) == cands.end()) continue;
        auto lo_star = detail::pibs_lo_star(ctx, k, i);
        if (!lo_star) return false;
        if (!detail::pibs_mode_change(ctx, k, i, *lo_star, ext)) return false;
      }
      return true;
    }
    case SchedTest::AMC_UB: {
      if (!within(detail::task_lo_response(ctx, i, false), d)) return false;
      if (srv.criticality == CritLevel::HI &&
          !within(detail::task_hi_response(ctx, i, false), d))
        return false;
      return true;
    }
    case SchedTest::IO_AMC_UB: {
      if (!within(detail::task_lo_response(ctx, i, true), d)) return false;
      if (!pibs_lo_ok()) return false;
      if (srv.criticality == CritLevel::HI &&
          !within(detail::task_hi_response(ctx, i, true), d))
        return false;
      for (std::size_t k = 0; k < set.pibs.size(); ++k) {
        if (set.pibs[k].criticality != CritLevel::HI) continue;
        const auto cands = ctx.hi_candidates(k, false);
        if (std::find(cands.begin(), cands.end(), i) == cands.end()) continue;
        if (!detail::pibs_hi_response(ctx, k, i)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<TaskSet> audsley_assign(const TaskSet& in, SchedTest test) {
  TaskSet set = in;
  const std::size_t n = set.servers.size();
  std::vector<std::size_t> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
  std::sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
    return set.servers[a].id < set.servers[b].id;
  });

  std::vector<int> fixed(n, -1);
  for (int level = static_cast<int>(n) - 1; level >= 0; --level) {
    bool placed = false;
    for (std::size_t c = 0; c < remaining.size(); ++c) {
      std::size_t cand = remaining[c];
      TaskSet trial = set;
      trial.servers[cand].priority = level;
      int fill = 0;
      for (std::size_t other : remaining) {
        if (other == cand) continue;
        trial.servers[other].priority = fill++;
      }
      for (std::size_t i = 0; i < n; ++i)
        if (fixed[i] >= 0) trial.servers[i].priority = fixed[i];
      if (level_ok(trial, cand, test)) {
        fixed[cand] = level;
        remaining.erase(remaining.begin() + static_cast<long>(c));
        placed = true;
        break;
      }
    }
    if (!placed) return std::nullopt;
  }
  for (std::size_t i = 0; i < n; ++i) set.servers[i].priority = fixed[i];
  return set;
}

}  // namespace mcsio
