#pragma once

// Shared internals for the response-time analyses. PIBS interference terms
// are rational; to keep the fixed-point loops exact without per-term gcd
// reduction, every utilization is rescaled to a common denominator L and the
// recurrences accumulate interference * L^2 in int128, rounding to whole
// ticks once per iteration.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "mcsio/fixed_point.hpp"
#include "mcsio/model.hpp"

namespace mcsio::detail {

inline constexpr Time kMaxPeriodTicks = 1'000'000'000;
inline constexpr Time kMaxUtilDen = 1'000'000'000;

struct AnalysisContext {
  const TaskSet* set;
  int128 den;   // common utilization denominator L
  int128 den2;  // L^2
  std::vector<std::array<int128, 2>> pibs_num;  // U(level) * L, [LO, HI]
  std::vector<std::vector<std::size_t>> hp, hpH, hpL, hip, hipH, hipL;
  std::vector<std::size_t> psH, psL;  // pibs indices by criticality
  std::vector<std::vector<std::size_t>> bound_or_all;  // pibs LO-mode candidates

  explicit AnalysisContext(const TaskSet& s);

  const SporadicServerSpec& server(std::size_t i) const { return set->servers[i]; }
  const PibsSpec& pib(std::size_t k) const { return set->pibs[k]; }
  Time period(std::size_t i) const { return set->servers[i].period; }
  Time cap(std::size_t i, CritLevel l) const { return set->servers[i].capacity(l); }

  int128 util_num(std::size_t k, CritLevel l) const {
    return pibs_num[k][static_cast<int>(l)];
  }

  // interference * L^2 of pibs k at criticality level l over a window of
  // length t, hosted by server q.
  int128 interference_l2(std::size_t k, int128 util_num, Time t,
                         std::size_t q) const {
    if (util_num == 0) return 0;
    Time tq = period(q);
    int128 releases = ceil_div(t, tq);
    return ((1 + releases) * den - util_num) * tq * util_num;
  }

  int128 max_interference_l2(std::size_t k, CritLevel level, Time t,
                             const std::vector<std::size_t>& hosts) const {
    int128 p = util_num(k, level);
    if (p == 0 || hosts.empty()) return 0;
    int128 best = 0;
    for (std::size_t q : hosts) {
      int128 v = interference_l2(k, p, t, q);
      if (v > best) best = v;
    }
    return best;
  }

  // Candidate servers a pibs may run on behalf of after the mode change.
  std::vector<std::size_t> star_candidates(std::size_t k, bool extended) const;
  // Candidates restricted to HI servers (HI steady state).
  std::vector<std::size_t> hi_candidates(std::size_t k, bool lo_survive) const;
};

// Equation evaluators for a single subject. All return nullopt when the
// recurrence crosses the subject's deadline. `with_pibs` drops the PIBS sums
// (server-only model).

std::optional<Time> task_lo_response(const AnalysisContext& ctx, std::size_t i,
                                     bool with_pibs);
std::optional<Time> task_hi_response(const AnalysisContext& ctx, std::size_t i,
                                     bool with_pibs);
std::optional<Time> task_lo_star(const AnalysisContext& ctx, std::size_t i,
                                 bool with_pibs);
std::optional<Time> task_mode_change(const AnalysisContext& ctx, std::size_t i,
                                     Time lo_star, bool with_pibs,
                                     bool extended);

std::optional<Time> pibs_lo_response(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s);
std::optional<Time> pibs_hi_response(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s);
std::optional<Time> pibs_lo_star(const AnalysisContext& ctx, std::size_t k,
                                 std::size_t s);
std::optional<Time> pibs_mode_change(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s, Time lo_star,
                                     bool extended);

}  // namespace mcsio::detail
