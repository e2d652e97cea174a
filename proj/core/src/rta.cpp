#include "mcsio/rta.hpp"

#include <stdexcept>

#include "analysis.hpp"

namespace mcsio {

namespace detail {

AnalysisContext::AnalysisContext(const TaskSet& s) : set(&s) {
  if (!s.priorities_assigned())
    throw std::logic_error("analysis requires assigned priorities");
  const std::size_t n = s.servers.size();

  Time l = 1;
  for (const auto& p : s.pibs) {
    l = lcm_clamped(l, static_cast<Time>(p.util_lo.den()), kMaxUtilDen);
    if (p.util_hi)
      l = lcm_clamped(l, static_cast<Time>(p.util_hi->den()), kMaxUtilDen);
  }
  den = l;
  den2 = den * den;

  for (const auto& srv : s.servers)
    if (srv.period > kMaxPeriodTicks)
      throw std::invalid_argument(srv.id + ": period too large for exact analysis");

  pibs_num.resize(s.pibs.size());
  for (std::size_t k = 0; k < s.pibs.size(); ++k) {
    const auto& p = s.pibs[k];
    pibs_num[k][0] = p.util_lo.num() * (den / p.util_lo.den());
    pibs_num[k][1] =
        p.util_hi ? p.util_hi->num() * (den / p.util_hi->den()) : 0;
    if (p.criticality == CritLevel::HI)
      psH.push_back(k);
    else
      psL.push_back(k);
  }

  hp.resize(n);
  hpH.resize(n);
  hpL.resize(n);
  hip.resize(n);
  hipH.resize(n);
  hipL.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    hp[i] = hp_indices(s, i);
    for (std::size_t j : hp[i]) {
      if (s.servers[j].criticality == CritLevel::HI)
        hpH[i].push_back(j);
      else
        hpL[i].push_back(j);
    }
    hip[i] = hp[i];
    hip[i].push_back(i);
    hipH[i] = hpH[i];
    hipH[i].push_back(i);  // the queried server always belongs, whatever its level
    hipL[i] = hpL[i];
    if (s.servers[i].criticality == CritLevel::LO) hipL[i].push_back(i);
  }

  bound_or_all.resize(s.pibs.size());
  for (std::size_t k = 0; k < s.pibs.size(); ++k) {
    auto bound = s.bindings.find(s.pibs[k].id);
    if (bound != s.bindings.end()) {
      bound_or_all[k].push_back(s.server_index(bound->second));
    } else {
      for (std::size_t i = 0; i < n; ++i) bound_or_all[k].push_back(i);
    }
  }
}

std::vector<std::size_t> AnalysisContext::star_candidates(std::size_t k,
                                                          bool extended) const {
  if (set->bindings.count(set->pibs[k].id) || extended) return bound_or_all[k];
  std::vector<std::size_t> out;
  for (std::size_t i : bound_or_all[k])
    if (set->servers[i].criticality == CritLevel::HI) out.push_back(i);
  return out;
}

std::vector<std::size_t> AnalysisContext::hi_candidates(std::size_t k,
                                                        bool lo_survive) const {
  if (set->bindings.count(set->pibs[k].id) || lo_survive) return bound_or_all[k];
  std::vector<std::size_t> out;
  for (std::size_t i : bound_or_all[k])
    if (set->servers[i].criticality == CritLevel::HI) out.push_back(i);
  return out;
}

namespace {

Time ceil_scaled(int128 accum, int128 den2) {
  int128 q = accum / den2;
  if (accum % den2 != 0 && accum > 0) ++q;
  return static_cast<Time>(q);
}

}  // namespace

std::optional<Time> task_lo_response(const AnalysisContext& ctx, std::size_t i,
                                     bool with_pibs) {
  const auto& s = *ctx.set;
  const Time base = ctx.cap(i, CritLevel::LO);
  auto step = [&](Time r) {
    int128 whole = base;
    for (std::size_t j : ctx.hp[i])
      whole += static_cast<int128>(ceil_div(r, ctx.period(j))) *
               ctx.cap(j, CritLevel::LO);
    int128 accum = whole * ctx.den2;
    if (with_pibs) {
      for (std::size_t k = 0; k < s.pibs.size(); ++k)
        accum += ctx.max_interference_l2(k, CritLevel::LO, r, ctx.hip[i]);
    }
    return ceil_scaled(accum, ctx.den2);
  };
  return fixed_point(base, step, s.servers[i].deadline);
}

std::optional<Time> task_hi_response(const AnalysisContext& ctx, std::size_t i,
                                     bool with_pibs) {
  const auto& s = *ctx.set;
  const Time base = ctx.cap(i, CritLevel::HI);
  auto step = [&](Time r) {
    int128 whole = base;
    for (std::size_t j : ctx.hpH[i])
      whole += static_cast<int128>(ceil_div(r, ctx.period(j))) *
               ctx.cap(j, CritLevel::HI);
    int128 accum = whole * ctx.den2;
    if (with_pibs) {
      for (std::size_t k = 0; k < s.pibs.size(); ++k)
        accum += ctx.max_interference_l2(k, CritLevel::HI, r, ctx.hipH[i]);
    }
    return ceil_scaled(accum, ctx.den2);
  };
  return fixed_point(base, step, s.servers[i].deadline);
}

std::optional<Time> task_lo_star(const AnalysisContext& ctx, std::size_t i,
                                 bool with_pibs) {
  const auto& s = *ctx.set;
  const auto& srv = s.servers[i];
  const Time base = std::min(srv.capacity_lo, srv.capacity_hi.value_or(srv.capacity_lo));
  auto step = [&](Time r) {
    int128 whole = base;
    for (std::size_t j : ctx.hp[i])
      whole += static_cast<int128>(ceil_div(r, ctx.period(j))) *
               ctx.cap(j, CritLevel::LO);
    int128 accum = whole * ctx.den2;
    if (with_pibs) {
      for (std::size_t k = 0; k < s.pibs.size(); ++k)
        accum += ctx.max_interference_l2(k, CritLevel::LO, r, ctx.hip[i]);
    }
    return ceil_scaled(accum, ctx.den2);
  };
  return fixed_point(base, step, srv.deadline);
}

std::optional<Time> task_mode_change(const AnalysisContext& ctx, std::size_t i,
                                     Time lo_star, bool with_pibs,
                                     bool extended) {
  const auto& s = *ctx.set;
  const auto& srv = s.servers[i];
  const Time base = srv.criticality == CritLevel::HI
                        ? srv.capacity(CritLevel::HI)
                        : std::min(srv.capacity_lo,
                                   srv.capacity_hi.value_or(srv.capacity_lo));
  auto step = [&](Time r) {
    int128 whole = base;
    for (std::size_t j : ctx.hpH[i])
      whole += static_cast<int128>(ceil_div(r, ctx.period(j))) *
               ctx.cap(j, CritLevel::HI);
    for (std::size_t j : ctx.hpL[i])
      whole += static_cast<int128>(ceil_div(lo_star, ctx.period(j))) *
               ctx.cap(j, CritLevel::LO);
    if (extended) {
      for (std::size_t j : ctx.hpL[i]) {
        int128 extra = static_cast<int128>(ceil_div(r, ctx.period(j))) -
                       ceil_div(lo_star, ctx.period(j));
        if (extra > 0) whole += extra * ctx.cap(j, CritLevel::HI);
      }
    }
    int128 accum = whole * ctx.den2;
    if (with_pibs) {
      const Time tail = r > lo_star ? r - lo_star : 0;
      for (std::size_t k : ctx.psH)
        accum += ctx.max_interference_l2(k, CritLevel::HI, r, ctx.hip[i]);
      for (std::size_t k : ctx.psL) {
        accum += ctx.max_interference_l2(k, CritLevel::LO, lo_star, ctx.hip[i]);
        accum += ctx.max_interference_l2(k, CritLevel::HI, tail,
                                         extended ? ctx.hip[i] : ctx.hipH[i]);
      }
    }
    return ceil_scaled(accum, ctx.den2);
  };
  return fixed_point(base, step, srv.deadline);
}

namespace {

// first term (2 - U) * U * T_s, scaled by L^2
int128 pibs_first_term_l2(const AnalysisContext& ctx, int128 util_num, Time t_s) {
  return (2 * ctx.den - util_num) * t_s * util_num;
}

std::optional<Time> pibs_response_at(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s, int128 own_num,
                                     CritLevel sum_level,
                                     const std::vector<std::size_t>& server_sum,
                                     const std::vector<std::size_t>& host_set) {
  const auto& set = *ctx.set;
  const Time t_s = ctx.period(s);
  const int128 first = pibs_first_term_l2(ctx, own_num, t_s);
  auto step = [&](Time r) {
    int128 whole = 0;
    for (std::size_t j : server_sum)
      whole += static_cast<int128>(ceil_div(r, ctx.period(j))) *
               ctx.cap(j, sum_level);
    int128 accum = first + whole * ctx.den2;
    for (std::size_t kk = 0; kk < set.pibs.size(); ++kk) {
      if (kk == k) continue;
      accum += ctx.max_interference_l2(kk, sum_level, r, host_set);
    }
    return ceil_scaled(accum, ctx.den2);
  };
  return fixed_point(ceil_scaled(first, ctx.den2), step, t_s);
}

}  // namespace

std::optional<Time> pibs_lo_response(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s) {
  return pibs_response_at(ctx, k, s, ctx.util_num(k, CritLevel::LO),
                          CritLevel::LO, ctx.hip[s], ctx.hip[s]);
}

std::optional<Time> pibs_hi_response(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s) {
  return pibs_response_at(ctx, k, s, ctx.util_num(k, CritLevel::HI),
                          CritLevel::HI, ctx.hipH[s], ctx.hipH[s]);
}

std::optional<Time> pibs_lo_star(const AnalysisContext& ctx, std::size_t k,
                                 std::size_t s) {
  // A pibs that has already delivered its smaller budget has met its HI-mode
  // requirement; seed with the level that minimizes its own demand.
  const CritLevel min_level = ctx.pib(k).criticality == CritLevel::HI
                                  ? CritLevel::LO
                                  : CritLevel::HI;
  return pibs_response_at(ctx, k, s, ctx.util_num(k, min_level), CritLevel::LO,
                          ctx.hip[s], ctx.hip[s]);
}

std::optional<Time> pibs_mode_change(const AnalysisContext& ctx, std::size_t k,
                                     std::size_t s, Time lo_star,
                                     bool extended) {
  const auto& set = *ctx.set;
  const Time t_s = ctx.period(s);
  const int128 first =
      pibs_first_term_l2(ctx, ctx.util_num(k, CritLevel::HI), t_s);
  auto step = [&](Time r) {
    int128 whole = 0;
    for (std::size_t j : ctx.hipH[s])
      whole += static_cast<int128>(ceil_div(r, ctx.period(j))) *
               ctx.cap(j, CritLevel::HI);
    for (std::size_t j : ctx.hipL[s])
      whole += static_cast<int128>(ceil_div(lo_star, ctx.period(j))) *
               ctx.cap(j, CritLevel::LO);
    if (extended) {
      for (std::size_t j : ctx.hpL[s]) {
        int128 extra = static_cast<int128>(ceil_div(r, ctx.period(j))) -
                       ceil_div(lo_star, ctx.period(j));
        if (extra > 0) whole += extra * ctx.cap(j, CritLevel::HI);
      }
    }
    int128 accum = first + whole * ctx.den2;
    const Time tail = r > lo_star ? r - lo_star : 0;
    for (std::size_t kk : ctx.psH) {
      if (kk == k) continue;
      accum += ctx.max_interference_l2(kk, CritLevel::HI, r, ctx.hip[s]);
    }
    for (std::size_t kk : ctx.psL) {
      if (kk == k) continue;
      accum += ctx.max_interference_l2(kk, CritLevel::LO, lo_star, ctx.hip[s]);
      accum += ctx.max_interference_l2(kk, CritLevel::HI, tail,
                                       extended ? ctx.hip[s] : ctx.hipH[s]);
    }
    return ceil_scaled(accum, ctx.den2);
  };
  return fixed_point(ceil_scaled(first, ctx.den2), step, t_s);
}

}  // namespace detail

Rat pibs_interference(Time t, Time host_period, const Util& util) {
  if (host_period <= 0) throw std::invalid_argument("host period must be positive");
  if (t < 0) t = 0;
  Rat releases(ceil_div(t, host_period));
  return (Rat(1) + releases - util) * Rat(host_period) * util;
}

RtaResult ss_rta(const TaskSet& set) {
  detail::AnalysisContext ctx(set);
  RtaResult out;
  out.schedulable = true;
  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    auto r = detail::task_lo_response(ctx, i, /*with_pibs=*/false);
    out.server_response[set.servers[i].id] = r;
    if (!r) out.schedulable = false;
  }
  return out;
}

RtaResult ss_pibs_rta(const TaskSet& set) {
  detail::AnalysisContext ctx(set);
  RtaResult out;
  out.schedulable = true;
  for (std::size_t i = 0; i < set.servers.size(); ++i) {
    auto r = detail::task_lo_response(ctx, i, /*with_pibs=*/true);
    out.server_response[set.servers[i].id] = r;
    if (!r) out.schedulable = false;
  }
  for (std::size_t k = 0; k < set.pibs.size(); ++k) {
    auto& per_server = out.pibs_response[set.pibs[k].id];
    for (std::size_t s : ctx.bound_or_all[k]) {
      auto r = detail::pibs_lo_response(ctx, k, s);
      per_server[set.servers[s].id] = r;
      if (!r) out.schedulable = false;
    }
  }
  return out;
}

}  // namespace mcsio
