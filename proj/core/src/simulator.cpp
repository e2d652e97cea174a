#include "mcsio/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace mcsio {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::RELEASE: return "RELEASE";
    case EventKind::DISPATCH: return "DISPATCH";
    case EventKind::PREEMPT: return "PREEMPT";
    case EventKind::BLOCK: return "BLOCK";
    case EventKind::DEPLETE: return "DEPLETE";
    case EventKind::REPLENISH_POST: return "REPLENISH_POST";
    case EventKind::REPLENISH_MERGE: return "REPLENISH_MERGE";
    case EventKind::IO_INIT: return "IO_INIT";
    case EventKind::IRQ_TOP: return "IRQ_TOP";
    case EventKind::BH_START: return "BH_START";
    case EventKind::BH_END: return "BH_END";
    case EventKind::MODE_CHANGE: return "MODE_CHANGE";
    case EventKind::JOB_END: return "JOB_END";
    case EventKind::DEADLINE_MISS: return "DEADLINE_MISS";
  }
  throw std::logic_error("bad event kind");
}

std::size_t SimTrace::count(EventKind kind) const {
  std::size_t n = 0;
  for (const auto& e : events)
    if (e.kind == kind) ++n;
  return n;
}

std::size_t SimTrace::count(EventKind kind, const std::string& subject) const {
  std::size_t n = 0;
  for (const auto& e : events)
    if (e.kind == kind && e.subject == subject) ++n;
  return n;
}

namespace {

constexpr Time kNever = std::numeric_limits<Time>::max();

struct BhWork {
  std::size_t instance;
  int index;  // 1-based arrival number within the stream
  std::size_t requester;
  Time remaining;
  Time wake;
  Time deadline;  // kNever when not checked (server handlers)
  bool started = false;
  bool missed = false;
};

struct StreamInstance {
  InterruptStreamSpec spec;
  std::size_t requester;
  bool handler_is_pibs;
  std::size_t handler;
  int seq;  // 1-based initiation order
  int arrived = 0;
  int completed = 0;
  Time next_arrival = kNever;
  std::optional<std::size_t> gated_server;
};

struct ReleasedJob {
  int number;
  Time release;
  Time deadline;
  Time remaining;
  bool missed = false;
};

struct ServerRt {
  const SporadicServerSpec* spec = nullptr;
  ReplenishmentQueue queue;
  bool in_burst = false;

  bool has_jobs = false;
  std::vector<JobSpec> job_specs;
  int jobs_released = 0;
  Time next_release = kNever;
  std::deque<ReleasedJob> jobs;
  std::optional<std::size_t> io_gate;

  std::deque<BhWork> bh_queue;

  bool ready = false;
  Time ready_since = 0;
};

struct PibsRt {
  const PibsSpec* spec = nullptr;
  Time repl_time = 0;
  bool in_burst = false;
  std::size_t serving = 0;
  Time burst_start = 0;
  Time consumed = 0;
  Time budget = 0;
  std::deque<BhWork> queue;

  bool ready = false;
  Time ready_since = 0;
};

struct Runner {
  bool valid = false;
  bool is_pibs = false;
  std::size_t idx = 0;

  bool operator==(const Runner&) const = default;
};

class Engine {
 public:
  Engine(const TaskSet& set, const Workload& wl) : set_(set), wl_(wl) {
    set_.validate();
    if (!set_.priorities_assigned())
      throw std::invalid_argument("simulation requires assigned priorities");
    build();
  }

  SimTrace run() {
    Time now = 0;
    process_tick(now);
    while (true) {
      Time next = next_event_time(now);
      if (next >= wl_.config.horizon) {
        charge(now, wl_.config.horizon);
        break;
      }
      charge(now, next);
      now = next;
      process_tick(now);
    }
    return std::move(trace_);
  }

 private:
  // ---- setup ----

  void build() {
    servers_.resize(set_.servers.size());
    for (std::size_t i = 0; i < set_.servers.size(); ++i) {
      auto& rt = servers_[i];
      rt.spec = &set_.servers[i];
      rt.queue = ReplenishmentQueue(wl_.config.list_length, wl_.config.merge_policy);
      rt.queue.init_full(rt.spec->capacity_lo, 0);
    }
    pibs_.resize(set_.pibs.size());
    for (std::size_t k = 0; k < set_.pibs.size(); ++k)
      pibs_[k].spec = &set_.pibs[k];

    for (const auto& job : wl_.jobs) {
      std::size_t i = set_.server_index(job.server);
      if (job.busy <= 0)
        throw std::invalid_argument("zero-length job for " + job.server);
      validate_stream(job.io);
      servers_[i].has_jobs = true;
      servers_[i].job_specs.push_back(job);
      servers_[i].next_release = 0;
    }
    for (const auto& ts : wl_.streams) {
      set_.server_index(ts.requester);
      validate_stream(ts.stream);
    }
    for (const auto& job : wl_.jobs) {
      if (!job.io) continue;
      if (is_server_id(job.io->handler) &&
          servers_[set_.server_index(job.io->handler)].has_jobs)
        throw std::invalid_argument(job.io->handler +
                                    ": bottom-half server cannot also run jobs");
    }
    pending_streams_ = wl_.streams;
    std::stable_sort(pending_streams_.begin(), pending_streams_.end(),
                     [](const TimedStream& a, const TimedStream& b) {
                       return a.at < b.at;
                     });
  }

  bool is_server_id(const std::string& id) const {
    for (const auto& s : set_.servers)
      if (s.id == id) return true;
    return false;
  }

  void validate_stream(const std::optional<InterruptStreamSpec>& io) const {
    if (!io) return;
    validate_stream(*io);
  }

  void validate_stream(const InterruptStreamSpec& io) const {
    if (!is_server_id(io.handler)) set_.pibs_index(io.handler);  // throws if unknown
    if (io.count < 1) throw std::invalid_argument("stream needs at least one interrupt");
    if (io.bh_lo < 1) throw std::invalid_argument("bottom half cost must be positive");
    if (io.bh_hi < 0) throw std::invalid_argument("bottom half cost must be non-negative");
    if (io.count > 1 && io.inter_arrival <= std::max(io.bh_lo, io.bh_hi))
      throw std::invalid_argument("inter-arrival must exceed the bottom-half cost");
    if (io.first_delay < 0) throw std::invalid_argument("bad first-interrupt delay");
  }

  // ---- trace helpers ----

  void emit(Time t, EventKind kind, const std::string& subject, std::string detail) {
    trace_.events.push_back({t, kind, subject, std::move(detail)});
  }

  const std::string& server_id(std::size_t i) const { return set_.servers[i].id; }
  const std::string& pibs_id(std::size_t k) const { return set_.pibs[k].id; }

  static std::string bh_detail(const StreamInstance& inst, const BhWork& bh,
                               const std::string& requester) {
    return "stream=" + std::to_string(inst.seq) + " n=" + std::to_string(bh.index) +
           " for=" + requester;
  }

  // ---- workload progression ----

  Time job_work(const JobSpec& spec) const {
    if (mode_ == CritLevel::HI) return spec.busy_hi.value_or(spec.busy);
    return spec.busy;
  }

  Time bh_cost(const InterruptStreamSpec& spec) const {
    return mode_ == CritLevel::HI ? spec.bh_hi : spec.bh_lo;
  }

  void initiate_stream(Time now, const InterruptStreamSpec& spec,
                       std::size_t requester, bool gates) {
    StreamInstance inst;
    inst.spec = spec;
    inst.requester = requester;
    inst.handler_is_pibs = !is_server_id(spec.handler);
    inst.handler = inst.handler_is_pibs ? set_.pibs_index(spec.handler)
                                        : set_.server_index(spec.handler);
    inst.seq = static_cast<int>(instances_.size()) + 1;
    inst.next_arrival = now + spec.first_delay;
    if (gates) {
      inst.gated_server = requester;
      servers_[requester].io_gate = instances_.size();
    }
    emit(now, EventKind::IO_INIT, server_id(requester),
         "handler=" + spec.handler + " K=" + std::to_string(spec.count) +
             " stream=" + std::to_string(inst.seq));
    instances_.push_back(inst);
  }

  void deliver_arrivals(Time now) {
    for (std::size_t s = 0; s < instances_.size(); ++s) {
      auto& inst = instances_[s];
      while (inst.next_arrival == now) {
        ++inst.arrived;
        BhWork bh;
        bh.instance = s;
        bh.index = inst.arrived;
        bh.requester = inst.requester;
        bh.remaining = bh_cost(inst.spec);
        bh.wake = now;
        emit(now, EventKind::IRQ_TOP, inst.spec.handler,
             bh_detail(inst, bh, server_id(inst.requester)));
        if (bh.remaining > 0) {
          if (inst.handler_is_pibs) {
            bh.deadline = now + set_.servers[inst.requester].period;
            pibs_[inst.handler].queue.push_back(bh);
          } else {
            bh.deadline = kNever;
            servers_[inst.handler].bh_queue.push_back(bh);
          }
        } else {
          // zero HI-mode cost: the interrupt is dropped after the top half
          bh_completed(now, s);
        }
        inst.next_arrival =
            inst.arrived == inst.spec.count ? kNever : now + inst.spec.inter_arrival;
      }
    }
  }

  void bh_completed(Time now, std::size_t instance) {
    auto& inst = instances_[instance];
    ++inst.completed;
    if (inst.completed == inst.spec.count && inst.gated_server) {
      auto& srv = servers_[*inst.gated_server];
      if (srv.io_gate == instance) srv.io_gate.reset();
      (void)now;
    }
  }

  void process_releases(Time now) {
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      auto& rt = servers_[i];
      if (!rt.has_jobs || rt.next_release != now) continue;
      const auto& spec = rt.job_specs[static_cast<std::size_t>(rt.jobs_released) %
                                      rt.job_specs.size()];
      ReleasedJob job;
      job.number = ++rt.jobs_released;
      job.release = now;
      job.deadline = now + rt.spec->period;
      job.remaining = job_work(spec);
      rt.jobs.push_back(job);
      emit(now, EventKind::RELEASE, rt.spec->id,
           "job=" + std::to_string(job.number) +
               " deadline=" + std::to_string(job.deadline));
      rt.next_release = now + rt.spec->period;
    }
  }

  void process_stream_initiations(Time now) {
    while (stream_cursor_ < pending_streams_.size() &&
           pending_streams_[stream_cursor_].at == now) {
      const auto& ts = pending_streams_[stream_cursor_];
      initiate_stream(now, ts.stream, set_.server_index(ts.requester), false);
      ++stream_cursor_;
    }
  }

  void process_misses(Time now) {
    for (auto& rt : servers_) {
      for (auto& job : rt.jobs) {
        if (job.missed || job.deadline != now) continue;
        job.missed = true;
        emit(now, EventKind::DEADLINE_MISS, rt.spec->id,
             "job=" + std::to_string(job.number) +
                 " deadline=" + std::to_string(job.deadline));
      }
    }
    for (auto& p : pibs_) {
      for (auto& bh : p.queue) {
        if (bh.missed || bh.deadline != now || bh.remaining <= 0) continue;
        bh.missed = true;
        emit(now, EventKind::DEADLINE_MISS, p.spec->id,
             bh_detail(instances_[bh.instance], bh, server_id(bh.requester)) +
                 " deadline=" + std::to_string(bh.deadline));
      }
    }
  }

  // ---- budget and work accounting ----

  const JobSpec* current_job_spec(const ServerRt& rt) const {
    if (rt.jobs.empty()) return nullptr;
    std::size_t k = static_cast<std::size_t>(rt.jobs.front().number - 1) %
                    rt.job_specs.size();
    return &rt.job_specs[k];
  }

  bool job_startable(const ServerRt& rt, Time now) const {
    if (rt.jobs.empty()) return false;
    const auto& job = rt.jobs.front();
    return now >= job.release && !rt.io_gate.has_value() && job.remaining > 0;
  }

  bool server_has_work(const ServerRt& rt, Time now) const {
    return job_startable(rt, now) || !rt.bh_queue.empty();
  }

  Time pibs_budget_for(const PibsRt& p, std::size_t serving) const {
    return floor_mul(set_.servers[serving].period, p.spec->util(mode_));
  }

  bool pibs_ready(const PibsRt& p, Time now) const {
    if (p.queue.empty()) return false;
    if (p.in_burst) return p.budget - p.consumed > 0;
    if (now < p.repl_time) return false;
    return pibs_budget_for(p, p.queue.front().requester) > 0;
  }

  void refresh_ready(Time now) {
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      auto& rt = servers_[i];
      bool r = rt.queue.available_now(now) > 0 && server_has_work(rt, now);
      if (r && !rt.ready) rt.ready_since = now;
      rt.ready = r;
    }
    for (std::size_t k = 0; k < pibs_.size(); ++k) {
      auto& p = pibs_[k];
      bool r = pibs_ready(p, now);
      if (r && !p.ready) p.ready_since = now;
      p.ready = r;
    }
  }

  int effective_priority(const Runner& r) const {
    if (!r.is_pibs) return set_.servers[r.idx].priority;
    const auto& p = pibs_[r.idx];
    std::size_t serving = p.in_burst ? p.serving : p.queue.front().requester;
    return set_.servers[serving].priority;
  }

  // ---- burst termination ----

  void emit_post(Time now, const std::string& subject, const PostOutcome& out) {
    for (const auto& [amount, into] : out.merges)
      emit(now, EventKind::REPLENISH_MERGE, subject,
           "amount=" + std::to_string(amount) + " into=" + std::to_string(into));
    if (out.posted)
      emit(now, EventKind::REPLENISH_POST, subject,
           "amount=" + std::to_string(out.posted->amount) +
               " at=" + std::to_string(out.posted->time));
  }

  void server_end_burst(Time now, std::size_t i) {
    auto& rt = servers_[i];
    auto out = rt.queue.finish_burst(rt.spec->period);
    rt.in_burst = false;
    emit_post(now, rt.spec->id, out);
  }

  void pibs_end_burst(Time now, std::size_t k) {
    auto& p = pibs_[k];
    p.repl_time = pibs_next_replenishment(p.burst_start, p.consumed,
                                          p.spec->util(mode_));
    Time next_budget = pibs_budget_for(p, p.serving);
    emit(now, EventKind::REPLENISH_POST, p.spec->id,
         "amount=" + std::to_string(next_budget) +
             " at=" + std::to_string(p.repl_time));
    p.in_burst = false;
    p.consumed = 0;
  }

  // ---- mode change ----

  std::optional<Time> server_deadline_now(const ServerRt& rt) const {
    if (!rt.jobs.empty()) return rt.jobs.front().deadline;
    if (rt.has_jobs && rt.next_release != kNever) return rt.next_release;
    return std::nullopt;
  }

  void apply_mode_change(Time now, const std::string& subject,
                         const std::string& reason) {
    emit(now, EventKind::MODE_CHANGE, subject, "reason=" + reason);
    mode_ = CritLevel::HI;
    trace_.mode_changed = true;
    trace_.mode_change_time = now;

    for (std::size_t i = 0; i < servers_.size(); ++i) {
      auto& rt = servers_[i];
      const auto& spec = *rt.spec;
      if (spec.criticality == CritLevel::HI) {
        Time delta = spec.capacity(CritLevel::HI) - spec.capacity_lo;
        rt.queue.grow_head(now, delta);
      } else {
        Time delta = spec.capacity_lo - spec.capacity(CritLevel::HI);
        rt.queue.shrink(now, delta, server_deadline_now(rt), spec.period);
      }
      trace_.post_change_outstanding[spec.id] = rt.queue.outstanding();
    }
    for (std::size_t k = 0; k < pibs_.size(); ++k) {
      auto& p = pibs_[k];
      p.repl_time = now;
      p.consumed = 0;
      if (p.in_burst) {
        p.burst_start = now;
        p.budget = pibs_budget_for(p, p.serving);
      }
      trace_.post_change_pibs_replenish[p.spec->id] = p.repl_time;
    }

    // The running subject may have lost its budget in the adjustment.
    if (runner_.valid && !runner_.is_pibs) {
      auto& rt = servers_[runner_.idx];
      if (rt.queue.available_now(now) <= 0) {
        if (dispatch_open_) emit(now, EventKind::DEPLETE, rt.spec->id, "");
        dispatch_open_ = false;
        server_end_burst(now, runner_.idx);
        runner_.valid = false;
      }
    } else if (runner_.valid && runner_.is_pibs) {
      auto& p = pibs_[runner_.idx];
      if (p.budget <= 0) {
        if (dispatch_open_) emit(now, EventKind::DEPLETE, p.spec->id, "");
        dispatch_open_ = false;
        p.in_burst = false;
        runner_.valid = false;
      }
    }
  }

  void check_triggers(Time now) {
    if (mode_ == CritLevel::HI) return;
    if (wl_.config.force_mode_change_at == now) {
      apply_mode_change(now, "system", "injected");
      return;
    }
    // A HI server that cannot finish its job from what remains before the
    // deadline must escalate at once.
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      auto& rt = servers_[i];
      if (rt.spec->criticality != CritLevel::HI || !rt.has_jobs) continue;
      if (rt.jobs.empty() || rt.io_gate.has_value()) continue;
      const auto& job = rt.jobs.front();
      if (now < job.release || job.remaining <= 0) continue;
      if (rt.queue.available_before(job.deadline) == 0) {
        apply_mode_change(now, rt.spec->id, "ss-depleted");
        return;
      }
    }
  }

  // ---- execution ----

  void charge(Time from, Time to) {
    if (!runner_.valid || to <= from) return;
    Time ticks = to - from;
    if (!runner_.is_pibs) {
      auto& rt = servers_[runner_.idx];
      rt.queue.consume(ticks);
      Time work = ticks;
      if (overhead_left_ > 0) {
        Time oh = std::min(overhead_left_, work);
        overhead_left_ -= oh;
        work -= oh;
      }
      if (work > 0) {
        if (!rt.bh_queue.empty() && running_bh_) {
          rt.bh_queue.front().remaining -= work;
        } else {
          rt.jobs.front().remaining -= work;
        }
      }
    } else {
      auto& p = pibs_[runner_.idx];
      p.consumed += ticks;
      Time work = ticks;
      if (overhead_left_ > 0) {
        Time oh = std::min(overhead_left_, work);
        overhead_left_ -= oh;
        work -= oh;
      }
      if (work > 0) p.queue.front().remaining -= work;
    }
  }

  Time runner_segment_end(Time now) const {
    if (!runner_.valid) return kNever;
    if (!runner_.is_pibs) {
      const auto& rt = servers_[runner_.idx];
      Time budget_end = now + rt.queue.available_now(now);
      Time item = running_bh_ && !rt.bh_queue.empty() ? rt.bh_queue.front().remaining
                                                      : rt.jobs.front().remaining;
      Time work_end = now + overhead_left_ + item;
      return std::min(budget_end, work_end);
    }
    const auto& p = pibs_[runner_.idx];
    Time budget_end = now + (p.budget - p.consumed);
    Time work_end = now + overhead_left_ + p.queue.front().remaining;
    return std::min(budget_end, work_end);
  }

  Time next_event_time(Time now) const {
    Time t = wl_.config.horizon;
    auto consider = [&](Time v) {
      if (v > now && v < t) t = v;
    };
    consider(runner_segment_end(now));
    for (const auto& inst : instances_)
      if (inst.next_arrival != kNever) consider(inst.next_arrival);
    if (stream_cursor_ < pending_streams_.size())
      consider(pending_streams_[stream_cursor_].at);
    for (const auto& rt : servers_) {
      if (rt.has_jobs && rt.next_release != kNever) consider(rt.next_release);
      for (const auto& job : rt.jobs)
        if (!job.missed && job.remaining > 0) consider(job.deadline);
      // budget arrival for a waiting server
      if (!runner_is(rt) && server_has_work(rt, now)) {
        auto avail = rt.queue.next_available(now);
        if (avail) consider(*avail);
      }
    }
    for (std::size_t k = 0; k < pibs_.size(); ++k) {
      const auto& p = pibs_[k];
      for (const auto& bh : p.queue)
        if (!bh.missed && bh.remaining > 0 && bh.deadline != kNever)
          consider(bh.deadline);
      if (!p.queue.empty() && !p.in_burst) consider(p.repl_time);
    }
    if (wl_.config.force_mode_change_at && mode_ == CritLevel::LO)
      consider(*wl_.config.force_mode_change_at);
    return t;
  }

  bool runner_is(const ServerRt& rt) const {
    return runner_.valid && !runner_.is_pibs &&
           servers_[runner_.idx].spec == rt.spec;
  }

  // Settles whatever the runner finished or exhausted at `now`; emits the
  // item-completion events and decides whether the burst keeps going.
  void settle_runner(Time now) {
    if (!runner_.valid) return;
    if (!runner_.is_pibs)
      settle_server(now);
    else
      settle_pibs(now);
  }

  void settle_server(Time now) {
    auto& rt = servers_[runner_.idx];
    // item completion
    if (running_bh_) {
      if (!rt.bh_queue.empty() && rt.bh_queue.front().remaining == 0) {
        auto bh = rt.bh_queue.front();
        rt.bh_queue.pop_front();
        emit(now, EventKind::BH_END, rt.spec->id,
             bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
        bh_completed(now, bh.instance);
      }
    } else if (!rt.jobs.empty() && rt.jobs.front().remaining == 0) {
      auto job = rt.jobs.front();
      rt.jobs.pop_front();
      emit(now, EventKind::JOB_END, rt.spec->id, "job=" + std::to_string(job.number));
      dispatch_open_ = false;
      const auto* spec = &rt.job_specs[static_cast<std::size_t>(job.number - 1) %
                                       rt.job_specs.size()];
      if (spec->io) pending_io_ = {runner_.idx, *spec->io, spec->io_blocking};
    }
  }

  void settle_pibs(Time now) {
    auto& p = pibs_[runner_.idx];
    if (!p.queue.empty() && p.queue.front().remaining == 0) {
      auto bh = p.queue.front();
      p.queue.pop_front();
      emit(now, EventKind::BH_END, p.spec->id,
           bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
      bh_completed(now, bh.instance);
    }
  }

  // After arrivals and releases have landed, decide whether the runner keeps
  // the processor, hands it over, or stops.
  void continue_or_stop(Time now) {
    if (!runner_.valid) return;
    if (!runner_.is_pibs) {
      auto& rt = servers_[runner_.idx];
      bool depleted = rt.queue.available_now(now) == 0;
      if (depleted) {
        // settle the exhausted head chunk; execution may go on from the next
        // item when it is already due
        server_post_and_maybe_continue(now, rt);
        return;
      }
      if (running_bh_) {
        if (!rt.bh_queue.empty()) {
          auto& bh = rt.bh_queue.front();
          if (!bh.started) {
            bh.started = true;
            emit(now, EventKind::BH_START, rt.spec->id,
                 bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
          }
          return;
        }
        if (job_startable(rt, now)) {
          running_bh_ = false;
          start_job_dispatch(now, rt);
          return;
        }
        emit(now, EventKind::BLOCK, rt.spec->id, "");
        dispatch_open_ = false;
        server_end_burst(now, runner_.idx);
        flush_pending_io(now);
        runner_.valid = false;
        return;
      }
      // job context
      if (!rt.jobs.empty() && job_startable(rt, now) &&
          rt.jobs.front().remaining > 0) {
        if (!dispatch_open_) {
          flush_pending_io(now);
          start_job_dispatch(now, rt);
        }
        return;
      }
      if (!rt.bh_queue.empty()) {
        running_bh_ = true;
        if (!dispatch_open_) {
          flush_pending_io(now);
          emit(now, EventKind::DISPATCH, rt.spec->id, "bh");
          dispatch_open_ = true;
          overhead_left_ = wl_.config.dispatch_overhead;
        }
        auto& bh = rt.bh_queue.front();
        if (!bh.started) {
          bh.started = true;
          emit(now, EventKind::BH_START, rt.spec->id,
               bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
        }
        return;
      }
      // nothing runnable now: burst over
      if (dispatch_open_) {
        emit(now, EventKind::BLOCK, rt.spec->id, "");
        dispatch_open_ = false;
      }
      server_end_burst(now, runner_.idx);
      flush_pending_io(now);
      runner_.valid = false;
      return;
    }

    auto& p = pibs_[runner_.idx];
    bool depleted = p.budget - p.consumed <= 0;
    bool mid_bh = !p.queue.empty() && p.queue.front().started &&
                  p.queue.front().remaining > 0;
    if (depleted && mid_bh && p.spec->criticality == CritLevel::HI &&
        mode_ == CritLevel::LO) {
      apply_mode_change(now, p.spec->id, "pibs-depleted");
      if (!runner_.valid) return;
      depleted = p.budget - p.consumed <= 0;
    }
    if (depleted) {
      if (dispatch_open_) {
        emit(now, mid_bh || !p.queue.empty() ? EventKind::DEPLETE : EventKind::BLOCK,
             p.spec->id, "");
        dispatch_open_ = false;
      }
      pibs_end_burst(now, runner_.idx);
      runner_.valid = false;
      return;
    }
    if (!p.queue.empty() && p.queue.front().requester == p.serving) {
      auto& bh = p.queue.front();
      if (!bh.started) {
        bh.started = true;
        emit(now, EventKind::BH_START, p.spec->id,
             bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
      }
      return;
    }
    // no more work for the served server (a queued request for another
    // server starts a fresh burst after the replenishment)
    if (dispatch_open_) {
      emit(now, EventKind::BLOCK, p.spec->id, "");
      dispatch_open_ = false;
    }
    pibs_end_burst(now, runner_.idx);
    runner_.valid = false;
  }

  void server_post_and_maybe_continue(Time now, ServerRt& rt) {
    bool has_more_work =
        running_bh_ ? !rt.bh_queue.empty() : job_startable(rt, now);
    if (!running_bh_ && !job_startable(rt, now) && !rt.bh_queue.empty())
      has_more_work = true;
    auto out = rt.queue.finish_burst(rt.spec->period);
    emit_post(now, rt.spec->id, out);
    if (has_more_work && rt.queue.available_now(now) > 0) {
      rt.queue.stamp_head(now);
      // burst rolls over into the next replenishment chunk
      continue_or_stop(now);
      return;
    }
    rt.in_burst = false;
    if (dispatch_open_) {
      emit(now, has_more_work ? EventKind::DEPLETE : EventKind::BLOCK, rt.spec->id, "");
      dispatch_open_ = false;
    }
    flush_pending_io(now);
    runner_.valid = false;
  }

  void start_job_dispatch(Time now, ServerRt& rt) {
    emit(now, EventKind::DISPATCH, rt.spec->id,
         "job=" + std::to_string(rt.jobs.front().number));
    dispatch_open_ = true;
    overhead_left_ = wl_.config.dispatch_overhead;
  }

  void flush_pending_io(Time now) {
    if (!pending_io_) return;
    auto [idx, spec, blocking] = *pending_io_;
    pending_io_.reset();
    initiate_stream(now, spec, idx, blocking);
  }

  void dispatch(Time now) {
    refresh_ready(now);
    Runner best;
    int best_prio = 0;
    Time best_since = 0;
    std::string best_id;
    auto offer = [&](Runner r, int prio, Time since, const std::string& id) {
      if (!best.valid || prio < best_prio ||
          (prio == best_prio && (since < best_since ||
                                 (since == best_since && id < best_id)))) {
        best = r;
        best_prio = prio;
        best_since = since;
        best_id = id;
      }
    };
    for (std::size_t i = 0; i < servers_.size(); ++i)
      if (servers_[i].ready)
        offer({true, false, i}, servers_[i].spec->priority,
              servers_[i].ready_since, servers_[i].spec->id);
    for (std::size_t k = 0; k < pibs_.size(); ++k)
      if (pibs_[k].ready)
        offer({true, true, k}, effective_priority({true, true, k}),
              pibs_[k].ready_since, pibs_[k].spec->id);
    if (!best.valid) return;
    if (runner_.valid && best == runner_) return;
    if (runner_.valid) {
      const std::string& old_id = runner_.is_pibs ? pibs_id(runner_.idx)
                                                  : server_id(runner_.idx);
      emit(now, EventKind::PREEMPT, old_id, "by=" + best_id);
      dispatch_open_ = false;
    }
    runner_ = best;
    overhead_left_ = wl_.config.dispatch_overhead;
    if (!runner_.is_pibs) {
      auto& rt = servers_[runner_.idx];
      if (!rt.in_burst) {
        rt.queue.stamp_head(now);
        rt.in_burst = true;
      }
      running_bh_ = !job_startable(rt, now);
      if (running_bh_) {
        emit(now, EventKind::DISPATCH, rt.spec->id, "bh");
        dispatch_open_ = true;
        auto& bh = rt.bh_queue.front();
        if (!bh.started) {
          bh.started = true;
          emit(now, EventKind::BH_START, rt.spec->id,
               bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
        }
      } else {
        start_job_dispatch(now, rt);
      }
    } else {
      auto& p = pibs_[runner_.idx];
      if (!p.in_burst) {
        p.in_burst = true;
        p.serving = p.queue.front().requester;
        p.burst_start = now;
        p.consumed = 0;
        p.budget = pibs_budget_for(p, p.serving);
      }
      emit(now, EventKind::DISPATCH, p.spec->id, "serving=" + server_id(p.serving));
      dispatch_open_ = true;
      auto& bh = p.queue.front();
      if (!bh.started) {
        bh.started = true;
        emit(now, EventKind::BH_START, p.spec->id,
             bh_detail(instances_[bh.instance], bh, server_id(bh.requester)));
      }
    }
  }

  void process_tick(Time now) {
    settle_runner(now);
    process_stream_initiations(now);
    deliver_arrivals(now);
    process_releases(now);
    continue_or_stop(now);
    process_misses(now);
    check_triggers(now);
    dispatch(now);
  }

  TaskSet set_;
  const Workload& wl_;
  std::vector<ServerRt> servers_;
  std::vector<PibsRt> pibs_;
  std::vector<StreamInstance> instances_;
  std::vector<TimedStream> pending_streams_;
  std::size_t stream_cursor_ = 0;
  CritLevel mode_ = CritLevel::LO;
  Runner runner_;
  bool dispatch_open_ = false;
  bool running_bh_ = false;
  Time overhead_left_ = 0;
  std::optional<std::tuple<std::size_t, InterruptStreamSpec, bool>> pending_io_;
  SimTrace trace_;
};

}  // namespace

SimTrace simulate(const TaskSet& set, const Workload& workload) {
  if (workload.config.horizon <= 0)
    throw std::invalid_argument("horizon must be positive");
  Engine engine(set, workload);
  return engine.run();
}

ReplayScenario replay_scenario(const std::string& name) {
  ReplayScenario sc;
  SporadicServerSpec tau1;
  tau1.id = "tau1";
  tau1.period = 16;
  tau1.deadline = 16;
  tau1.capacity_lo = 8;
  tau1.criticality = CritLevel::LO;
  sc.workload.config.horizon = 36;
  sc.workload.config.list_length = 3;
  sc.workload.config.merge_policy = MergePolicy::MERGE_NEXT;

  InterruptStreamSpec io;
  io.count = 4;
  io.bh_lo = 1;
  io.bh_hi = 1;
  io.first_delay = 1;
  io.inter_arrival = 2;

  if (name == "gantt-ss-only") {
    SporadicServerSpec tau2;
    tau2.id = "tau2";
    tau2.period = 16;
    tau2.deadline = 16;
    tau2.capacity_lo = 4;
    tau2.criticality = CritLevel::LO;
    sc.set.servers = {tau1, tau2};
    io.handler = "tau2";
  } else if (name == "gantt-ss-pibs") {
    PibsSpec p;
    p.id = "tau2";
    p.util_lo = Util(1, 4);
    p.criticality = CritLevel::LO;
    sc.set.servers = {tau1};
    sc.set.pibs = {p};
    sc.set.bindings["tau2"] = "tau1";
    io.handler = "tau2";
  } else {
    throw std::invalid_argument("unknown replay scenario: " + name);
  }
  sc.set = assign_rate_monotonic(sc.set);
  JobSpec job;
  job.server = "tau1";
  job.busy = 8;
  job.io = io;
  job.io_blocking = true;
  sc.workload.jobs = {job};
  return sc;
}

}  // namespace mcsio
