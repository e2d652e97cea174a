#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mcsio/rational.hpp"

namespace mcsio {

struct ReplenishmentItem {
  Time time = 0;
  Time amount = 0;
};

// What to collapse when a post would overflow the list. MERGE_NEXT folds the
// head's remaining budget into the following item (defers budget, matching
// the reference behaviour); MERGE_TAIL folds the two newest items together.
enum class MergePolicy { MERGE_NEXT, MERGE_TAIL };

struct PostOutcome {
  std::optional<ReplenishmentItem> posted;
  // (amount moved, time it was deferred to)
  std::vector<std::pair<Time, Time>> merges;
};

// Bounded, time-ordered budget list of a sporadic server. `usage` tracks how
// much of the head item the current execution burst has consumed; the head's
// amount is only settled when the burst finishes. The sum of item amounts is
// invariant across consume/post cycles (it changes only at a mode change).
class ReplenishmentQueue {
 public:
  ReplenishmentQueue() = default;
  ReplenishmentQueue(std::size_t max_length, MergePolicy policy);

  void init_full(Time capacity, Time at);
  void set_items(std::vector<ReplenishmentItem> items);  // test hook

  const std::vector<ReplenishmentItem>& items() const { return items_; }
  std::size_t max_length() const { return max_length_; }
  Time usage() const { return usage_; }
  void set_usage(Time usage) { usage_ = usage; }  // test hook

  bool empty() const { return items_.empty(); }
  Time outstanding() const;               // sum of amounts minus usage
  Time available_now(Time now) const;     // usable head budget at `now`
  std::optional<Time> next_available(Time now) const;
  Time available_before(Time deadline) const;

  // Start of a consumption burst: the head's time is moved up to `now` so a
  // later post lands one period after the actual execution start.
  void stamp_head(Time now);
  void consume(Time ticks);

  // End of a burst (block or depletion): post the consumed amount one period
  // after the burst start and settle the head.
  PostOutcome finish_burst(Time period);

  // Mode-change adjustment for a HI-criticality server: the capacity delta is
  // added to the head when the head is already due or the list is full,
  // otherwise a fresh item becomes available immediately.
  void grow_head(Time now, Time delta);

  // Mode-change adjustment for a LO-criticality server: remove `delta` budget
  // walking backwards from the last item before the deadline, reposting the
  // used part of the head one period later when execution already started;
  // any remainder is stripped from the tail.
  void shrink(Time now, Time delta, std::optional<Time> deadline, Time period);

 private:
  void insert_sorted(ReplenishmentItem item);
  std::vector<std::pair<Time, Time>> enforce_length();

  std::vector<ReplenishmentItem> items_;
  std::size_t max_length_ = 8;
  MergePolicy policy_ = MergePolicy::MERGE_NEXT;
  Time usage_ = 0;
};

// Next eligibility time of a bandwidth-preserving server that started running
// at `start` and consumed `consumed` ticks: start + consumed/U, rounded up to
// a whole tick (never early).
Time pibs_next_replenishment(Time start, Time consumed, const Util& util);

}  // namespace mcsio
