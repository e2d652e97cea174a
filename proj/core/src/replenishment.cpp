#include "mcsio/replenishment.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcsio {

ReplenishmentQueue::ReplenishmentQueue(std::size_t max_length, MergePolicy policy)
    : max_length_(max_length), policy_(policy) {
  if (max_length_ == 0) throw std::invalid_argument("list length must be positive");
}

void ReplenishmentQueue::init_full(Time capacity, Time at) {
  items_.clear();
  usage_ = 0;
  items_.push_back({at, capacity});
}

void ReplenishmentQueue::set_items(std::vector<ReplenishmentItem> items) {
  items_ = std::move(items);
  for (std::size_t i = 1; i < items_.size(); ++i)
    if (items_[i].time < items_[i - 1].time)
      throw std::invalid_argument("replenishment items must be time-ordered");
}

Time ReplenishmentQueue::outstanding() const {
  Time sum = 0;
  for (const auto& r : items_) sum += r.amount;
  return sum - usage_;
}

Time ReplenishmentQueue::available_now(Time now) const {
  if (items_.empty() || items_.front().time > now) return 0;
  return items_.front().amount - usage_;
}

std::optional<Time> ReplenishmentQueue::next_available(Time now) const {
  if (items_.empty()) return std::nullopt;
  if (items_.front().amount - usage_ > 0)
    return std::max(items_.front().time, now);
  if (items_.size() < 2) return std::nullopt;
  return std::max(items_[1].time, now);
}

Time ReplenishmentQueue::available_before(Time deadline) const {
  Time sum = 0;
  for (const auto& r : items_)
    if (r.time < deadline) sum += r.amount;
  return sum > usage_ ? sum - usage_ : 0;
}

void ReplenishmentQueue::stamp_head(Time now) {
  if (items_.empty()) throw std::logic_error("stamp_head on empty queue");
  if (usage_ != 0) throw std::logic_error("stamp_head mid-burst");
  if (items_.front().time < now) items_.front().time = now;
}

void ReplenishmentQueue::consume(Time ticks) {
  if (items_.empty() || usage_ + ticks > items_.front().amount)
    throw std::logic_error("consuming more budget than available");
  usage_ += ticks;
}

void ReplenishmentQueue::insert_sorted(ReplenishmentItem item) {
  auto pos = std::upper_bound(
      items_.begin(), items_.end(), item,
      [](const ReplenishmentItem& a, const ReplenishmentItem& b) {
        return a.time < b.time;
      });
  items_.insert(pos, item);
}

std::vector<std::pair<Time, Time>> ReplenishmentQueue::enforce_length() {
  std::vector<std::pair<Time, Time>> merges;
  while (items_.size() > max_length_) {
    std::size_t from, into;
    if (policy_ == MergePolicy::MERGE_NEXT) {
      from = 0;
      into = 1;
    } else {
      from = items_.size() - 2;
      into = items_.size() - 1;
    }
    merges.emplace_back(items_[from].amount, items_[into].time);
    items_[into].amount += items_[from].amount;
    items_.erase(items_.begin() + static_cast<long>(from));
  }
  return merges;
}

PostOutcome ReplenishmentQueue::finish_burst(Time period) {
  PostOutcome out;
  if (usage_ == 0) return out;
  ReplenishmentItem posted{items_.front().time + period, usage_};
  items_.front().amount -= usage_;
  if (items_.front().amount == 0) items_.erase(items_.begin());
  usage_ = 0;
  insert_sorted(posted);
  out.posted = posted;
  out.merges = enforce_length();
  return out;
}

void ReplenishmentQueue::grow_head(Time now, Time delta) {
  if (delta <= 0) return;
  if (!items_.empty() &&
      (items_.front().time <= now || items_.size() == max_length_)) {
    items_.front().amount += delta;
  } else {
    items_.insert(items_.begin(), {now, delta});
  }
}

void ReplenishmentQueue::shrink(Time now, Time delta, std::optional<Time> deadline,
                                Time period) {
  (void)now;
  Time reduced = delta;

  // Walk backwards from the item right before the deadline.
  std::ptrdiff_t idx = -1;
  if (deadline) {
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (items_[i].time < *deadline) idx = static_cast<std::ptrdiff_t>(i);
  }
  while (reduced > 0 && idx >= 0) {
    if (idx == 0 && usage_ > 0) {
      if (items_[0].amount - usage_ > reduced) {
        items_[0].amount -= reduced;
        reduced = 0;
      } else {
        reduced -= items_[0].amount - usage_;
        ReplenishmentItem repost{items_[0].time + period, usage_};
        items_.erase(items_.begin());
        insert_sorted(repost);
        usage_ = 0;
      }
      idx = -1;
    } else {
      if (items_[static_cast<std::size_t>(idx)].amount <= reduced) {
        reduced -= items_[static_cast<std::size_t>(idx)].amount;
        items_.erase(items_.begin() + idx);
        --idx;
      } else {
        items_[static_cast<std::size_t>(idx)].amount -= reduced;
        reduced = 0;
      }
    }
  }

  // Whatever is left comes off the end of the list. The head can only be
  // stripped down to what the current burst already consumed.
  while (reduced > 0 && !items_.empty()) {
    auto& last = items_.back();
    const Time floor_amount = items_.size() == 1 ? usage_ : 0;
    const Time strippable = last.amount - floor_amount;
    if (strippable <= 0) break;
    if (strippable <= reduced) {
      reduced -= strippable;
      if (floor_amount == 0)
        items_.pop_back();
      else
        last.amount = floor_amount;
    } else {
      last.amount -= reduced;
      reduced = 0;
    }
  }
}

Time pibs_next_replenishment(Time start, Time consumed, const Util& util) {
  if (!(Util(0) < util)) throw std::invalid_argument("utilization must be positive");
  return start + (Rat(consumed) / util).ceil();
}

}  // namespace mcsio
