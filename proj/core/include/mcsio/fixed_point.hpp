#pragma once

#include <optional>

#include "mcsio/rational.hpp"

namespace mcsio {

// Least-fixed-point iteration for monotone non-decreasing recurrences on
// integer ticks. Seeds at const_term, stops when the value stabilizes, and
// gives up as soon as it exceeds the deadline (absence is the unschedulable
// signal). Terminates because the iterates are a strictly increasing integer
// sequence bounded by the deadline.
template <typename Recurrence>
std::optional<Time> fixed_point(Time const_term, Recurrence&& recurrence,
                                Time deadline) {
  Time r = const_term;
  if (r > deadline) return std::nullopt;
  for (;;) {
    Time next = recurrence(r);
    if (next == r) return r;
    if (next > deadline) return std::nullopt;
    r = next;
  }
}

}  // namespace mcsio
