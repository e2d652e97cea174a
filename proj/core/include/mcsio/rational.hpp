#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mcsio {

// Scheduler time in integer ticks (1 tick = 1 us by convention; nothing
// depends on the unit). All analysis arithmetic is exact.
using Time = std::int64_t;

using int128 = __int128;

Time ceil_div(Time num, Time den);
Time lcm_clamped(Time a, Time b, Time limit);

// Exact rational with int128 intermediates, always stored reduced with a
// positive denominator. Large enough for every response-time term this
// library produces (ticks < 2^40, utilization denominators <= 10^9).
class Rat {
 public:
  constexpr Rat() : num_(0), den_(1) {}
  Rat(Time value) : num_(value), den_(1) {}
  Rat(Time num, Time den);

  static Rat of(int128 num, int128 den);

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  Time ceil() const;
  Time floor() const;
  double to_double() const;

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;

  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }

  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const;
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return o <= *this; }

 private:
  Rat(int128 num, int128 den, bool reduced);
  int128 num_;
  int128 den_;
};

// Utilization in (0,1] for primary budgets; 0 is allowed so LO-criticality
// subjects can be switched off in HI mode.
using Util = Rat;

// Parses "p/q" or a plain integer ("0" / "1").
Util parse_util(const std::string& text);
std::string format_util(const Util& u);

// ceil(t * u) computed exactly.
Time ceil_mul(Time t, const Rat& u);
// floor(t * u) computed exactly.
Time floor_mul(Time t, const Rat& u);

}  // namespace mcsio
