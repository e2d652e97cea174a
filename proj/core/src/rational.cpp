#include "mcsio/rational.hpp"

#include <cstdlib>

namespace mcsio {

namespace {

int128 abs128(int128 v) { return v < 0 ? -v : v; }

int128 gcd128(int128 a, int128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int128 floor_div128(int128 num, int128 den) {
  // den > 0
  int128 q = num / den;
  if (num % den != 0 && num < 0) --q;
  return q;
}

int128 ceil_div128(int128 num, int128 den) {
  int128 q = num / den;
  if (num % den != 0 && num > 0) ++q;
  return q;
}

}  // namespace

Time ceil_div(Time num, Time den) {
  if (den <= 0) throw std::invalid_argument("ceil_div: non-positive denominator");
  return static_cast<Time>(ceil_div128(num, den));
}

Time lcm_clamped(Time a, Time b, Time limit) {
  int128 g = gcd128(a, b);
  int128 l = (static_cast<int128>(a) / g) * b;
  if (l > limit) throw std::overflow_error("lcm exceeds configured limit");
  return static_cast<Time>(l);
}

Rat::Rat(Time num, Time den) : num_(num), den_(den) {
  if (den == 0) throw std::invalid_argument("Rat: zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  int128 g = gcd128(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

Rat::Rat(int128 num, int128 den, bool) : num_(num), den_(den) {}

Rat Rat::of(int128 num, int128 den) {
  if (den == 0) throw std::invalid_argument("Rat: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rat(num, den, true);
}

Time Rat::ceil() const { return static_cast<Time>(ceil_div128(num_, den_)); }
Time Rat::floor() const { return static_cast<Time>(floor_div128(num_, den_)); }

double Rat::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

Rat Rat::operator+(const Rat& o) const {
  return of(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rat Rat::operator-(const Rat& o) const {
  return of(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rat Rat::operator*(const Rat& o) const {
  return of(num_ * o.num_, den_ * o.den_);
}

Rat Rat::operator/(const Rat& o) const {
  if (o.num_ == 0) throw std::invalid_argument("Rat: division by zero");
  return of(num_ * o.den_, den_ * o.num_);
}

bool Rat::operator<(const Rat& o) const {
  return num_ * o.den_ < o.num_ * den_;
}

bool Rat::operator<=(const Rat& o) const {
  return num_ * o.den_ <= o.num_ * den_;
}

Util parse_util(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Rat(static_cast<Time>(std::stoll(text)));
    }
    Time p = std::stoll(text.substr(0, slash));
    Time q = std::stoll(text.substr(slash + 1));
    return Rat(p, q);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad utilization literal: " + text);
  }
}

std::string format_util(const Util& u) {
  auto to_string128 = [](int128 v) {
    if (v == 0) return std::string("0");
    bool neg = v < 0;
    if (neg) v = -v;
    std::string s;
    while (v > 0) {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    }
    return neg ? "-" + s : s;
  };
  if (u.den() == 1) return to_string128(u.num());
  return to_string128(u.num()) + "/" + to_string128(u.den());
}

Time ceil_mul(Time t, const Rat& u) { return (Rat(t) * u).ceil(); }
Time floor_mul(Time t, const Rat& u) { return (Rat(t) * u).floor(); }

}  // namespace mcsio
