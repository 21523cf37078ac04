#pragma once

#include <cstdint>
#include <ostream>
#include <string_view>

namespace trilog {

/// Truth value of the three-valued logic. `Wrong` marks a run-time type
/// error and is absorbing for every connective.
enum class Tv : std::uint8_t { True = 0, False = 1, Wrong = 2 };

constexpr Tv tv_and(Tv a, Tv b) {
  if (a == Tv::Wrong || b == Tv::Wrong) return Tv::Wrong;
  return (a == Tv::True && b == Tv::True) ? Tv::True : Tv::False;
}

constexpr Tv tv_or(Tv a, Tv b) {
  if (a == Tv::Wrong || b == Tv::Wrong) return Tv::Wrong;
  return (a == Tv::True || b == Tv::True) ? Tv::True : Tv::False;
}

constexpr Tv tv_not(Tv a) {
  switch (a) {
    case Tv::True: return Tv::False;
    case Tv::False: return Tv::True;
    default: return Tv::Wrong;
  }
}

constexpr Tv tv_implies(Tv a, Tv b) { return tv_or(tv_not(a), b); }

constexpr std::string_view to_string(Tv v) {
  switch (v) {
    case Tv::True: return "true";
    case Tv::False: return "false";
    default: return "wrong";
  }
}

inline std::ostream& operator<<(std::ostream& os, Tv v) {
  return os << to_string(v);
}

constexpr Tv kAllTv[3] = {Tv::True, Tv::False, Tv::Wrong};

}  // namespace trilog
