#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nildual {

// A universe element. Universes have at most 255 elements.
using Elem = std::uint8_t;

// Mixed-radix code of a tuple over a universe, coordinate 0 least
// significant: code(t) = t[0] + n*t[1] + n^2*t[2] + ...
using Code = std::uint64_t;

inline constexpr int kMaxUniverse = 255;

// base^exp; throws InputError if the result does not fit in 62 bits.
Code checked_pow(std::size_t base, std::size_t exp);

Code encode(std::span<const Elem> tuple, int universe);
void decode(Code code, int universe, std::span<Elem> out);
std::vector<Elem> decode(Code code, int arity, int universe);

// Advances `t` to the next tuple in code order. Returns false after the
// last tuple (and resets `t` to all zeros).
inline bool next_tuple(std::span<Elem> t, int universe) {
  for (auto& x : t) {
    if (++x < universe) {
      return true;
    }
    x = 0;
  }
  return false;
}

// Calls fn(tuple) for every tuple of the given arity, in code order.
template <typename Fn>
void for_each_tuple(int universe, int arity, Fn&& fn) {
  std::vector<Elem> t(static_cast<std::size_t>(arity), 0);
  do {
    fn(std::span<const Elem>(t));
  } while (arity > 0 && next_tuple(t, universe));
}

}  // namespace nildual
