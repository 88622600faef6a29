#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nildual/algebra.hpp"

namespace nildual {

struct ClosureOptions {
  // Maximum number of elements; reaching it stops the closure.
  std::size_t budget = 1u << 20;
  // Term-depth bound; negative means close to a fixpoint.
  int max_depth = -1;
  // With a depth bound, results of the last round are handed to this
  // visitor instead of being stored (and may repeat earlier elements).
  std::function<void(std::span<const Elem>)> last_round_visitor;
};

// Elements of a closure, stored contiguously in generation order.
struct ClosureResult {
  std::size_t width = 0;
  std::vector<Elem> arena;
  std::vector<int> depth;  // depth[i]: round in which element i appeared
  bool complete = true;    // false iff the budget stopped the run
  int depth_reached = 0;   // last fully completed round
  std::uint64_t streamed = 0;  // results passed to last_round_visitor

  std::size_t size() const { return depth.size(); }
  std::span<const Elem> element(std::size_t i) const {
    return {arena.data() + i * width, width};
  }
};

// Closes `seeds` (vectors of length `width`) under the fundamental
// operations of `alg` applied coordinatewise.
//
// Two reductions keep this tractable on clone-sized inputs:
//  * for each operation and argument position, elements are bucketed by
//    the kernel of that position (values the operation cannot tell apart),
//    and only one element per bucket is tried;
//  * an associative binary operation injective in each argument is only
//    applied with one argument
//    drawn from its generators (elements it did not produce itself); this
//    is exact because every element it produced is a product of those.
//    Disabled when a depth bound is set, since it changes term depth.
ClosureResult close_under(const FiniteAlgebra& alg, std::size_t width,
                          const std::vector<std::vector<Elem>>& seeds,
                          const ClosureOptions& options = {});

// kmap[a] = least b such that t cannot distinguish a and b at `pos`.
std::vector<Elem> position_kernel(const FunctionTable& t, int pos);
bool injective_at(const FunctionTable& t, int pos);

}  // namespace nildual
