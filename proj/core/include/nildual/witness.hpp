#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nildual/algebra.hpp"
#include "nildual/clone.hpp"
#include "nildual/commutator.hpp"

namespace nildual {

enum class WitnessCase { One = 1, Two = 2 };

// Everything the ghost construction needs. Subsets of {1..k} are bitmasks
// (bit i-1 for i), so a coordinate of an element is a tuple of length 2^k.
struct WitnessSetup {
  const FiniteAlgebra* alg = nullptr;
  Partition alpha;
  Partition gamma;
  int k = 0;
  FunctionTable f;            // commutator of arity k+1
  std::vector<Elem> a;        // a_1..a_k
  Elem o = 0;
  WitnessCase which = WitnessCase::One;
  bool case_overridden = false;
  FunctionTable m;            // Mal'cev term used for +_o
  int t = 0;                  // 2|B|+1 with B = alg
  int lo = 0;                 // window [lo, hi] of indices
  int hi = 0;

  int width() const { return hi - lo + 1; }
  std::size_t subsets() const { return std::size_t{1} << k; }
};

// Values on the window; outside it every coordinate is the constant o.
struct WitnessElement {
  int lo = 0;
  int hi = 0;
  int k = 0;
  std::vector<Elem> values;  // values[(i - lo) * 2^k + S]

  Elem at(int i, std::uint32_t s, Elem o) const {
    if (i < lo || i > hi) return o;
    return values[static_cast<std::size_t>(i - lo) * (std::size_t{1} << k) + s];
  }
  friend bool operator==(const WitnessElement&, const WitnessElement&) = default;
};

inline int min_window_length(int t) { return 2 * (t + 3) + 2; }

// Picks alpha minimal non-abelian below beta, gamma = [alpha, alpha], the
// supernilpotence degree k, and a commutator f with in-alpha witnesses,
// preferring Case 2 (a witness with a repeated argument, moved to
// positions 1 and 2). `force` overrides the case choice.
WitnessSetup setup_witness(const FiniteAlgebra& alg, const Partition& beta, int lo, int hi,
                           std::optional<WitnessCase> force = std::nullopt,
                           int cap = kDefaultSupernilpotenceCap,
                           std::size_t budget = kDefaultCloneBudget);

struct NamedElement {
  std::string name;
  WitnessElement element;
};

// u_i(S) = a_i if i in S else o.
std::vector<Elem> witness_u(const WitnessSetup& s, int i);

// d_i for every i whose support {i, i+1, i+t+2, i+t+3} fits the window,
// then c_3..c_k, then the constants.
std::vector<NamedElement> build_generators(const WitnessSetup& s);

// d_i; throws PreconditionError when its support leaves the window.
WitnessElement witness_d(const WitnessSetup& s, int i);

// e = f(u_1, ..., u_k, o-bar).
std::vector<Elem> witness_e(const WitnessSetup& s);

// v_{i,j} as the case-dependent signed sum of v_{l,l+1} = f(d_l, d_{l-t-2},
// c_3, ..., c_k, o-bar) in (o/gamma, +_o). Requires i < j and all those
// d's inside the window.
WitnessElement build_v(const WitnessSetup& s, int i, int j);

// Expected shape of v_{i,j}: e at i, -e (Case 1) or (-1)^(j-i-1) e
// (Case 2) at j, o elsewhere.
bool v_has_expected_shape(const WitnessSetup& s, const WitnessElement& v, int i, int j);

// Signed double sum over indices and subsets in (o/gamma, +_o); nullopt
// when some entry is not gamma-related to o.
std::optional<Elem> parity_functional(const WitnessSetup& s, const WitnessElement& w);

// g(0) = e, o elsewhere. Requires 0 in the window.
WitnessElement ghost(const WitnessSetup& s);

struct GhostReport {
  int requested_depth = 0;
  int achieved_depth = 0;
  bool complete = true;          // depth (or fixpoint) reached within budget
  std::size_t budget = 0;
  std::size_t generators = 0;
  std::size_t stored = 0;        // distinct elements materialized
  std::uint64_t streamed = 0;    // final-round results checked without storing
  std::uint64_t applicable = 0;  // elements with all entries gamma-related to o
  std::uint64_t violations = 0;  // applicable elements with nonzero parity
  bool ghost_found = false;
  bool ghost_fails_parity = false;
  std::string claim;
};

// Generates the fragment of D reachable within `depth` rounds of applying
// fundamental operations (depth < 0: to a fixpoint), and checks that no
// element equals the ghost and every applicable element has parity o.
GhostReport verify_ghost_absent(const WitnessSetup& s, int depth,
                                std::size_t budget = kDefaultCloneBudget);

}  // namespace nildual
