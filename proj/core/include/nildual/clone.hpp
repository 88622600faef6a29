#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nildual/algebra.hpp"

namespace nildual {

enum class CloneKind { Term, Polynomial };

std::string to_string(CloneKind kind);

inline constexpr std::size_t kDefaultCloneBudget = std::size_t{1} << 21;

// The k-ary part of the term (or polynomial) clone, sorted by table.
class CloneSlice {
 public:
  CloneSlice(int universe, int arity, CloneKind kind, std::vector<FunctionTable> members);

  int universe() const { return universe_; }
  int arity() const { return arity_; }
  CloneKind kind() const { return kind_; }
  std::size_t size() const { return members_.size(); }
  std::span<const FunctionTable> members() const { return members_; }
  const FunctionTable& operator[](std::size_t i) const { return members_[i]; }
  bool contains(const FunctionTable& f) const;

  // {"universe":n,"arity":k,"kind":"term","count":N,"tables":[[...],...]}
  std::string to_json() const;

 private:
  int universe_;
  int arity_;
  CloneKind kind_;
  std::vector<FunctionTable> members_;
};

// Closure of the k projections (plus all constants for Polynomial) under
// composition with the fundamental operations. Throws BudgetExceeded
// ("incomplete closure") if more than `budget` tables are generated.
CloneSlice clone_upto(const FiniteAlgebra& alg, int k, CloneKind kind,
                      std::size_t budget = kDefaultCloneBudget);

// As clone_upto, but on overflow returns the tables generated so far
// (all genuine members) instead of throwing.
struct ClonePrefix {
  CloneSlice slice;
  bool complete;
};
ClonePrefix clone_prefix(const FiniteAlgebra& alg, int k, CloneKind kind, std::size_t budget);

// m(x,y,y) = x and m(y,y,x) = x for all x, y.
bool is_malcev(const FunctionTable& m);

// First Mal'cev operation of Clo_3 in table order, if any.
std::optional<FunctionTable> find_malcev(const FiniteAlgebra& alg,
                                         std::size_t budget = kDefaultCloneBudget);

// A (k+1)-ary commutator c: c(x_1..x_k, z) = z whenever z is among the x_i.
struct CommutatorWitness {
  FunctionTable f;
  // (a_1..a_k, o) with f(a, o) != o; absent iff f is trivial.
  std::optional<std::vector<Elem>> rank_args;

  bool trivial() const { return !rank_args.has_value(); }
};

// nullopt when f is not a commutator. Requires arity >= 2.
std::optional<CommutatorWitness> commutator_classify(const FunctionTable& f);

// f in Clo_3 with m(f(x,b,c),b,c) = x and f(m(x,b,c),b,c) = x. Throws
// InternalError when no such term exists in Clo_3.
FunctionTable translation_inverse(const FiniteAlgebra& alg, const FunctionTable& m,
                                  std::size_t budget = kDefaultCloneBudget);

// Subsets of {1..k} as bitmasks: bit i-1 set iff i is in the subset.
using SubsetMask = std::uint32_t;

// Non-empty subsets ordered by cardinality, then lexicographically.
std::vector<SubsetMask> default_subset_order(int k);

// Decomposes f(x_1..x_k, z) as
//   f(z,..,z) +_z c_{S_1}(x_{S_1}, z) +_z c_{S_2}(x_{S_2}, z) +_z ...
// with a +_z b := m(a, z, b), summed left to right over `order` (which
// must list every non-empty subset of {1..k} exactly once). Each c_S is a
// commutator of arity |S|+1. The identity is checked on all inputs before
// returning; failure (e.g. a non-nilpotent algebra) throws InternalError.
std::map<SubsetMask, FunctionTable> decompose_commutator_sum(
    const FunctionTable& m, const FunctionTable& f, std::span<const SubsetMask> order,
    int max_rounds = 32);

// Same, with m the first Mal'cev term of alg. Throws PreconditionError if
// alg has no Mal'cev term.
std::map<SubsetMask, FunctionTable> decompose_commutator_sum(
    const FiniteAlgebra& alg, const FunctionTable& f, std::span<const SubsetMask> order);

}  // namespace nildual
