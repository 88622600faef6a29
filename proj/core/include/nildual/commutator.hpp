#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nildual/algebra.hpp"
#include "nildual/clone.hpp"

namespace nildual {

enum class CommutatorMethod {
  // Congruence generated by (f(b), f(o)) for k-ary polynomials f absorbing
  // at o (f(x) = f(o) whenever some x_i = o_i) and b_i alpha_i o_i.
  AbsorbingGeneration,
  // Congruence generated by (c(a, o), o) for (k+1)-ary commutator
  // polynomials c and a_i alpha_i o. Only valid for nilpotent algebras.
  NilpotentT,
};

std::string to_string(CommutatorMethod method);

// A commutator value together with whether it is exact. Inexact values
// come from a truncated polynomial enumeration and are lower bounds.
struct CommutatorBound {
  Partition value;
  bool exact;
};

inline constexpr int kDefaultSupernilpotenceCap = 4;

struct NilpotenceReport {
  // series[n] = (1,1]^n. Entries are lower bounds when series_exact is false.
  std::vector<Partition> series;
  bool series_exact = true;
  // "nilpotent", "not nilpotent" or "inconclusive".
  std::string status;
  std::optional<int> nilpotency_class;
  // "degree", "not nilpotent", "exceeds cap" or "inconclusive".
  std::string supernilpotence_status;
  std::optional<int> supernilpotence_degree;
  int series_cap = 0;
  int supernilpotence_cap = 0;
  std::size_t budget = 0;
};

struct NonabelianWitness {
  Partition alpha;
  Partition gamma;  // [alpha, alpha]
  int k;            // least k with [alpha,...,alpha]_{k+1} = 0
};

// Caches polynomial clone slices of one algebra; every query of the
// commutator lab goes through one of these.
class CommutatorLab {
 public:
  explicit CommutatorLab(const FiniteAlgebra& alg, std::size_t budget = kDefaultCloneBudget);

  const FiniteAlgebra& algebra() const { return alg_; }
  std::size_t budget() const { return budget_; }

  // Exact commutator. Throws BudgetExceeded if Pol_k (or Pol_{k+1} for
  // NilpotentT) does not fit the budget, PreconditionError if NilpotentT
  // is asked of a non-nilpotent algebra or the arguments are not
  // congruences, or fewer than two are given.
  Partition higher_commutator(std::span<const Partition> alphas, CommutatorMethod method);

  // Absorbing generation over as much of Pol_k as fits the budget.
  CommutatorBound commutator_bound(std::span<const Partition> alphas);

  // All congruences: joins of principal congruences, equality first,
  // then by decreasing block count and rep array.
  std::vector<Partition> congruence_lattice();

  NilpotenceReport lower_central_series(int cap, int supernilpotence_cap = kDefaultSupernilpotenceCap);

  // true iff the series reaches equality. Throws BudgetExceeded when it
  // cannot be decided within the budget.
  bool is_nilpotent();

  // [alpha, 1] = 0.
  bool centrality_check(const Partition& alpha);

  // Throws Error when the minimal non-abelian congruence is not
  // supernilpotent within `cap`.
  std::optional<NonabelianWitness> minimal_nonabelian_below(
      const Partition& beta, int cap = kDefaultSupernilpotenceCap);

 private:
  const ClonePrefix& polynomials(int k);
  void check_args(std::span<const Partition> alphas) const;

  const FiniteAlgebra& alg_;
  std::size_t budget_;
  std::map<int, ClonePrefix> pol_;
  std::optional<bool> nilpotent_;
  std::optional<std::vector<Partition>> lattice_;
};

// Single-shot wrappers that build a fresh CommutatorLab.
Partition higher_commutator(const FiniteAlgebra& alg, std::span<const Partition> alphas,
                            CommutatorMethod method, std::size_t budget = kDefaultCloneBudget);
NilpotenceReport lower_central_series(const FiniteAlgebra& alg, int cap,
                                      int supernilpotence_cap = kDefaultSupernilpotenceCap,
                                      std::size_t budget = kDefaultCloneBudget);
bool centrality_check(const FiniteAlgebra& alg, const Partition& alpha,
                      std::size_t budget = kDefaultCloneBudget);
std::optional<NonabelianWitness> minimal_nonabelian_below(
    const FiniteAlgebra& alg, const Partition& beta, int cap = kDefaultSupernilpotenceCap,
    std::size_t budget = kDefaultCloneBudget);

}  // namespace nildual
