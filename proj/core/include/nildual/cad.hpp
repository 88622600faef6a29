#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nildual/algebra.hpp"
#include "nildual/clone.hpp"

namespace nildual {

// A non-empty solution set {x in A^k : f_i(x) = g_i(x) for all i} of term
// equations, with the equations that cut it out.
struct CadDomain {
  int arity = 0;
  RelationSet members;
  std::vector<std::pair<FunctionTable, FunctionTable>> witness;

  // Recomputes the solution set of `witness` and compares with members.
  bool witness_matches() const;
};

inline constexpr std::size_t kDefaultDomainCap = std::size_t{1} << 16;

// All non-empty solution sets of f = g over `slice` (the term clone slice
// at arity k), closed under intersection. Ordered by size, then by member
// codes. Throws BudgetExceeded when more than `cap` sets arise.
std::vector<CadDomain> cad_enumerate(const CloneSlice& slice, std::size_t cap = kDefaultDomainCap);

// True iff for every choice of f.arity() tuples from R whose rows all lie
// in f's domain, the tuple of values lies in R.
bool preserves(const PartialFunction& f, const RelationSet& r);

// True iff f preserves every subuniverse of A^n, decided by checking that
// the value tuple lies in the subuniverse generated by the argument
// tuples, for every choice of at most n domain points as rows.
bool preserves_all_subpowers(const FiniteAlgebra& alg, const PartialFunction& f, int n);

// First member of the slice (in table order) agreeing with f on its domain.
std::optional<FunctionTable> extends_to_term(const PartialFunction& f, const CloneSlice& slice);

// Relations a partial function is tested against: an explicit list, or
// (power > 0) every subuniverse of A^power without materializing them.
struct CandidateSource {
  std::vector<RelationSet> relations;
  int power = 0;

  std::string describe() const;
};

struct ScanStats {
  std::uint64_t nodes = 0;       // partial assignments visited
  std::uint64_t pruned = 0;      // partial assignments rejected by a constraint
  std::uint64_t preserving = 0;  // complete assignments preserving every candidate
};

// Backtracking enumeration of every function D -> A that preserves all
// candidates. Points are assigned in code order, values ascending; each
// constraint is checked as soon as all points it mentions are assigned.
// For `power` n, the constraint on a set S of at most n points is that the
// values on S agree with some member of `slice` on S; this is the same as
// lying in the subuniverse of A^|S| generated by the argument rows.
class PreservationScanner {
 public:
  PreservationScanner(const FiniteAlgebra& alg, const RelationSet& domain, const CloneSlice& slice,
                      const CandidateSource& candidates);

  // Calls visit on each preserving function; stops early when visit
  // returns false.
  ScanStats scan(const std::function<bool(const PartialFunction&)>& visit);

 private:
  struct Constraint {
    std::vector<std::uint32_t> points;  // domain indices, ascending
    const std::vector<Code>* allowed;   // sorted value-tuple codes
  };
  bool satisfied(const Constraint& c, const std::vector<Elem>& values) const;

  int universe_;
  RelationSet domain_;
  std::vector<std::vector<Constraint>> by_trigger_;
  std::vector<std::vector<Code>> allowed_store_;
};

struct ArityStats {
  int arity = 0;
  std::size_t domains = 0;
  std::uint64_t nodes = 0;
  std::uint64_t pruned = 0;
  std::uint64_t preserving = 0;
};

struct RelatednessVerdict {
  // "certified" (up to scanned_arity), "counterexample" or "inconclusive".
  std::string status;
  int scanned_arity = 0;
  std::optional<PartialFunction> counterexample;
  std::string evidence;
  std::vector<ArityStats> per_arity;
};

struct ScanOptions {
  std::size_t clone_budget = kDefaultCloneBudget;
  std::size_t domain_cap = kDefaultDomainCap;
  bool shrink = true;
};

// For every arity k <= max_arity and every c.a.d. domain at arity k,
// searches for a partial function preserving all candidates that is not
// the restriction of a term.
RelatednessVerdict finite_relatedness_scan(const FiniteAlgebra& alg,
                                           const CandidateSource& candidates, int max_arity,
                                           const ScanOptions& options = {});

}  // namespace nildual
