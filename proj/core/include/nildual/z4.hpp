#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nildual/algebra.hpp"
#include "nildual/cad.hpp"

namespace nildual {

// (Z4, +, 1, 2x1x2, ..., 2x1...xm): the arity-m truncation of the algebra
// with all operations 2x1...xj. Operation names: "plus", "one", "dbl2"..
// "dblm". Throws PreconditionError for m < 2.
FiniteAlgebra z4_algebra(int m);

// x -> constant + sum lambda_i x_i + sum_{v in cosets} c_v(x), where c_v is
// 2 on the residue class v + 2Z4^k and 0 elsewhere. Coset representatives
// are 0/1 vectors, sorted by code.
struct Z4NormalForm {
  int arity = 0;
  Elem constant = 0;
  std::vector<Elem> lambdas;
  std::vector<std::vector<Elem>> cosets;

  FunctionTable table() const;
  // Algebraic degree over GF(2) of the coset indicator (0 if none).
  int degree() const;
  std::string to_string() const;

  friend bool operator==(const Z4NormalForm&, const Z4NormalForm&) = default;
};

// Normal form of f as a term of the full algebra, or nullopt if f is not
// a term. Requires universe 4.
std::optional<Z4NormalForm> z4_term_normal_form(const FunctionTable& f);

// Every normal form of arity k whose coset indicator has degree at most
// max_degree, i.e. Clo_k of z4_algebra(max_degree) for max_degree >= 2.
std::vector<Z4NormalForm> z4_normal_forms(int k, int max_degree);

// D = shift + (v_1 + U) ∪ ... ∪ (v_l + U) with U a subgroup of 2Z4^k,
// the v_i in distinct residue classes mod 2Z4^k and 2v_i in U.
struct Z4CadForm {
  int arity = 0;
  std::vector<Elem> shift;            // subtracted so that 0 is in the set
  std::vector<Code> subgroup;         // U, sorted codes
  std::vector<std::vector<Elem>> reps;  // least member of each residue class

  RelationSet members() const;
};

// Decides whether a non-empty D ⊆ Z4^k is c.a.d. over the full algebra.
// The shift is D's least member.
std::optional<Z4CadForm> z4_cad_classify(const RelationSet& d);

// All c.a.d. domains at arity k, built from (U, reps) forms and their
// translates; sorted by size, then member codes.
std::vector<RelationSet> z4_cad_domains(int k);

// Every subuniverse of A^4 (A the full algebra) is preserved by f.
bool z4_preserves_all_sub_A4(const PartialFunction& f);

// Evidence from extending one preserving partial function.
struct Z4Extension {
  Z4NormalForm form;
  bool hom_identity = true;   // f(x+u) = f(x)+f(u)-f(0) on the shifted domain
  bool h_dichotomy = true;    // each h_i is 0 or 2x
  bool agrees = true;         // form restricted to D equals f
};

// Builds a term extending f by the linear-part/coset construction. Requires
// a c.a.d. domain. Throws PreconditionError if no linear map fits f on U.
Z4Extension z4_extend(const PartialFunction& f);

struct Z4DualityReport {
  int arity = 0;
  bool sampled = false;
  std::uint64_t seed = 0;
  std::size_t domains = 0;
  std::size_t domains_checked_against_classify = 0;
  bool domains_match_closure = true;  // form enumeration == cad_enumerate
  std::uint64_t preserving = 0;
  std::uint64_t extended = 0;
  std::uint64_t hom_checks = 0;
  std::uint64_t dichotomy_checks = 0;
  std::uint64_t nodes = 0;
  std::uint64_t pruned = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty() && domains_match_closure; }
};

struct Z4VerifyOptions {
  // 0 scans every domain; otherwise this many domains chosen with `seed`.
  std::size_t sample = 0;
  std::uint64_t seed = 1;
  std::size_t clone_budget = kDefaultCloneBudget;
};

// For every c.a.d. domain D ⊆ Z4^k, enumerates the partial functions on D
// preserving all subuniverses of A^4 and checks that each extends to a
// term, together with the additivity and h_i identities.
Z4DualityReport z4_verify_duality(int k, const Z4VerifyOptions& options = {});

}  // namespace nildual
