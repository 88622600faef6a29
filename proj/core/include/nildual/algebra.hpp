#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nildual/function_table.hpp"
#include "nildual/partition.hpp"
#include "nildual/relation.hpp"

namespace nildual {

struct Operation {
  std::string name;
  FunctionTable table;

  int arity() const { return table.arity(); }
};

// A finite algebra given by operation tables. Nullary operations are not
// allowed; constants are unary constant operations.
class FiniteAlgebra {
 public:
  FiniteAlgebra(int size, std::vector<Operation> ops);

  int size() const { return size_; }
  std::span<const Operation> ops() const { return ops_; }
  // Throws InputError if no operation has that name.
  const Operation& op(std::string_view name) const;

 private:
  int size_;
  std::vector<Operation> ops_;
};

// Parses the JSON algebra format:
//   {"size": 4, "ops": [{"name": "plus", "arity": 2, "table": [...]}, ...]}
FiniteAlgebra load_algebra(std::string_view text);
FiniteAlgebra load_algebra_file(const std::string& path);
std::string dump_algebra(const FiniteAlgebra& alg);

// Applies f coordinatewise to k tuples of equal length n.
std::vector<Elem> apply_pointwise(const FunctionTable& f,
                                  std::span<const std::vector<Elem>> args);

// Least subset of A^n containing gens and closed under every fundamental
// operation applied coordinatewise.
RelationSet subuniverse_generate(const FiniteAlgebra& alg, int n, const RelationSet& gens);

// Least congruence containing the given pairs.
Partition congruence_generate(const FiniteAlgebra& alg,
                              std::span<const std::pair<Elem, Elem>> pairs);

// Exhaustive check that p is compatible with every fundamental operation.
bool is_congruence(const FiniteAlgebra& alg, const Partition& p);

}  // namespace nildual
