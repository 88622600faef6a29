#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nildual/tuple_code.hpp"

namespace nildual {

// A total operation A^k -> A stored as a flat value array in tuple-code
// order. Equality is extensional: same universe, arity and values.
class FunctionTable {
 public:
  FunctionTable() = default;
  // Validates length == universe^arity and all entries < universe.
  FunctionTable(int universe, int arity, std::vector<Elem> values);

  static FunctionTable projection(int universe, int arity, int index);
  static FunctionTable constant(int universe, int arity, Elem value);

  template <typename Fn>
  static FunctionTable from_fn(int universe, int arity, Fn&& fn) {
    std::vector<Elem> values;
    values.reserve(static_cast<std::size_t>(checked_pow(universe, arity)));
    for_each_tuple(universe, arity,
                   [&](std::span<const Elem> t) { values.push_back(static_cast<Elem>(fn(t))); });
    return FunctionTable(universe, arity, std::move(values));
  }

  int universe() const { return universe_; }
  int arity() const { return arity_; }
  std::size_t size() const { return values_.size(); }
  std::span<const Elem> values() const { return values_; }

  Elem at(Code code) const { return values_[static_cast<std::size_t>(code)]; }
  Elem operator()(std::span<const Elem> args) const { return at(encode(args, universe_)); }
  Elem operator()(std::initializer_list<Elem> args) const {
    return (*this)(std::span<const Elem>(args.begin(), args.size()));
  }

  // True iff the value ignores argument `index`.
  bool ignores(int index) const;

  friend bool operator==(const FunctionTable&, const FunctionTable&) = default;
  friend std::strong_ordering operator<=>(const FunctionTable& a, const FunctionTable& b);

 private:
  int universe_ = 0;
  int arity_ = 0;
  std::vector<Elem> values_;
};

std::size_t hash_bytes(std::span<const Elem> bytes);

struct FunctionTableHash {
  std::size_t operator()(const FunctionTable& f) const { return hash_bytes(f.values()); }
};

std::string to_string(const FunctionTable& f);

}  // namespace nildual
