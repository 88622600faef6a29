#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nildual/tuple_code.hpp"

namespace nildual {

// A set of n-tuples over a universe, stored as sorted unique codes.
class RelationSet {
 public:
  RelationSet() = default;
  RelationSet(int universe, int arity, std::vector<Code> members, bool subuniverse = false);

  static RelationSet full(int universe, int arity);
  static RelationSet from_tuples(int universe, int arity,
                                 const std::vector<std::vector<Elem>>& tuples);

  int universe() const { return universe_; }
  int arity() const { return arity_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::span<const Code> members() const { return members_; }
  bool contains(Code code) const;
  bool contains(std::span<const Elem> tuple) const { return contains(encode(tuple, universe_)); }
  std::vector<Elem> tuple(std::size_t index) const {
    return decode(members_[index], arity_, universe_);
  }

  // Set by subuniverse_generate; asserts closure under the generating algebra.
  bool is_subuniverse() const { return subuniverse_; }

  friend bool operator==(const RelationSet& a, const RelationSet& b) {
    return a.universe_ == b.universe_ && a.arity_ == b.arity_ && a.members_ == b.members_;
  }

 private:
  int universe_ = 0;
  int arity_ = 0;
  std::vector<Code> members_;
  bool subuniverse_ = false;
};

// A partial operation f: D -> A with non-empty domain D ⊆ A^k.
class PartialFunction {
 public:
  // values[i] is the image of domain.members()[i].
  PartialFunction(RelationSet domain, std::vector<Elem> values);

  int universe() const { return domain_.universe(); }
  int arity() const { return domain_.arity(); }
  const RelationSet& domain() const { return domain_; }
  std::span<const Elem> values() const { return values_; }
  std::optional<Elem> at(Code code) const;
  std::optional<Elem> at(std::span<const Elem> args) const {
    return at(encode(args, universe()));
  }

  friend bool operator==(const PartialFunction&, const PartialFunction&) = default;

 private:
  RelationSet domain_;
  std::vector<Elem> values_;
};

std::string to_string(const RelationSet& r);
std::string to_string(const PartialFunction& f);

}  // namespace nildual
