#pragma once

#include <compare>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nildual/tuple_code.hpp"

namespace nildual {

// An equivalence relation on {0..n-1} in canonical form: rep[a] is the
// least element of a's block.
class Partition {
 public:
  Partition() = default;
  // Normalizes an arbitrary block-label array into canonical form.
  static Partition from_labels(std::span<const int> labels);
  static Partition equality(int n);
  static Partition total(int n);
  // Least equivalence containing the given pairs.
  static Partition from_pairs(int n, std::span<const std::pair<Elem, Elem>> pairs);

  int universe() const { return static_cast<int>(rep_.size()); }
  Elem rep(Elem a) const { return rep_[a]; }
  std::span<const Elem> reps() const { return rep_; }
  bool related(Elem a, Elem b) const { return rep_[a] == rep_[b]; }

  bool is_equality() const;
  bool is_total() const;
  int block_count() const;
  std::vector<std::vector<Elem>> blocks() const;

  // Refinement order: this <= other iff every block of this lies in a block of other.
  bool leq(const Partition& other) const;
  Partition join(const Partition& other) const;
  Partition meet(const Partition& other) const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  std::vector<Elem> rep_;
};

// e.g. "{0,2}{1,3}"
std::string to_string(const Partition& p);

// Union-find over a small universe; used by congruence generation.
class UnionFind {
 public:
  explicit UnionFind(int n);
  int find(int a);
  // Returns true iff a and b were in different classes.
  bool unite(int a, int b);
  Partition partition();

 private:
  std::vector<int> parent_;
};

}  // namespace nildual
