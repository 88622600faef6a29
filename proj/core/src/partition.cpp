#include "nildual/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "nildual/error.hpp"

namespace nildual {

Partition Partition::from_labels(std::span<const int> labels) {
  Partition p;
  p.rep_.resize(labels.size());
  std::map<int, Elem> first;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    auto [it, inserted] = first.emplace(labels[a], static_cast<Elem>(a));
    p.rep_[a] = it->second;
  }
  return p;
}

Partition Partition::equality(int n) {
  Partition p;
  p.rep_.resize(static_cast<std::size_t>(n));
  std::iota(p.rep_.begin(), p.rep_.end(), Elem{0});
  return p;
}

Partition Partition::total(int n) {
  Partition p;
  p.rep_.assign(static_cast<std::size_t>(n), Elem{0});
  return p;
}

Partition Partition::from_pairs(int n, std::span<const std::pair<Elem, Elem>> pairs) {
  UnionFind uf(n);
  for (auto [a, b] : pairs) {
    uf.unite(a, b);
  }
  return uf.partition();
}

bool Partition::is_equality() const {
  for (std::size_t a = 0; a < rep_.size(); ++a) {
    if (rep_[a] != a) return false;
  }
  return true;
}

bool Partition::is_total() const {
  return std::all_of(rep_.begin(), rep_.end(), [](Elem r) { return r == 0; });
}

int Partition::block_count() const {
  int c = 0;
  for (std::size_t a = 0; a < rep_.size(); ++a) {
    c += rep_[a] == a;
  }
  return c;
}

std::vector<std::vector<Elem>> Partition::blocks() const {
  std::vector<std::vector<Elem>> out;
  std::vector<int> index(rep_.size(), -1);
  for (std::size_t a = 0; a < rep_.size(); ++a) {
    if (rep_[a] == a) {
      index[a] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(index[rep_[a]])].push_back(static_cast<Elem>(a));
  }
  return out;
}

bool Partition::leq(const Partition& other) const {
  for (std::size_t a = 0; a < rep_.size(); ++a) {
    if (!other.related(static_cast<Elem>(a), rep_[a])) return false;
  }
  return true;
}

Partition Partition::join(const Partition& other) const {
  UnionFind uf(universe());
  for (std::size_t a = 0; a < rep_.size(); ++a) {
    uf.unite(static_cast<int>(a), rep_[a]);
    uf.unite(static_cast<int>(a), other.rep_[a]);
  }
  return uf.partition();
}

Partition Partition::meet(const Partition& other) const {
  std::vector<int> labels(rep_.size());
  for (std::size_t a = 0; a < rep_.size(); ++a) {
    labels[a] = rep_[a] * 256 + other.rep_[a];
  }
  return from_labels(labels);
}

std::string to_string(const Partition& p) {
  std::ostringstream os;
  for (const auto& block : p.blocks()) {
    os << "{";
    for (std::size_t i = 0; i < block.size(); ++i) {
      os << (i ? "," : "") << static_cast<int>(block[i]);
    }
    os << "}";
  }
  return os.str();
}

UnionFind::UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int a) {
  while (parent_[a] != a) {
    parent_[a] = parent_[parent_[a]];
    a = parent_[a];
  }
  return a;
}

bool UnionFind::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  // Keep the smaller element as root so labels stay canonical.
  if (b < a) std::swap(a, b);
  parent_[b] = a;
  return true;
}

Partition UnionFind::partition() {
  std::vector<int> labels(parent_.size());
  for (std::size_t a = 0; a < parent_.size(); ++a) {
    labels[a] = find(static_cast<int>(a));
  }
  return Partition::from_labels(labels);
}

}  // namespace nildual
