#include "nildual/relation.hpp"

#include <algorithm>
#include <sstream>

#include "nildual/error.hpp"

namespace nildual {

RelationSet::RelationSet(int universe, int arity, std::vector<Code> members, bool subuniverse)
    : universe_(universe), arity_(arity), members_(std::move(members)), subuniverse_(subuniverse) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  const Code limit = checked_pow(universe, arity);
  if (!members_.empty() && members_.back() >= limit) {
    throw InputError("relation member code out of range");
  }
}

RelationSet RelationSet::full(int universe, int arity) {
  std::vector<Code> all(static_cast<std::size_t>(checked_pow(universe, arity)));
  for (Code c = 0; c < all.size(); ++c) all[c] = c;
  return RelationSet(universe, arity, std::move(all));
}

RelationSet RelationSet::from_tuples(int universe, int arity,
                                     const std::vector<std::vector<Elem>>& tuples) {
  std::vector<Code> codes;
  codes.reserve(tuples.size());
  for (const auto& t : tuples) {
    if (static_cast<int>(t.size()) != arity) {
      throw InputError("relation tuple arity mismatch");
    }
    for (Elem x : t) {
      if (x >= universe) throw InputError("relation entry out of range");
    }
    codes.push_back(encode(t, universe));
  }
  return RelationSet(universe, arity, std::move(codes));
}

bool RelationSet::contains(Code code) const {
  return std::binary_search(members_.begin(), members_.end(), code);
}

PartialFunction::PartialFunction(RelationSet domain, std::vector<Elem> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (domain_.empty()) {
    throw InputError("partial function domain must be non-empty");
  }
  if (values_.size() != domain_.size()) {
    throw InputError("partial function value count does not match domain size");
  }
  for (Elem v : values_) {
    if (v >= domain_.universe()) throw InputError("partial function value out of range");
  }
}

std::optional<Elem> PartialFunction::at(Code code) const {
  const auto m = domain_.members();
  auto it = std::lower_bound(m.begin(), m.end(), code);
  if (it == m.end() || *it != code) return std::nullopt;
  return values_[static_cast<std::size_t>(it - m.begin())];
}

namespace {
void write_tuple(std::ostream& os, const std::vector<Elem>& t) {
  os << "(";
  for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << static_cast<int>(t[i]);
  os << ")";
}
}  // namespace

std::string to_string(const RelationSet& r) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i) os << ",";
    write_tuple(os, r.tuple(i));
  }
  os << "}";
  return os.str();
}

std::string to_string(const PartialFunction& f) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < f.domain().size(); ++i) {
    if (i) os << ",";
    write_tuple(os, f.domain().tuple(i));
    os << "->" << static_cast<int>(f.values()[i]);
  }
  os << "}";
  return os.str();
}

}  // namespace nildual
