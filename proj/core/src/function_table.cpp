#include "nildual/function_table.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "nildual/error.hpp"

namespace nildual {

FunctionTable::FunctionTable(int universe, int arity, std::vector<Elem> values)
    : universe_(universe), arity_(arity), values_(std::move(values)) {
  if (universe < 1 || universe > kMaxUniverse) {
    throw InputError("universe size " + std::to_string(universe) + " out of range");
  }
  if (arity < 0) {
    throw InputError("negative arity");
  }
  if (values_.size() != checked_pow(universe, arity)) {
    throw InputError("table length mismatch: expected " +
                     std::to_string(checked_pow(universe, arity)) + ", got " +
                     std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] >= universe) {
      throw InputError("out-of-range entry " + std::to_string(values_[i]) + " at index " +
                       std::to_string(i));
    }
  }
}

FunctionTable FunctionTable::projection(int universe, int arity, int index) {
  return from_fn(universe, arity, [index](std::span<const Elem> t) { return t[index]; });
}

FunctionTable FunctionTable::constant(int universe, int arity, Elem value) {
  return FunctionTable(universe, arity,
                       std::vector<Elem>(static_cast<std::size_t>(checked_pow(universe, arity)), value));
}

bool FunctionTable::ignores(int index) const {
  const Code stride = checked_pow(universe_, index);
  for (Code c = 0; c < values_.size(); ++c) {
    const Code digit = (c / stride) % universe_;
    if (digit != 0) {
      continue;
    }
    for (Code d = 1; d < static_cast<Code>(universe_); ++d) {
      if (values_[c + d * stride] != values_[c]) {
        return false;
      }
    }
  }
  return true;
}

std::strong_ordering operator<=>(const FunctionTable& a, const FunctionTable& b) {
  if (auto c = a.universe_ <=> b.universe_; c != 0) return c;
  if (auto c = a.arity_ <=> b.arity_; c != 0) return c;
  return std::lexicographical_compare_three_way(a.values_.begin(), a.values_.end(),
                                                b.values_.begin(), b.values_.end());
}

std::size_t hash_bytes(std::span<const Elem> bytes) {
  // FNV-1a over 8-byte words, then a final avalanche.
  std::uint64_t h = 1469598103934665603ULL;
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    std::uint64_t w;
    std::memcpy(&w, bytes.data() + i, 8);
    h = (h ^ w) * 1099511628211ULL;
    h ^= h >> 29;
  }
  for (; i < bytes.size(); ++i) {
    h = (h ^ bytes[i]) * 1099511628211ULL;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

std::string to_string(const FunctionTable& f) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << (i ? "," : "") << static_cast<int>(f.values()[i]);
  }
  os << "]";
  return os.str();
}

}  // namespace nildual
