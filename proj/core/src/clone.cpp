#include "nildual/clone.hpp"

#include <algorithm>
#include <bit>
#include <nlohmann/json.hpp>

#include "nildual/closure.hpp"
#include "nildual/error.hpp"

namespace nildual {

std::string to_string(CloneKind kind) { return kind == CloneKind::Term ? "term" : "polynomial"; }

CloneSlice::CloneSlice(int universe, int arity, CloneKind kind, std::vector<FunctionTable> members)
    : universe_(universe), arity_(arity), kind_(kind), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool CloneSlice::contains(const FunctionTable& f) const {
  return std::binary_search(members_.begin(), members_.end(), f);
}

std::string CloneSlice::to_json() const {
  nlohmann::ordered_json doc;
  doc["universe"] = universe_;
  doc["arity"] = arity_;
  doc["kind"] = to_string(kind_);
  doc["count"] = members_.size();
  auto tables = nlohmann::ordered_json::array();
  for (const auto& f : members_) {
    tables.push_back(std::vector<int>(f.values().begin(), f.values().end()));
  }
  doc["tables"] = std::move(tables);
  return doc.dump();
}

ClonePrefix clone_prefix(const FiniteAlgebra& alg, int k, CloneKind kind, std::size_t budget) {
  if (k < 1) throw PreconditionError("clone: arity must be >= 1");
  const int n = alg.size();
  const auto width = static_cast<std::size_t>(checked_pow(n, k));
  std::vector<std::vector<Elem>> seeds;
  for (int i = 0; i < k; ++i) {
    const auto p = FunctionTable::projection(n, k, i);
    seeds.emplace_back(p.values().begin(), p.values().end());
  }
  if (kind == CloneKind::Polynomial) {
    for (int c = 0; c < n; ++c) seeds.emplace_back(width, static_cast<Elem>(c));
  }
  ClosureOptions opts;
  opts.budget = budget;
  const ClosureResult r = close_under(alg, width, seeds, opts);
  std::vector<FunctionTable> members;
  members.reserve(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto e = r.element(i);
    members.emplace_back(n, k, std::vector<Elem>(e.begin(), e.end()));
  }
  return {CloneSlice(n, k, kind, std::move(members)), r.complete};
}

CloneSlice clone_upto(const FiniteAlgebra& alg, int k, CloneKind kind, std::size_t budget) {
  ClonePrefix p = clone_prefix(alg, k, kind, budget);
  if (!p.complete) {
    throw BudgetExceeded("incomplete closure: " + to_string(kind) + " clone at arity " +
                         std::to_string(k) + " exceeds budget of " + std::to_string(budget) +
                         " tables");
  }
  return std::move(p.slice);
}

bool is_malcev(const FunctionTable& m) {
  if (m.arity() != 3) return false;
  const int n = m.universe();
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const auto ex = static_cast<Elem>(x), ey = static_cast<Elem>(y);
      if (m({ex, ey, ey}) != ex || m({ey, ey, ex}) != ex) return false;
    }
  }
  return true;
}

std::optional<FunctionTable> find_malcev(const FiniteAlgebra& alg, std::size_t budget) {
  const CloneSlice clo3 = clone_upto(alg, 3, CloneKind::Term, budget);
  for (const auto& f : clo3.members()) {
    if (is_malcev(f)) return f;
  }
  return std::nullopt;
}

std::optional<CommutatorWitness> commutator_classify(const FunctionTable& f) {
  if (f.arity() < 2) throw PreconditionError("commutator_classify: arity must be >= 2");
  const int n = f.universe();
  const int k = f.arity() - 1;
  std::optional<std::vector<Elem>> witness;
  std::vector<Elem> t(static_cast<std::size_t>(k + 1), 0);
  Code code = 0;
  do {
    const Elem z = t[static_cast<std::size_t>(k)];
    const Elem v = f.at(code);
    const bool absorbs = std::find(t.begin(), t.end() - 1, z) != t.end() - 1;
    if (absorbs) {
      if (v != z) return std::nullopt;
    } else if (v != z && !witness) {
      witness = t;
    }
    ++code;
  } while (next_tuple(t, n));
  return CommutatorWitness{f, witness};
}

FunctionTable translation_inverse(const FiniteAlgebra& alg, const FunctionTable& m,
                                  std::size_t budget) {
  if (!is_malcev(m)) throw PreconditionError("translation_inverse: m is not a Mal'cev operation");
  const int n = alg.size();
  const CloneSlice clo3 = clone_upto(alg, 3, CloneKind::Term, budget);
  for (const auto& f : clo3.members()) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      for (int b = 0; b < n && ok; ++b)
        for (int c = 0; c < n && ok; ++c) {
          const auto ex = static_cast<Elem>(x), eb = static_cast<Elem>(b), ec = static_cast<Elem>(c);
          ok = m({f({ex, eb, ec}), eb, ec}) == ex && f({m({ex, eb, ec}), eb, ec}) == ex;
        }
    if (ok) return f;
  }
  throw InternalError(
      "translation_inverse: no inverse in Clo_3 (algebra is not nilpotent or budget too small)");
}

std::vector<SubsetMask> default_subset_order(int k) {
  std::vector<SubsetMask> out;
  for (SubsetMask s = 1; s < (SubsetMask{1} << k); ++s) out.push_back(s);
  std::sort(out.begin(), out.end(), [](SubsetMask a, SubsetMask b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    // Lexicographic on ascending element lists: the lowest differing bit
    // decides, and the set containing it comes first.
    const SubsetMask diff = a ^ b;
    const SubsetMask low = diff & (~diff + 1);
    return (a & low) != 0;
  });
  return out;
}

namespace {

// Pointwise algebra on (k+1)-ary tables whose last argument is z.
class ZCalculus {
 public:
  ZCalculus(const FunctionTable& m, int k)
      : m_(m), n_(m.universe()), k_(k), z_(FunctionTable::projection(m.universe(), k + 1, k)) {}

  const FunctionTable& zero() const { return z_; }

  FunctionTable malcev(const FunctionTable& a, const FunctionTable& b, const FunctionTable& c) const {
    std::vector<Elem> v(a.size());
    for (Code i = 0; i < v.size(); ++i) v[i] = m_({a.at(i), b.at(i), c.at(i)});
    return FunctionTable(n_, k_ + 1, std::move(v));
  }
  FunctionTable plus(const FunctionTable& a, const FunctionTable& b) const { return malcev(a, z_, b); }
  FunctionTable minus(const FunctionTable& a) const { return malcev(z_, a, z_); }

  // (f o delta_T)(x, z): arguments outside T replaced by z.
  FunctionTable restrict_to(const FunctionTable& f, SubsetMask keep) const {
    return FunctionTable::from_fn(n_, k_ + 1, [&](std::span<const Elem> t) {
      std::vector<Elem> u(t.begin(), t.end());
      for (int i = 0; i < k_; ++i) {
        if (!(keep >> i & 1)) u[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(k_)];
      }
      return f(u);
    });
  }

  // y with m(p, z, y) = target, pointwise; throws if z-translations are not bijective.
  FunctionTable solve_right(const FunctionTable& p, const FunctionTable& target) const {
    return FunctionTable::from_fn(n_, k_ + 1, [&](std::span<const Elem> t) {
      const Code i = encode(t, n_);
      const Elem z = t[static_cast<std::size_t>(k_)];
      int found = -1;
      for (int y = 0; y < n_; ++y) {
        if (m_({p.at(i), z, static_cast<Elem>(y)}) == target.at(i)) {
          if (found >= 0) throw InternalError("decompose: translation y -> m(a,z,y) is not injective");
          found = y;
        }
      }
      if (found < 0) throw InternalError("decompose: translation y -> m(a,z,y) is not surjective");
      return found;
    });
  }

  // Splits e (with e(z..z,z) = z, depending only on x_K) into d_S,
  // S ⊆ K non-empty, along the alternating-sum induction.
  std::map<SubsetMask, FunctionTable> split(const FunctionTable& e, SubsetMask K) const {
    std::map<SubsetMask, FunctionTable> out;
    if (std::popcount(K) == 1) {
      out.emplace(K, e);
      return out;
    }
    FunctionTable cur = e;
    for (int j = 0; j < k_; ++j) {
      if (K >> j & 1) cur = malcev(cur, restrict_to(cur, ~(SubsetMask{1} << j)), z_);
    }
    out.emplace(K, cur);
    const int size_k = std::popcount(K);
    std::map<SubsetMask, FunctionTable> acc;
    for (SubsetMask T = (K - 1) & K; T != 0; T = (T - 1) & K) {
      const auto parts = split(restrict_to(e, T), T);
      const bool negative = (size_k + 1 - std::popcount(T)) % 2 != 0;
      for (const auto& [S, d] : parts) {
        auto it = acc.try_emplace(S, z_).first;
        it->second = plus(it->second, negative ? minus(d) : d);
      }
    }
    for (auto& [S, d] : acc) out.emplace(S, std::move(d));
    return out;
  }

  // Extracts c(x_S, z) of arity |S|+1 from a (k+1)-ary table ignoring x outside S.
  FunctionTable shrink(const FunctionTable& f, SubsetMask S) const {
    const int s = std::popcount(S);
    for (int i = 0; i < k_; ++i) {
      if (!(S >> i & 1) && !f.ignores(i)) {
        throw InternalError("decompose: summand depends on a variable outside its index set");
      }
    }
    return FunctionTable::from_fn(n_, s + 1, [&](std::span<const Elem> t) {
      std::vector<Elem> u(static_cast<std::size_t>(k_ + 1), t[static_cast<std::size_t>(s)]);
      for (int i = 0, r = 0; i < k_; ++i) {
        if (S >> i & 1) u[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(r++)];
      }
      return f(u);
    });
  }

 private:
  const FunctionTable& m_;
  int n_;
  int k_;
  FunctionTable z_;
};

}  // namespace

std::map<SubsetMask, FunctionTable> decompose_commutator_sum(const FunctionTable& m,
                                                             const FunctionTable& f,
                                                             std::span<const SubsetMask> order,
                                                             int max_rounds) {
  if (!is_malcev(m)) throw PreconditionError("decompose: m is not a Mal'cev operation");
  const int k = f.arity() - 1;
  if (k < 1) throw PreconditionError("decompose: f must have arity >= 2");
  if (f.universe() != m.universe()) throw PreconditionError("decompose: universe mismatch");
  {
    std::vector<SubsetMask> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<SubsetMask> all;
    for (SubsetMask s = 1; s < (SubsetMask{1} << k); ++s) all.push_back(s);
    if (sorted != all) throw PreconditionError("decompose: order must list every non-empty subset once");
  }
  const ZCalculus calc(m, k);
  const FunctionTable diagonal = calc.restrict_to(f, 0);
  const SubsetMask full = (SubsetMask{1} << k) - 1;

  std::map<SubsetMask, FunctionTable> parts;
  for (SubsetMask s : order) parts.emplace(s, calc.zero());

  for (int round = 0; round <= max_rounds; ++round) {
    FunctionTable sum = diagonal;
    for (SubsetMask s : order) sum = calc.plus(sum, parts.at(s));
    const FunctionTable rest = calc.solve_right(sum, f);
    if (rest == calc.zero()) {
      std::map<SubsetMask, FunctionTable> out;
      for (const auto& [s, c] : parts) {
        FunctionTable small = calc.shrink(c, s);
        const auto w = commutator_classify(small);
        if (!w) throw InternalError("decompose: summand is not a commutator");
        out.emplace(s, std::move(small));
      }
      return out;
    }
    for (auto& [s, d] : calc.split(rest, full)) {
      auto& c = parts.at(s);
      c = calc.plus(c, d);
    }
  }
  throw InternalError("decompose: remainder did not vanish after " + std::to_string(max_rounds) +
                      " rounds (algebra not nilpotent?)");
}

std::map<SubsetMask, FunctionTable> decompose_commutator_sum(const FiniteAlgebra& alg,
                                                             const FunctionTable& f,
                                                             std::span<const SubsetMask> order) {
  const auto m = find_malcev(alg);
  if (!m) throw PreconditionError("decompose: algebra has no Mal'cev term");
  return decompose_commutator_sum(*m, f, order);
}

}  // namespace nildual
