#pragma once

// Slow, direct implementations used to cross-check the library. None of
// these share code paths with core beyond the basic value types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nildual/algebra.hpp"
#include "nildual/function_table.hpp"
#include "nildual/partition.hpp"

#ifndef NILDUAL_DATA_DIR
#error "NILDUAL_DATA_DIR must point at data/algebras"
#endif

namespace oracle {

using nildual::Elem;
using nildual::FiniteAlgebra;
using nildual::FunctionTable;
using nildual::Partition;
using Vec = std::vector<Elem>;

inline FiniteAlgebra load(const std::string& name) {
  return nildual::load_algebra_file(std::string(NILDUAL_DATA_DIR) + "/" + name + ".json");
}

inline std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Tuple with index `code` in base n, first coordinate least significant.
inline Vec tuple_of(std::size_t code, int n, int k) {
  Vec t(static_cast<std::size_t>(k));
  for (auto& x : t) {
    x = static_cast<Elem>(code % static_cast<std::size_t>(n));
    code /= static_cast<std::size_t>(n);
  }
  return t;
}

inline Elem apply_op(const FunctionTable& op, const Vec& args) {
  std::size_t code = 0;
  for (std::size_t i = args.size(); i-- > 0;) code = code * static_cast<std::size_t>(op.universe()) + args[i];
  return op.values()[code];
}

// Naive fixpoint: apply every operation to every tuple of current members
// until nothing new appears.
inline std::set<Vec> naive_close(const FiniteAlgebra& alg, std::set<Vec> s, std::size_t limit = 1u << 20) {
  if (s.empty()) return s;
  const std::size_t width = s.begin()->size();
  while (true) {
    const std::vector<Vec> cur(s.begin(), s.end());
    std::set<Vec> next = s;
    for (const auto& op : alg.ops()) {
      const int r = op.arity();
      const std::size_t combos = ipow(cur.size(), r);
      for (std::size_t code = 0; code < combos; ++code) {
        std::size_t c = code;
        std::vector<const Vec*> args;
        for (int i = 0; i < r; ++i) {
          args.push_back(&cur[c % cur.size()]);
          c /= cur.size();
        }
        Vec out(width);
        Vec a(static_cast<std::size_t>(r));
        for (std::size_t j = 0; j < width; ++j) {
          for (int i = 0; i < r; ++i) a[static_cast<std::size_t>(i)] = (*args[static_cast<std::size_t>(i)])[j];
          out[j] = apply_op(op.table, a);
        }
        next.insert(std::move(out));
        if (next.size() > limit) return next;
      }
    }
    if (next.size() == s.size()) return s;
    s = std::move(next);
  }
}

// Clo_k (or Pol_k) as the set of value vectors over A^k in code order.
inline std::set<Vec> naive_clone(const FiniteAlgebra& alg, int k, bool polynomial = false) {
  const int n = alg.size();
  const std::size_t width = ipow(static_cast<std::size_t>(n), k);
  std::set<Vec> s;
  for (int i = 0; i < k; ++i) {
    Vec p(width);
    for (std::size_t c = 0; c < width; ++c) p[c] = tuple_of(c, n, k)[static_cast<std::size_t>(i)];
    s.insert(p);
  }
  if (polynomial) {
    for (int a = 0; a < n; ++a) s.insert(Vec(width, static_cast<Elem>(a)));
  }
  return naive_close(alg, s);
}

inline bool is_compatible(const FiniteAlgebra& alg, const std::vector<int>& label) {
  const int n = alg.size();
  for (const auto& op : alg.ops()) {
    const int r = op.arity();
    const std::size_t total = ipow(static_cast<std::size_t>(n), r);
    for (std::size_t x = 0; x < total; ++x) {
      for (std::size_t y = 0; y < total; ++y) {
        const Vec a = tuple_of(x, n, r), b = tuple_of(y, n, r);
        bool rel = true;
        for (int i = 0; i < r; ++i) rel = rel && label[a[static_cast<std::size_t>(i)]] == label[b[static_cast<std::size_t>(i)]];
        if (rel && label[apply_op(op.table, a)] != label[apply_op(op.table, b)]) return false;
      }
    }
  }
  return true;
}

// Every equivalence relation on n points as restricted growth strings.
inline std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int maxv) {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (int v = 0; v <= maxv + 1; ++v) {
      rgs[static_cast<std::size_t>(i)] = v;
      rec(i + 1, std::max(maxv, v));
    }
  };
  if (n > 0) {
    rgs[0] = 0;
    rec(1, 0);
  }
  return out;
}

inline Partition partition_of(const std::vector<int>& label) { return Partition::from_labels(label); }

// All congruences, by checking every partition.
inline std::vector<Partition> brute_congruences(const FiniteAlgebra& alg) {
  std::vector<Partition> out;
  for (const auto& l : all_partitions(alg.size())) {
    if (is_compatible(alg, l)) out.push_back(partition_of(l));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Least congruence containing the pairs: meet of all congruences above them.
inline Partition brute_cg(const FiniteAlgebra& alg, const std::vector<std::pair<Elem, Elem>>& pairs) {
  Partition best = Partition::total(alg.size());
  for (const auto& c : brute_congruences(alg)) {
    bool ok = true;
    for (auto [a, b] : pairs) ok = ok && c.related(a, b);
    if (ok) best = best.meet(c);
  }
  return best;
}

// For a group given by `mul` (binary) and normal subgroups M, N as the
// identity classes of congruences: the congruence of [M, N].
inline Partition group_commutator(const FunctionTable& mul, const FunctionTable& inv, Elem identity,
                                  const Partition& alpha, const Partition& beta) {
  const int n = mul.universe();
  auto m = [&](Elem x, Elem y) { return apply_op(mul, {x, y}); };
  auto i = [&](Elem x) { return apply_op(inv, {x}); };
  std::set<Elem> h = {identity};
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (!alpha.related(static_cast<Elem>(x), identity) || !beta.related(static_cast<Elem>(y), identity)) continue;
      const Elem X = static_cast<Elem>(x), Y = static_cast<Elem>(y);
      h.insert(m(m(X, Y), m(i(X), i(Y))));
    }
  }
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<Elem> cur(h.begin(), h.end());
    for (Elem a : cur)
      for (Elem b : cur) grew = h.insert(m(a, b)).second || grew;
  }
  // Cosets x H.
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int x = 0; x < n; ++x) {
    if (label[static_cast<std::size_t>(x)] >= 0) continue;
    for (Elem e : h) label[m(static_cast<Elem>(x), e)] = next;
    ++next;
  }
  return Partition::from_labels(label);
}

// The commutator by absorbing polynomials, over a naively generated Pol_k:
// pairs (f(b), f(o)) for f absorbing at o, b_i alpha_i o_i.
inline Partition absorbing_commutator(const FiniteAlgebra& alg, const std::vector<Partition>& alphas) {
  const int n = alg.size();
  const int k = static_cast<int>(alphas.size());
  const std::set<Vec> pol = naive_clone(alg, k, true);
  const std::size_t total = ipow(static_cast<std::size_t>(n), k);
  std::vector<std::pair<Elem, Elem>> pairs;
  for (std::size_t oc = 0; oc < total; ++oc) {
    const Vec o = tuple_of(oc, n, k);
    for (const auto& f : pol) {
      const Elem fo = f[oc];
      bool absorbing = true;
      for (std::size_t xc = 0; xc < total && absorbing; ++xc) {
        const Vec x = tuple_of(xc, n, k);
        bool hit = false;
        for (int i = 0; i < k; ++i) hit = hit || x[static_cast<std::size_t>(i)] == o[static_cast<std::size_t>(i)];
        if (hit && f[xc] != fo) absorbing = false;
      }
      if (!absorbing) continue;
      for (std::size_t bc = 0; bc < total; ++bc) {
        const Vec b = tuple_of(bc, n, k);
        bool in_box = true;
        for (int i = 0; i < k; ++i)
          in_box = in_box && alphas[static_cast<std::size_t>(i)].related(b[static_cast<std::size_t>(i)], o[static_cast<std::size_t>(i)]);
        if (in_box && f[bc] != fo) pairs.emplace_back(f[bc], fo);
      }
    }
  }
  return brute_cg(alg, pairs);
}

// Number of k-ary normal forms c + sum l_i x_i + 2 q(x mod 2) with q a sum
// of squarefree monomials of degree 2..m: 4 * 4^k * 2^(#monomials).
inline std::size_t z4_form_count(int k, int m) {
  std::size_t monomials = 0;
  std::size_t binom = 1;  // C(k, d)
  for (int d = 1; d <= k; ++d) {
    binom = binom * static_cast<std::size_t>(k - d + 1) / static_cast<std::size_t>(d);
    if (d >= 2 && d <= m) monomials += binom;
  }
  return 4 * ipow(4, k) * (std::size_t{1} << monomials);
}

// c.a.d. sets as Galois-closed subsets: D is the solution set of a
// conjunction of equations over `terms` iff D equals the intersection of
// all single-equation solution sets containing it. Sets are bitmasks over
// A^k (needs |A|^k <= 64).
inline std::set<std::uint64_t> galois_cad_family(const std::vector<Vec>& terms, std::size_t points) {
  std::set<std::uint64_t> eqs;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i; j < terms.size(); ++j) {
      std::uint64_t m = 0;
      for (std::size_t p = 0; p < points; ++p)
        if (terms[i][p] == terms[j][p]) m |= std::uint64_t{1} << p;
      eqs.insert(m);
    }
  }
  std::set<std::uint64_t> out;
  const std::uint64_t full = points == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << points) - 1;
  for (std::uint64_t d = 1; d <= full && d != 0; ++d) {
    std::uint64_t closure = full;
    for (auto e : eqs)
      if ((e & d) == d) closure &= e;
    if (closure == d) out.insert(d);
    if (d == full) break;
  }
  return out;
}

}  // namespace oracle
