#include "nildual/witness.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "nildual/closure.hpp"
#include "nildual/error.hpp"

namespace nildual {

namespace {

struct CommutatorHit {
  FunctionTable f;
  std::vector<Elem> a;
  Elem o;
};

// Moves positions i and j of the first k arguments of f to positions 1, 2.
FunctionTable permute_front(const FunctionTable& f, int k, int i, int j) {
  std::vector<int> order;
  order.push_back(i);
  order.push_back(j);
  for (int p = 0; p < k; ++p) {
    if (p != i && p != j) order.push_back(p);
  }
  return FunctionTable::from_fn(f.universe(), k + 1, [&](std::span<const Elem> x) {
    std::vector<Elem> y(static_cast<std::size_t>(k + 1));
    for (int p = 0; p < k; ++p) y[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = x[static_cast<std::size_t>(p)];
    y[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
    return f(y);
  });
}

std::optional<CommutatorHit> find_hit(std::span<const FunctionTable> pol, const Partition& alpha,
                                      int k, bool repeated) {
  const int n = alpha.universe();
  for (const auto& f : pol) {
    if (!commutator_classify(f)) continue;
    std::vector<Elem> x(static_cast<std::size_t>(k + 1), 0);
    Code code = 0;
    do {
      const Elem z = x[static_cast<std::size_t>(k)];
      bool in_alpha = true;
      for (int i = 0; i < k && in_alpha; ++i) in_alpha = alpha.related(x[static_cast<std::size_t>(i)], z);
      if (in_alpha && f.at(code) != z) {
        if (!repeated) {
          return CommutatorHit{f, std::vector<Elem>(x.begin(), x.end() - 1), z};
        }
        for (int i = 0; i < k; ++i) {
          for (int j = i + 1; j < k; ++j) {
            if (x[static_cast<std::size_t>(i)] != x[static_cast<std::size_t>(j)]) continue;
            CommutatorHit h{permute_front(f, k, i, j), {}, z};
            h.a.push_back(x[static_cast<std::size_t>(i)]);
            h.a.push_back(x[static_cast<std::size_t>(j)]);
            for (int p = 0; p < k; ++p) {
              if (p != i && p != j) h.a.push_back(x[static_cast<std::size_t>(p)]);
            }
            return h;
          }
        }
      }
      ++code;
    } while (next_tuple(x, n));
  }
  return std::nullopt;
}

WitnessElement blank(const WitnessSetup& s, Elem fill) {
  return WitnessElement{s.lo, s.hi, s.k,
                        std::vector<Elem>(static_cast<std::size_t>(s.width()) * s.subsets(), fill)};
}

void put(const WitnessSetup& s, WitnessElement& w, int i, std::span<const Elem> coord) {
  std::copy(coord.begin(), coord.end(),
            w.values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(i - s.lo) * s.subsets()));
}

Elem plus_o(const WitnessSetup& s, Elem x, Elem y) { return s.m({x, s.o, y}); }
Elem minus_o(const WitnessSetup& s, Elem x) { return s.m({s.o, x, s.o}); }

// Applies f coordinatewise to k+1 witness elements.
WitnessElement apply_f(const WitnessSetup& s, std::span<const WitnessElement* const> args) {
  WitnessElement out = blank(s, s.o);
  std::vector<Elem> x(args.size());
  for (std::size_t c = 0; c < out.values.size(); ++c) {
    for (std::size_t i = 0; i < args.size(); ++i) x[i] = args[i]->values[c];
    out.values[c] = s.f(x);
  }
  return out;
}

bool fits(const WitnessSetup& s, int i) { return i >= s.lo && i + s.t + 3 <= s.hi; }

}  // namespace

WitnessSetup setup_witness(const FiniteAlgebra& alg, const Partition& beta, int lo, int hi,
                           std::optional<WitnessCase> force, int cap, std::size_t budget) {
  CommutatorLab lab(alg, budget);
  const auto mn = lab.minimal_nonabelian_below(beta, cap);
  if (!mn) throw PreconditionError("no non-abelian congruence below " + to_string(beta));
  WitnessSetup s;
  s.alg = &alg;
  s.alpha = mn->alpha;
  s.gamma = mn->gamma;
  s.k = mn->k;
  s.t = 2 * alg.size() + 1;
  s.lo = lo;
  s.hi = hi;
  if (hi - lo + 1 < min_window_length(s.t)) {
    throw PreconditionError("window [" + std::to_string(lo) + "," + std::to_string(hi) +
                            "] shorter than " + std::to_string(min_window_length(s.t)));
  }
  if (lo > 0 || hi < 0) throw PreconditionError("window must contain index 0");
  const auto m = find_malcev(alg, budget);
  if (!m) throw PreconditionError("algebra has no Mal'cev term");
  s.m = *m;

  const ClonePrefix pol = clone_prefix(alg, s.k + 1, CloneKind::Polynomial, budget);
  if (!pol.complete) throw BudgetExceeded("incomplete closure: Pol_" + std::to_string(s.k + 1));
  std::optional<CommutatorHit> hit;
  if (force != WitnessCase::One) {
    hit = find_hit(pol.slice.members(), s.alpha, s.k, true);
    s.which = WitnessCase::Two;
  }
  if (!hit) {
    if (force == WitnessCase::Two) throw PreconditionError("Case 2 forced but no repeated-argument witness exists");
    hit = find_hit(pol.slice.members(), s.alpha, s.k, false);
    s.which = WitnessCase::One;
  }
  if (!hit) throw InternalError("no commutator witness although [alpha,...,alpha]_k is non-zero");
  s.case_overridden = force.has_value();
  s.f = hit->f;
  s.a = hit->a;
  s.o = hit->o;
  return s;
}

std::vector<Elem> witness_u(const WitnessSetup& s, int i) {
  if (i < 1 || i > s.k) throw PreconditionError("u_i: index out of range");
  std::vector<Elem> u(s.subsets());
  for (std::uint32_t S = 0; S < u.size(); ++S) {
    u[S] = (S >> (i - 1) & 1) ? s.a[static_cast<std::size_t>(i - 1)] : s.o;
  }
  return u;
}

WitnessElement witness_d(const WitnessSetup& s, int i) {
  if (!fits(s, i)) throw PreconditionError("d_" + std::to_string(i) + " does not fit the window");
  WitnessElement d = blank(s, s.o);
  const auto u1 = witness_u(s, 1);
  const auto u2 = witness_u(s, 2);
  put(s, d, i, u1);
  put(s, d, i + 1, u2);
  put(s, d, i + s.t + 2, u2);
  put(s, d, i + s.t + 3, u1);
  return d;
}

std::vector<NamedElement> build_generators(const WitnessSetup& s) {
  std::vector<NamedElement> out;
  for (int i = s.lo; fits(s, i); ++i) out.push_back({"d_" + std::to_string(i), witness_d(s, i)});
  for (int l = 3; l <= s.k; ++l) {
    WitnessElement c = blank(s, s.o);
    const auto u = witness_u(s, l);
    for (int i = s.lo; i <= s.hi; ++i) put(s, c, i, u);
    out.push_back({"c_" + std::to_string(l), std::move(c)});
  }
  for (int a = 0; a < s.alg->size(); ++a) {
    out.push_back({"const_" + std::to_string(a), blank(s, static_cast<Elem>(a))});
  }
  return out;
}

std::vector<Elem> witness_e(const WitnessSetup& s) {
  std::vector<Elem> e(s.subsets());
  std::vector<Elem> x(static_cast<std::size_t>(s.k + 1), s.o);
  std::vector<std::vector<Elem>> u;
  for (int i = 1; i <= s.k; ++i) u.push_back(witness_u(s, i));
  for (std::uint32_t S = 0; S < e.size(); ++S) {
    for (int i = 0; i < s.k; ++i) x[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)][S];
    e[S] = s.f(x);
  }
  return e;
}

WitnessElement build_v(const WitnessSetup& s, int i, int j) {
  if (i >= j) throw PreconditionError("build_v: need i < j");
  std::vector<WitnessElement> cs;
  for (int l = 3; l <= s.k; ++l) {
    WitnessElement c = blank(s, s.o);
    const auto u = witness_u(s, l);
    for (int p = s.lo; p <= s.hi; ++p) put(s, c, p, u);
    cs.push_back(std::move(c));
  }
  const WitnessElement obar = blank(s, s.o);
  WitnessElement acc = blank(s, s.o);
  for (int l = i; l < j; ++l) {
    const WitnessElement dl = witness_d(s, l);
    const WitnessElement dr = witness_d(s, l - s.t - 2);
    std::vector<const WitnessElement*> args{&dl, &dr};
    for (const auto& c : cs) args.push_back(&c);
    args.push_back(&obar);
    const WitnessElement step = apply_f(s, args);
    const bool negate = s.which == WitnessCase::Two && (l - i) % 2 != 0;
    for (std::size_t c = 0; c < acc.values.size(); ++c) {
      const Elem term = negate ? minus_o(s, step.values[c]) : step.values[c];
      acc.values[c] = plus_o(s, acc.values[c], term);
    }
  }
  return acc;
}

bool v_has_expected_shape(const WitnessSetup& s, const WitnessElement& v, int i, int j) {
  const auto e = witness_e(s);
  std::vector<Elem> last(e);
  const bool negate = s.which == WitnessCase::One || (j - i - 1) % 2 != 0;
  if (negate) {
    for (auto& x : last) x = minus_o(s, x);
  }
  for (int p = s.lo; p <= s.hi; ++p) {
    for (std::uint32_t S = 0; S < s.subsets(); ++S) {
      const Elem want = p == i ? e[S] : p == j ? last[S] : s.o;
      if (v.at(p, S, s.o) != want) return false;
    }
  }
  return true;
}

std::optional<Elem> parity_functional(const WitnessSetup& s, const WitnessElement& w) {
  Elem acc = s.o;
  for (int i = w.lo; i <= w.hi; ++i) {
    for (std::uint32_t S = 0; S < s.subsets(); ++S) {
      const Elem x = w.at(i, S, s.o);
      if (!s.gamma.related(x, s.o)) return std::nullopt;
      bool negative = std::popcount(S) % 2 != 0;
      if (s.which == WitnessCase::Two && i % 2 != 0) negative = !negative;
      acc = plus_o(s, acc, negative ? minus_o(s, x) : x);
    }
  }
  return acc;
}

WitnessElement ghost(const WitnessSetup& s) {
  WitnessElement g = blank(s, s.o);
  put(s, g, 0, witness_e(s));
  return g;
}

namespace {

// Final round of a bounded closure, restricted to results whose entries
// are all gamma-related to o (only those can be the ghost or carry a
// parity obligation). gamma is a congruence, so whether op(x_1..x_r) is
// such a result depends only on the gamma-patterns of the x_i; elements
// are grouped by pattern and only pattern tuples mapping into o/gamma are
// expanded. Within a group, elements the operation cannot tell apart at
// that position (same kernel image) are tried once.
template <typename Check>
std::uint64_t final_round(const WitnessSetup& s, const ClosureResult& res, Check&& check) {
  const std::size_t width = res.width;
  const std::size_t count = res.size();
  const int n = s.alg->size();
  std::vector<std::uint32_t> pattern_of(count);
  std::vector<std::vector<Elem>> patterns;
  {
    std::map<std::vector<Elem>, std::uint32_t> ids;
    std::vector<Elem> p(width);
    for (std::size_t i = 0; i < count; ++i) {
      const auto e = res.element(i);
      for (std::size_t c = 0; c < width; ++c) p[c] = s.gamma.rep(e[c]);
      auto [it, inserted] = ids.try_emplace(p, static_cast<std::uint32_t>(patterns.size()));
      if (inserted) patterns.push_back(p);
      pattern_of[i] = it->second;
    }
  }
  std::uint64_t produced = 0;
  std::vector<Elem> out(width);
  for (const auto& op : s.alg->ops()) {
    const int r = op.arity();
    const auto& tab = op.table;
    // Per position: pattern -> representatives distinct under the kernel.
    std::vector<std::vector<std::vector<std::uint32_t>>> reps(static_cast<std::size_t>(r),
        std::vector<std::vector<std::uint32_t>>(patterns.size()));
    for (int pos = 0; pos < r; ++pos) {
      const std::vector<Elem> kmap = position_kernel(tab, pos);
      std::set<std::vector<Elem>> seen;
      std::vector<Elem> img(width);
      for (std::size_t i = 0; i < count; ++i) {
        const auto e = res.element(i);
        for (std::size_t c = 0; c < width; ++c) img[c] = kmap[e[c]];
        if (seen.insert(img).second) reps[static_cast<std::size_t>(pos)][pattern_of[i]].push_back(static_cast<std::uint32_t>(i));
      }
    }
    std::vector<std::size_t> pt(static_cast<std::size_t>(r), 0);
    std::vector<Elem> args(static_cast<std::size_t>(r));
    auto in_o_class = [&](const std::vector<std::size_t>& which) {
      for (std::size_t c = 0; c < width; ++c) {
        for (int i = 0; i < r; ++i) args[static_cast<std::size_t>(i)] = patterns[which[static_cast<std::size_t>(i)]][c];
        if (!s.gamma.related(tab(args), s.o)) return false;
      }
      return true;
    };
    while (true) {
      bool nonempty = true;
      for (int i = 0; i < r; ++i) nonempty = nonempty && !reps[static_cast<std::size_t>(i)][pt[static_cast<std::size_t>(i)]].empty();
      if (nonempty && in_o_class(pt)) {
        std::vector<std::size_t> ix(static_cast<std::size_t>(r), 0);
        while (true) {
          if (r == 2) {
            const auto x = res.element(reps[0][pt[0]][ix[0]]);
            const auto y = res.element(reps[1][pt[1]][ix[1]]);
            const auto vals = tab.values();
            for (std::size_t c = 0; c < width; ++c)
              out[c] = vals[x[c] + static_cast<std::size_t>(n) * y[c]];
          } else {
            for (std::size_t c = 0; c < width; ++c) {
              for (int i = 0; i < r; ++i) {
                const auto& list = reps[static_cast<std::size_t>(i)][pt[static_cast<std::size_t>(i)]];
                args[static_cast<std::size_t>(i)] = res.element(list[ix[static_cast<std::size_t>(i)]])[c];
              }
              out[c] = tab(args);
            }
          }
          ++produced;
          check(std::span<const Elem>(out));
          int i = 0;
          for (; i < r; ++i) {
            if (++ix[static_cast<std::size_t>(i)] < reps[static_cast<std::size_t>(i)][pt[static_cast<std::size_t>(i)]].size()) break;
            ix[static_cast<std::size_t>(i)] = 0;
          }
          if (i == r) break;
        }
      }
      int i = 0;
      for (; i < r; ++i) {
        if (++pt[static_cast<std::size_t>(i)] < patterns.size()) break;
        pt[static_cast<std::size_t>(i)] = 0;
      }
      if (i == r) break;
    }
  }
  return produced;
}

}  // namespace

GhostReport verify_ghost_absent(const WitnessSetup& s, int depth, std::size_t budget) {
  GhostReport r;
  r.requested_depth = depth;
  r.budget = budget;
  const auto gens = build_generators(s);
  r.generators = gens.size();
  const WitnessElement g = ghost(s);
  r.ghost_fails_parity = parity_functional(s, g).value_or(s.o) != s.o;

  const std::size_t width = g.values.size();
  std::vector<std::vector<Elem>> seeds;
  for (const auto& ne : gens) seeds.push_back(ne.element.values);

  // Table-driven parity for the hot loop; entry c contributes x or -_o x.
  const int n = s.alg->size();
  std::vector<Elem> add(static_cast<std::size_t>(n * n)), neg(static_cast<std::size_t>(n));
  std::vector<bool> in_class(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    neg[static_cast<std::size_t>(x)] = minus_o(s, static_cast<Elem>(x));
    in_class[static_cast<std::size_t>(x)] = s.gamma.related(static_cast<Elem>(x), s.o);
    for (int y = 0; y < n; ++y)
      add[static_cast<std::size_t>(x * n + y)] = plus_o(s, static_cast<Elem>(x), static_cast<Elem>(y));
  }
  std::vector<bool> negative(width);
  for (int i = s.lo; i <= s.hi; ++i) {
    for (std::uint32_t S = 0; S < s.subsets(); ++S) {
      bool sign = std::popcount(S) % 2 != 0;
      if (s.which == WitnessCase::Two && i % 2 != 0) sign = !sign;
      negative[static_cast<std::size_t>(i - s.lo) * s.subsets() + S] = sign;
    }
  }
  WitnessElement scratch = blank(s, s.o);
  auto check = [&](std::span<const Elem> v) {
    if (std::equal(v.begin(), v.end(), g.values.begin())) r.ghost_found = true;
    Elem acc = s.o;
    for (std::size_t c = 0; c < width; ++c) {
      if (!in_class[v[c]]) return;
      acc = add[static_cast<std::size_t>(acc) * static_cast<std::size_t>(n) + (negative[c] ? neg[v[c]] : v[c])];
    }
    ++r.applicable;
    if (acc != s.o) ++r.violations;
  };

  // The last round is not stored: rounds up to depth-1 are materialized
  // and the last one is expanded on the fly.
  ClosureOptions opts;
  opts.budget = budget;
  opts.max_depth = depth > 0 ? depth - 1 : depth;
  const ClosureResult res = close_under(*s.alg, width, seeds, opts);
  for (std::size_t i = 0; i < res.size(); ++i) {
    check(res.element(i));
    const auto e = res.element(i);
    std::copy(e.begin(), e.end(), scratch.values.begin());
    const auto p = parity_functional(s, scratch);
    if (p && *p != s.o) ++r.violations;
  }
  r.stored = res.size();
  r.complete = res.complete;
  r.achieved_depth = res.depth_reached;
  if (depth > 0 && res.complete) {
    r.streamed = final_round(s, res, check);
    r.achieved_depth = depth;
  }

  const std::string scope =
      depth < 0 ? std::string("the full closure on the window")
                : "the depth-" + std::to_string(r.achieved_depth) + " closure" +
                      (r.complete ? "" : " (partial: budget reached during the next round)");
  if (r.ghost_found || r.violations > 0) {
    r.claim = "VIOLATION in " + scope;
  } else {
    r.claim = "ghost absent from " + scope + "; parity invariant unviolated";
  }
  return r;
}

}  // namespace nildual
