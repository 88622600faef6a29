#include "nildual/z4.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "nildual/error.hpp"

namespace nildual {

namespace {

constexpr int kN = 4;

Elem mod4(int x) { return static_cast<Elem>(((x % 4) + 4) % 4); }

// Residue class of x mod 2Z4^k as a bitmask (bit i set iff x_i odd).
std::uint32_t residue(std::span<const Elem> x) {
  std::uint32_t r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r |= static_cast<std::uint32_t>(x[i] & 1) << i;
  return r;
}

std::vector<Elem> mask_vector(std::uint32_t mask, int k) {
  std::vector<Elem> v(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = static_cast<Elem>(mask >> i & 1);
  return v;
}

std::vector<Elem> add(std::span<const Elem> x, std::span<const Elem> y) {
  std::vector<Elem> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = mod4(x[i] + y[i]);
  return z;
}

std::vector<Elem> sub(std::span<const Elem> x, std::span<const Elem> y) {
  std::vector<Elem> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = mod4(x[i] - y[i]);
  return z;
}

Elem dot(std::span<const Elem> l, std::span<const Elem> x) {
  int s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += l[i] * x[i];
  return mod4(s);
}

// Subgroup check for a subset of 2Z4^k given by codes.
bool closed_under_plus(const std::set<Code>& u, int k) {
  for (Code a : u) {
    for (Code b : u) {
      const auto x = decode(a, k, kN);
      const auto y = decode(b, k, kN);
      if (!u.count(encode(add(x, y), kN))) return false;
    }
  }
  return true;
}

}  // namespace

FiniteAlgebra z4_algebra(int m) {
  if (m < 2) throw PreconditionError("z4_algebra: arity cap must be >= 2");
  std::vector<Operation> ops;
  ops.push_back({"plus", FunctionTable::from_fn(kN, 2, [](auto x) { return mod4(x[0] + x[1]); })});
  ops.push_back({"one", FunctionTable::constant(kN, 1, 1)});
  for (int j = 2; j <= m; ++j) {
    ops.push_back({"dbl" + std::to_string(j), FunctionTable::from_fn(kN, j, [](auto x) {
                     int p = 2;
                     for (Elem v : x) p *= v;
                     return mod4(p);
                   })});
  }
  return FiniteAlgebra(kN, std::move(ops));
}

FunctionTable Z4NormalForm::table() const {
  std::set<std::uint32_t> masks;
  for (const auto& v : cosets) masks.insert(residue(v));
  return FunctionTable::from_fn(kN, arity, [&](std::span<const Elem> x) {
    int s = constant + dot(lambdas, x);
    if (masks.count(residue(x))) s += 2;
    return mod4(s);
  });
}

int Z4NormalForm::degree() const {
  // Moebius transform of the coset indicator over GF(2).
  const std::uint32_t size = std::uint32_t{1} << arity;
  std::vector<std::uint8_t> anf(size, 0);
  for (const auto& v : cosets) anf[residue(v)] = 1;
  for (int i = 0; i < arity; ++i) {
    for (std::uint32_t m = 0; m < size; ++m) {
      if (m >> i & 1) anf[m] ^= anf[m ^ (std::uint32_t{1} << i)];
    }
  }
  int deg = 0;
  for (std::uint32_t m = 0; m < size; ++m) {
    if (anf[m]) deg = std::max(deg, std::popcount(m));
  }
  return deg;
}

std::string Z4NormalForm::to_string() const {
  std::ostringstream os;
  os << "c=" << static_cast<int>(constant) << " lambda=(";
  for (std::size_t i = 0; i < lambdas.size(); ++i) os << (i ? "," : "") << static_cast<int>(lambdas[i]);
  os << ") cosets={";
  for (std::size_t i = 0; i < cosets.size(); ++i) {
    os << (i ? "," : "") << "(";
    for (std::size_t j = 0; j < cosets[i].size(); ++j) os << (j ? "," : "") << static_cast<int>(cosets[i][j]);
    os << ")";
  }
  os << "}";
  return os.str();
}

std::optional<Z4NormalForm> z4_term_normal_form(const FunctionTable& f) {
  if (f.universe() != kN) throw PreconditionError("z4_term_normal_form: universe must be 4");
  const int k = f.arity();
  Z4NormalForm nf;
  nf.arity = k;
  nf.constant = f.at(0);
  for (int i = 0; i < k; ++i) {
    nf.lambdas.push_back(mod4(f.at(checked_pow(kN, static_cast<std::size_t>(i))) - nf.constant));
  }
  // The residual must be 0 or 2 and depend only on the residue class.
  std::vector<int> by_class(std::size_t{1} << k, -1);
  bool ok = true;
  for_each_tuple(kN, k, [&](std::span<const Elem> x) {
    if (!ok) return;
    const Elem r = mod4(f(x) - nf.constant - dot(nf.lambdas, x));
    if (r != 0 && r != 2) {
      ok = false;
      return;
    }
    int& slot = by_class[residue(x)];
    if (slot < 0) slot = r;
    ok = slot == r;
  });
  if (!ok) return std::nullopt;
  for (std::uint32_t m = 0; m < by_class.size(); ++m) {
    if (by_class[m] == 2) nf.cosets.push_back(mask_vector(m, k));
  }
  std::sort(nf.cosets.begin(), nf.cosets.end(), [](const auto& a, const auto& b) {
    return encode(a, kN) < encode(b, kN);
  });
  return nf;
}

std::vector<Z4NormalForm> z4_normal_forms(int k, int max_degree) {
  if (k < 1) throw PreconditionError("z4_normal_forms: arity must be >= 1");
  const std::uint32_t size = std::uint32_t{1} << k;
  std::vector<std::uint32_t> monomials;
  for (std::uint32_t m = 1; m < size; ++m) {
    if (std::popcount(m) >= 2 && std::popcount(m) <= max_degree) monomials.push_back(m);
  }
  if (monomials.size() > 20) throw PreconditionError("z4_normal_forms: too many coset patterns");
  std::vector<std::vector<std::vector<Elem>>> patterns;
  for (std::uint32_t pick = 0; pick < (std::uint32_t{1} << monomials.size()); ++pick) {
    std::vector<std::vector<Elem>> cosets;
    for (std::uint32_t x = 0; x < size; ++x) {
      int q = 0;
      for (std::size_t i = 0; i < monomials.size(); ++i) {
        if ((pick >> i & 1) && (x & monomials[i]) == monomials[i]) q ^= 1;
      }
      if (q) cosets.push_back(mask_vector(x, k));
    }
    std::sort(cosets.begin(), cosets.end(), [](const auto& a, const auto& b) {
      return encode(a, kN) < encode(b, kN);
    });
    patterns.push_back(std::move(cosets));
  }
  std::vector<Z4NormalForm> out;
  for (int c = 0; c < kN; ++c) {
    for (Code lc = 0; lc < checked_pow(kN, static_cast<std::size_t>(k)); ++lc) {
      for (const auto& p : patterns) {
        out.push_back(Z4NormalForm{k, static_cast<Elem>(c), decode(lc, k, kN), p});
      }
    }
  }
  return out;
}

RelationSet Z4CadForm::members() const {
  std::vector<Code> codes;
  for (const auto& v : reps) {
    for (Code u : subgroup) {
      codes.push_back(encode(add(add(v, decode(u, arity, kN)), shift), kN));
    }
  }
  return RelationSet(kN, arity, std::move(codes));
}

std::optional<Z4CadForm> z4_cad_classify(const RelationSet& d) {
  if (d.universe() != kN) throw PreconditionError("z4_cad_classify: universe must be 4");
  if (d.empty()) throw PreconditionError("z4_cad_classify: empty set");
  const int k = d.arity();
  Z4CadForm form;
  form.arity = k;
  form.shift = d.tuple(0);
  std::set<Code> shifted;
  for (std::size_t i = 0; i < d.size(); ++i) shifted.insert(encode(sub(d.tuple(i), form.shift), kN));
  std::set<Code> u;
  std::map<std::uint32_t, std::vector<Code>> classes;
  for (Code c : shifted) {
    const auto x = decode(c, k, kN);
    const std::uint32_t r = residue(x);
    if (r == 0) u.insert(c);
    classes[r].push_back(c);
  }
  if (!closed_under_plus(u, k)) return std::nullopt;
  form.subgroup.assign(u.begin(), u.end());
  for (const auto& [r, members] : classes) {
    const auto v = decode(members.front(), k, kN);
    if (!u.count(encode(add(v, v), kN))) return std::nullopt;
    std::set<Code> coset;
    for (Code c : u) coset.insert(encode(add(v, decode(c, k, kN)), kN));
    if (!std::equal(coset.begin(), coset.end(), members.begin(), members.end())) return std::nullopt;
    form.reps.push_back(v);
  }
  return form;
}

std::vector<RelationSet> z4_cad_domains(int k) {
  if (k < 1 || k > 3) throw PreconditionError("z4_cad_domains: arity must be 1..3");
  const std::uint32_t classes = std::uint32_t{1} << k;
  // 2Z4^k: element 2w for w in {0,1}^k, indexed by the mask of w.
  auto twice = [&](std::uint32_t w) {
    auto v = mask_vector(w, k);
    for (auto& x : v) x = static_cast<Elem>(2 * x);
    return v;
  };
  std::set<std::vector<Code>> found;
  // Subgroups of 2Z4^k are the subsets of masks closed under xor.
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << classes); ++pick) {
    if (!(pick & 1)) continue;
    std::vector<std::uint32_t> umask;
    for (std::uint32_t w = 0; w < classes; ++w) {
      if (pick >> w & 1) umask.push_back(w);
    }
    bool closed = true;
    for (auto x : umask)
      for (auto y : umask) closed = closed && (pick >> (x ^ y) & 1);
    if (!closed) continue;
    // Transversal of 2Z4^k / U: least mask of each coset.
    std::vector<std::uint32_t> transversal;
    for (std::uint32_t b = 0; b < classes; ++b) {
      bool least = true;
      for (auto x : umask) least = least && (b ^ x) >= b;
      if (least) transversal.push_back(b);
    }
    // Residue classes allowed besides 0: 2w in U.
    std::vector<std::uint32_t> allowed;
    for (std::uint32_t w = 1; w < classes; ++w) {
      if (pick >> w & 1) allowed.push_back(w);
    }
    // Each allowed class is absent (choice 0) or uses coset w + 2b + U.
    const std::size_t choices = transversal.size() + 1;
    std::vector<std::size_t> sel(allowed.size(), 0);
    while (true) {
      std::vector<std::vector<Elem>> base;
      for (auto x : umask) base.push_back(twice(x));
      for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (sel[i] == 0) continue;
        const auto v = add(mask_vector(allowed[i], k), twice(transversal[sel[i] - 1]));
        for (auto x : umask) base.push_back(add(v, twice(x)));
      }
      for (Code sc = 0; sc < checked_pow(kN, static_cast<std::size_t>(k)); ++sc) {
        const auto shift = decode(sc, k, kN);
        std::vector<Code> codes;
        for (const auto& b : base) codes.push_back(encode(add(b, shift), kN));
        std::sort(codes.begin(), codes.end());
        found.insert(std::move(codes));
      }
      std::size_t i = 0;
      for (; i < sel.size(); ++i) {
        if (++sel[i] < choices) break;
        sel[i] = 0;
      }
      if (i == sel.size()) break;
    }
  }
  std::vector<RelationSet> out;
  for (const auto& codes : found) out.emplace_back(kN, k, codes);
  std::sort(out.begin(), out.end(), [](const RelationSet& a, const RelationSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.members().begin(), a.members().end(),
                                        b.members().begin(), b.members().end());
  });
  return out;
}

bool z4_preserves_all_sub_A4(const PartialFunction& f) {
  return preserves_all_subpowers(z4_algebra(std::max(2, f.arity())), f, 4);
}

Z4Extension z4_extend(const PartialFunction& f) {
  const auto form = z4_cad_classify(f.domain());
  if (!form) throw PreconditionError("z4_extend: domain is not c.a.d.");
  const int k = f.arity();
  const auto& d0 = form->shift;
  const Elem f0 = *f.at(d0);
  // Shifted function: 0 in the domain and value 0 there.
  auto fs = [&](std::span<const Elem> x) -> std::optional<Elem> {
    const auto v = f.at(add(x, d0));
    if (!v) return std::nullopt;
    return mod4(*v - f0);
  };
  std::vector<std::vector<Elem>> u;
  for (Code c : form->subgroup) u.push_back(decode(c, k, kN));

  std::optional<std::vector<Elem>> lambda;
  for (Code lc = 0; lc < checked_pow(kN, static_cast<std::size_t>(k)) && !lambda; ++lc) {
    const auto l = decode(lc, k, kN);
    if (std::all_of(u.begin(), u.end(), [&](const auto& x) { return dot(l, x) == *fs(x); })) lambda = l;
  }
  if (!lambda) throw PreconditionError("z4_extend: restriction to U is not the restriction of a linear map");

  Z4Extension ext;
  // Additivity along U.
  const RelationSet shifted_dom = [&] {
    std::vector<Code> codes;
    for (std::size_t i = 0; i < f.domain().size(); ++i) codes.push_back(encode(sub(f.domain().tuple(i), d0), kN));
    return RelationSet(kN, k, std::move(codes));
  }();
  for (std::size_t i = 0; i < shifted_dom.size(); ++i) {
    const auto x = shifted_dom.tuple(i);
    for (const auto& y : u) {
      const auto xy = add(x, y);
      const auto v = fs(xy);
      if (v && *v != mod4(*fs(x) + *fs(y))) ext.hom_identity = false;
    }
  }
  // g = f - t on the shifted domain; the h_i dichotomy on class reps.
  auto g = [&](std::span<const Elem> x) { return mod4(*fs(x) - dot(*lambda, x)); };
  std::vector<std::vector<Elem>> marked;
  for (const auto& v : form->reps) {
    std::vector<Elem> h(kN);
    for (int x = 0; x < kN; ++x) {
      std::vector<Elem> xv(v);
      for (auto& c : xv) c = mod4(c * x);
      h[static_cast<std::size_t>(x)] = g(xv);
    }
    const bool zero = std::all_of(h.begin(), h.end(), [](Elem e) { return e == 0; });
    const bool two_x = h == std::vector<Elem>{0, 2, 0, 2};
    if (!zero && !two_x) ext.h_dichotomy = false;
    if (g(v) == 2) marked.push_back(add(v, d0));
  }
  // T(y) = f(d0) - t(d0) + t(y) + sum of c_{v+d0}(y).
  std::set<std::uint32_t> masks;
  for (const auto& v : marked) masks.insert(residue(v));
  const Elem c = mod4(f0 - dot(*lambda, d0));
  const FunctionTable table = FunctionTable::from_fn(kN, k, [&](std::span<const Elem> y) {
    return mod4(c + dot(*lambda, y) + (masks.count(residue(y)) ? 2 : 0));
  });
  const auto nf = z4_term_normal_form(table);
  if (!nf) throw InternalError("z4_extend: constructed table has no normal form");
  ext.form = *nf;
  for (std::size_t i = 0; i < f.domain().size(); ++i) {
    if (table.at(f.domain().members()[i]) != f.values()[i]) ext.agrees = false;
  }
  return ext;
}

Z4DualityReport z4_verify_duality(int k, const Z4VerifyOptions& options) {
  if (k < 1 || k > 3) throw PreconditionError("z4_verify_duality: arity must be 1..3");
  Z4DualityReport rep;
  rep.arity = k;
  rep.seed = options.seed;
  const FiniteAlgebra alg = z4_algebra(std::max(2, k));
  const CloneSlice slice = clone_upto(alg, k, CloneKind::Term, options.clone_budget);

  std::vector<RelationSet> domains = z4_cad_domains(k);
  {
    const auto closure = cad_enumerate(slice);
    rep.domains_match_closure = closure.size() == domains.size();
    for (std::size_t i = 0; i < closure.size() && rep.domains_match_closure; ++i) {
      rep.domains_match_closure = closure[i].members == domains[i];
    }
    if (!rep.domains_match_closure) rep.failures.push_back("form enumeration differs from solution sets");
  }
  for (const auto& d : domains) {
    const auto form = z4_cad_classify(d);
    if (form && form->members() == d) ++rep.domains_checked_against_classify;
    else rep.failures.push_back("classifier rejects " + to_string(d));
  }
  if (options.sample > 0 && options.sample < domains.size()) {
    rep.sampled = true;
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> idx(domains.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(options.sample);
    std::sort(idx.begin(), idx.end());
    std::vector<RelationSet> picked;
    for (auto i : idx) picked.push_back(domains[i]);
    domains = std::move(picked);
  }
  rep.domains = domains.size();

  CandidateSource sub_a4;
  sub_a4.power = 4;
  for (const auto& d : domains) {
    PreservationScanner scanner(alg, d, slice, sub_a4);
    const ScanStats st = scanner.scan([&](const PartialFunction& f) {
      const Z4Extension ext = z4_extend(f);
      ++rep.hom_checks;
      ++rep.dichotomy_checks;
      if (ext.agrees) ++rep.extended;
      if (!ext.agrees) rep.failures.push_back("no extension: " + to_string(f));
      if (!ext.hom_identity) rep.failures.push_back("additivity fails: " + to_string(f));
      if (!ext.h_dichotomy) rep.failures.push_back("h_i dichotomy fails: " + to_string(f));
      return rep.failures.size() < 16;
    });
    rep.nodes += st.nodes;
    rep.pruned += st.pruned;
    rep.preserving += st.preserving;
    if (rep.failures.size() >= 16) break;
  }
  return rep;
}

}  // namespace nildual
