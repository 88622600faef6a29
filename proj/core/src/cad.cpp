#include "nildual/cad.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "nildual/error.hpp"

namespace nildual {

namespace {

using Bits = std::vector<std::uint64_t>;

Bits solution_bits(const FunctionTable& f, const FunctionTable& g) {
  Bits bits((f.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.at(i) == g.at(i)) bits[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return bits;
}

bool any_bit(const Bits& b) {
  return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
}

std::vector<Code> bits_to_codes(const Bits& b) {
  std::vector<Code> out;
  for (std::size_t w = 0; w < b.size(); ++w) {
    for (std::uint64_t x = b[w]; x != 0; x &= x - 1) {
      out.push_back(w * 64 + static_cast<Code>(__builtin_ctzll(x)));
    }
  }
  return out;
}

// Domain index of each code, or -1.
std::vector<int> index_of(const RelationSet& domain) {
  std::vector<int> idx(static_cast<std::size_t>(checked_pow(domain.universe(), domain.arity())), -1);
  for (std::size_t i = 0; i < domain.size(); ++i) idx[domain.members()[i]] = static_cast<int>(i);
  return idx;
}

// Calls fn(indices) for every size-s subset of {0..d-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t d, std::size_t s, Fn&& fn) {
  if (s > d) return;
  std::vector<std::uint32_t> c(s);
  for (std::size_t i = 0; i < s; ++i) c[i] = static_cast<std::uint32_t>(i);
  while (true) {
    fn(std::span<const std::uint32_t>(c));
    std::size_t i = s;
    while (i > 0 && c[i - 1] == d - s + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < s; ++j) c[j] = c[j - 1] + 1;
  }
}

bool is_closed(const FiniteAlgebra& alg, const RelationSet& r) {
  const int m = r.arity();
  std::vector<Elem> out(static_cast<std::size_t>(m));
  for (const auto& op : alg.ops()) {
    const int a = op.arity();
    std::vector<std::size_t> idx(static_cast<std::size_t>(a), 0);
    std::vector<std::vector<Elem>> cols(static_cast<std::size_t>(a));
    if (r.empty()) continue;
    while (true) {
      for (int i = 0; i < a; ++i) cols[static_cast<std::size_t>(i)] = r.tuple(idx[static_cast<std::size_t>(i)]);
      if (!r.contains(apply_pointwise(op.table, cols))) return false;
      std::size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < r.size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }
  return true;
}

}  // namespace

bool CadDomain::witness_matches() const {
  if (witness.empty()) return false;
  Bits bits = solution_bits(witness[0].first, witness[0].second);
  for (std::size_t i = 1; i < witness.size(); ++i) {
    const Bits b = solution_bits(witness[i].first, witness[i].second);
    for (std::size_t w = 0; w < bits.size(); ++w) bits[w] &= b[w];
  }
  const auto codes = bits_to_codes(bits);
  return std::equal(codes.begin(), codes.end(), members.members().begin(), members.members().end());
}

std::vector<CadDomain> cad_enumerate(const CloneSlice& slice, std::size_t cap) {
  const int n = slice.universe();
  const int k = slice.arity();
  std::map<Bits, std::vector<std::pair<std::size_t, std::size_t>>> found;
  std::vector<const Bits*> atoms;
  auto too_many = [&] {
    throw BudgetExceeded("c.a.d. enumeration at arity " + std::to_string(k) + " exceeds cap of " +
                         std::to_string(cap) + " domains");
  };
  for (std::size_t i = 0; i < slice.size(); ++i) {
    for (std::size_t j = i; j < slice.size(); ++j) {
      Bits b = solution_bits(slice[i], slice[j]);
      if (!any_bit(b)) continue;
      auto [it, inserted] = found.try_emplace(std::move(b));
      if (inserted) {
        it->second.emplace_back(i, j);
        atoms.push_back(&it->first);
        if (found.size() > cap) too_many();
      }
    }
  }
  std::vector<const Bits*> frontier(atoms);
  while (!frontier.empty()) {
    std::vector<const Bits*> next;
    for (const Bits* x : frontier) {
      for (const Bits* a : atoms) {
        Bits b(*x);
        for (std::size_t w = 0; w < b.size(); ++w) b[w] &= (*a)[w];
        if (!any_bit(b) || found.count(b)) continue;
        auto witness = found.at(*x);
        const auto& extra = found.at(*a);
        witness.insert(witness.end(), extra.begin(), extra.end());
        auto it = found.emplace(std::move(b), std::move(witness)).first;
        next.push_back(&it->first);
        if (found.size() > cap) too_many();
      }
    }
    frontier = std::move(next);
  }
  std::vector<CadDomain> out;
  out.reserve(found.size());
  for (const auto& [bits, eqs] : found) {
    CadDomain d;
    d.arity = k;
    d.members = RelationSet(n, k, bits_to_codes(bits));
    for (auto [i, j] : eqs) d.witness.emplace_back(slice[i], slice[j]);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const CadDomain& a, const CadDomain& b) {
    if (a.members.size() != b.members.size()) return a.members.size() < b.members.size();
    return std::lexicographical_compare(a.members.members().begin(), a.members.members().end(),
                                        b.members.members().begin(), b.members.members().end());
  });
  return out;
}

bool preserves(const PartialFunction& f, const RelationSet& r) {
  if (r.universe() != f.universe()) throw PreconditionError("preserves: universe mismatch");
  if (r.empty()) return true;
  const int k = f.arity();
  const int m = r.arity();
  const int n = f.universe();
  std::vector<std::vector<Elem>> tuples;
  for (std::size_t i = 0; i < r.size(); ++i) tuples.push_back(r.tuple(i));
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  std::vector<Elem> row(static_cast<std::size_t>(k)), out(static_cast<std::size_t>(m));
  while (true) {
    bool defined = true;
    for (int j = 0; j < m && defined; ++j) {
      for (int i = 0; i < k; ++i) row[static_cast<std::size_t>(i)] = tuples[idx[static_cast<std::size_t>(i)]][static_cast<std::size_t>(j)];
      const auto v = f.at(row);
      if (v) out[static_cast<std::size_t>(j)] = *v;
      defined = v.has_value();
    }
    if (defined && !r.contains(encode(out, n))) return false;
    std::size_t i = 0;
    for (; i < idx.size(); ++i) {
      if (++idx[i] < tuples.size()) break;
      idx[i] = 0;
    }
    if (i == idx.size()) return true;
  }
}

bool preserves_all_subpowers(const FiniteAlgebra& alg, const PartialFunction& f, int n) {
  if (n < 1) throw PreconditionError("preserves_all_subpowers: power must be >= 1");
  if (f.universe() != alg.size()) throw PreconditionError("preserves_all_subpowers: universe mismatch");
  const RelationSet& dom = f.domain();
  const int k = f.arity();
  // Repeated rows add nothing, and the condition for a set of rows implies
  // it for every subset, so sets of exactly min(n, |D|) rows suffice.
  const std::size_t s = std::min<std::size_t>(static_cast<std::size_t>(n), dom.size());
  std::vector<std::vector<Elem>> points;
  for (std::size_t i = 0; i < dom.size(); ++i) points.push_back(dom.tuple(i));
  bool ok = true;
  for_each_subset(dom.size(), s, [&](std::span<const std::uint32_t> rows) {
    if (!ok) return;
    std::vector<std::vector<Elem>> cols(static_cast<std::size_t>(k), std::vector<Elem>(s));
    std::vector<Elem> value(s);
    for (std::size_t j = 0; j < s; ++j) {
      for (int i = 0; i < k; ++i) cols[static_cast<std::size_t>(i)][j] = points[rows[j]][static_cast<std::size_t>(i)];
      value[j] = f.values()[rows[j]];
    }
    const RelationSet gens = RelationSet::from_tuples(alg.size(), static_cast<int>(s), cols);
    ok = subuniverse_generate(alg, static_cast<int>(s), gens).contains(value);
  });
  return ok;
}

std::optional<FunctionTable> extends_to_term(const PartialFunction& f, const CloneSlice& slice) {
  if (slice.arity() != f.arity() || slice.universe() != f.universe()) {
    throw PreconditionError("extends_to_term: slice arity or universe mismatch");
  }
  const auto codes = f.domain().members();
  for (const auto& t : slice.members()) {
    bool agree = true;
    for (std::size_t i = 0; i < codes.size() && agree; ++i) agree = t.at(codes[i]) == f.values()[i];
    if (agree) return t;
  }
  return std::nullopt;
}

std::string CandidateSource::describe() const {
  if (power > 0) return "all subuniverses of A^" + std::to_string(power);
  return std::to_string(relations.size()) + " explicit relations";
}

PreservationScanner::PreservationScanner(const FiniteAlgebra& alg, const RelationSet& domain,
                                         const CloneSlice& slice, const CandidateSource& candidates)
    : universe_(alg.size()), domain_(domain), by_trigger_(domain.size()) {
  if (domain.empty()) throw PreconditionError("scanner: empty domain");
  if (slice.arity() != domain.arity()) throw PreconditionError("scanner: slice arity mismatch");
  const std::size_t d = domain.size();
  const int k = domain.arity();
  // Pointers into allowed_store_ must stay valid: size it up front.
  std::vector<std::pair<std::vector<std::uint32_t>, std::vector<Code>>> pending;

  if (candidates.power > 0) {
    const std::size_t s = std::min<std::size_t>(static_cast<std::size_t>(candidates.power), d);
    auto add_subset = [&](std::span<const std::uint32_t> pts) {
      std::vector<Code> allowed;
      std::vector<Elem> pattern(pts.size());
      for (const auto& t : slice.members()) {
        for (std::size_t j = 0; j < pts.size(); ++j) pattern[j] = t.at(domain.members()[pts[j]]);
        allowed.push_back(encode(pattern, universe_));
      }
      std::sort(allowed.begin(), allowed.end());
      allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
      pending.emplace_back(std::vector<std::uint32_t>(pts.begin(), pts.end()), std::move(allowed));
    };
    // Prefix sets prune before s points are decided.
    for (std::size_t p = 1; p < s; ++p) {
      std::vector<std::uint32_t> prefix(p);
      for (std::size_t j = 0; j < p; ++j) prefix[j] = static_cast<std::uint32_t>(j);
      add_subset(prefix);
    }
    for_each_subset(d, s, add_subset);
  }

  const std::vector<int> where = index_of(domain);
  std::set<std::pair<std::size_t, std::vector<std::uint32_t>>> seen;
  for (std::size_t ri = 0; ri < candidates.relations.size(); ++ri) {
    const RelationSet& r = candidates.relations[ri];
    if (r.universe() != universe_) throw InputError("candidate relation has the wrong universe");
    if (r.empty()) continue;
    const int m = r.arity();
    std::vector<std::vector<Elem>> tuples;
    for (std::size_t i = 0; i < r.size(); ++i) tuples.push_back(r.tuple(i));
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    std::vector<Elem> row(static_cast<std::size_t>(k));
    std::vector<std::uint32_t> pts(static_cast<std::size_t>(m));
    while (true) {
      bool inside = true;
      for (int j = 0; j < m && inside; ++j) {
        for (int i = 0; i < k; ++i) row[static_cast<std::size_t>(i)] = tuples[idx[static_cast<std::size_t>(i)]][static_cast<std::size_t>(j)];
        const int at = where[encode(row, universe_)];
        inside = at >= 0;
        if (inside) pts[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(at);
      }
      if (inside && seen.emplace(ri, pts).second) {
        pending.emplace_back(pts, std::vector<Code>(r.members().begin(), r.members().end()));
      }
      std::size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < tuples.size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }

  allowed_store_.reserve(pending.size());
  for (auto& [pts, allowed] : pending) {
    allowed_store_.push_back(std::move(allowed));
    const std::uint32_t trigger = *std::max_element(pts.begin(), pts.end());
    by_trigger_[trigger].push_back(Constraint{std::move(pts), &allowed_store_.back()});
  }
}

bool PreservationScanner::satisfied(const Constraint& c, const std::vector<Elem>& values) const {
  Code code = 0;
  Code mult = 1;
  for (std::uint32_t p : c.points) {
    code += values[p] * mult;
    mult *= static_cast<Code>(universe_);
  }
  return std::binary_search(c.allowed->begin(), c.allowed->end(), code);
}

ScanStats PreservationScanner::scan(const std::function<bool(const PartialFunction&)>& visit) {
  ScanStats stats;
  const std::size_t d = domain_.size();
  std::vector<Elem> values(d, 0);
  std::vector<int> next(d, 0);
  std::size_t level = 0;
  bool stop = false;
  while (!stop) {
    if (next[level] >= universe_) {
      if (level == 0) break;
      next[level] = 0;
      --level;
      continue;
    }
    values[level] = static_cast<Elem>(next[level]++);
    ++stats.nodes;
    const auto& cs = by_trigger_[level];
    const bool ok = std::all_of(cs.begin(), cs.end(), [&](const Constraint& c) { return satisfied(c, values); });
    if (!ok) {
      ++stats.pruned;
      continue;
    }
    if (level + 1 == d) {
      ++stats.preserving;
      stop = !visit(PartialFunction(domain_, values));
    } else {
      ++level;
    }
  }
  return stats;
}

RelatednessVerdict finite_relatedness_scan(const FiniteAlgebra& alg,
                                           const CandidateSource& candidates, int max_arity,
                                           const ScanOptions& options) {
  if (max_arity < 1) throw PreconditionError("finite_relatedness_scan: arity bound must be >= 1");
  for (const auto& r : candidates.relations) {
    if (r.universe() != alg.size()) throw InputError("candidate relation has the wrong universe");
    if (!is_closed(alg, r)) throw InputError("candidate relation is not a subuniverse: " + to_string(r));
  }
  RelatednessVerdict verdict;
  verdict.status = "certified";
  for (int k = 1; k <= max_arity; ++k) {
    std::optional<CloneSlice> slice;
    std::vector<CadDomain> domains;
    try {
      slice = clone_upto(alg, k, CloneKind::Term, options.clone_budget);
      domains = cad_enumerate(*slice, options.domain_cap);
    } catch (const BudgetExceeded& e) {
      verdict.status = "inconclusive";
      verdict.evidence = "inconclusive at arity " + std::to_string(k) + ": " + e.what();
      return verdict;
    }
    ArityStats st;
    st.arity = k;
    std::set<std::vector<Code>> cad_sets;
    for (const auto& d : domains) {
      cad_sets.emplace(d.members.members().begin(), d.members.members().end());
    }
    auto preserves_all = [&](const PartialFunction& f) {
      for (const auto& r : candidates.relations) {
        if (!preserves(f, r)) return false;
      }
      return candidates.power <= 0 || preserves_all_subpowers(alg, f, candidates.power);
    };

    for (const auto& dom : domains) {
      ++st.domains;
      std::set<std::vector<Elem>> restrictions;
      for (const auto& t : slice->members()) {
        std::vector<Elem> p;
        for (Code c : dom.members.members()) p.push_back(t.at(c));
        restrictions.insert(std::move(p));
      }
      std::optional<PartialFunction> found;
      PreservationScanner scanner(alg, dom.members, *slice, candidates);
      const ScanStats s = scanner.scan([&](const PartialFunction& f) {
        if (restrictions.count(std::vector<Elem>(f.values().begin(), f.values().end()))) return true;
        found = f;
        return false;
      });
      st.nodes += s.nodes;
      st.pruned += s.pruned;
      st.preserving += s.preserving;
      if (!found) continue;

      // Re-verify with the direct checks before reporting.
      if (!preserves_all(*found) || extends_to_term(*found, *slice)) {
        throw InternalError("scanner produced an invalid counterexample: " + to_string(*found));
      }
      if (options.shrink) {
        bool progress = true;
        while (progress && found->domain().size() > 1) {
          progress = false;
          const auto codes = found->domain().members();
          for (std::size_t drop = 0; drop < codes.size(); ++drop) {
            std::vector<Code> sub;
            std::vector<Elem> vals;
            for (std::size_t i = 0; i < codes.size(); ++i) {
              if (i == drop) continue;
              sub.push_back(codes[i]);
              vals.push_back(found->values()[i]);
            }
            if (!cad_sets.count(sub)) continue;
            PartialFunction g(RelationSet(alg.size(), k, sub), vals);
            if (preserves_all(g) && !extends_to_term(g, *slice)) {
              found = std::move(g);
              progress = true;
              break;
            }
          }
        }
      }
      verdict.status = "counterexample";
      verdict.scanned_arity = k;
      verdict.evidence = "preserves " + candidates.describe() + "; no member of Clo_" +
                         std::to_string(k) + " (" + std::to_string(slice->size()) +
                         " tables) agrees with it on its c.a.d. domain";
      verdict.counterexample = std::move(found);
      verdict.per_arity.push_back(st);
      return verdict;
    }
    verdict.per_arity.push_back(st);
    verdict.scanned_arity = k;
  }
  return verdict;
}

}  // namespace nildual
