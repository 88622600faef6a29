#include "nildual/commutator.hpp"

#include <algorithm>
#include <set>

#include "nildual/error.hpp"

namespace nildual {

std::string to_string(CommutatorMethod method) {
  return method == CommutatorMethod::AbsorbingGeneration ? "absorbing-generation" : "nilpotent-T";
}

namespace {

// Pairs collected as a dense boolean matrix, then turned into the
// congruence they generate.
class PairSet {
 public:
  explicit PairSet(int n) : n_(n), seen_(static_cast<std::size_t>(n * n), false) {}

  void add(Elem a, Elem b) {
    if (a == b) return;
    const auto i = static_cast<std::size_t>(std::min(a, b) * n_ + std::max(a, b));
    if (!seen_[i]) {
      seen_[i] = true;
      pairs_.emplace_back(a, b);
    }
  }

  Partition generate(const FiniteAlgebra& alg) const { return congruence_generate(alg, pairs_); }

 private:
  int n_;
  std::vector<bool> seen_;
  std::vector<std::pair<Elem, Elem>> pairs_;
};

// Codes of all tuples in the product of the alpha_i-classes of o_i.
std::vector<Code> box_codes(std::span<const Partition> alphas, std::span<const Elem> o, int n) {
  const std::size_t k = alphas.size();
  std::vector<std::vector<Elem>> classes(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (int a = 0; a < n; ++a) {
      if (alphas[i].related(static_cast<Elem>(a), o[i])) classes[i].push_back(static_cast<Elem>(a));
    }
  }
  std::vector<Code> out;
  std::vector<std::size_t> idx(k, 0);
  std::vector<Elem> t(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) t[i] = classes[i][idx[i]];
    out.push_back(encode(t, n));
    std::size_t i = 0;
    for (; i < k; ++i) {
      if (++idx[i] < classes[i].size()) break;
      idx[i] = 0;
    }
    if (i == k) break;
  }
  return out;
}

Partition absorbing_generation(const FiniteAlgebra& alg, std::span<const FunctionTable> pol,
                               std::span<const Partition> alphas) {
  const int n = alg.size();
  const int k = static_cast<int>(alphas.size());
  const auto points = static_cast<std::size_t>(checked_pow(n, k));
  // region[o]: tuples sharing at least one coordinate with o.
  std::vector<std::vector<Code>> region(points), box(points);
  std::vector<Elem> o(static_cast<std::size_t>(k), 0), x(static_cast<std::size_t>(k), 0);
  for (Code oc = 0; oc < points; ++oc) {
    decode(oc, n, o);
    std::fill(x.begin(), x.end(), Elem{0});
    Code xc = 0;
    do {
      bool shares = false;
      for (int i = 0; i < k; ++i) shares = shares || x[static_cast<std::size_t>(i)] == o[static_cast<std::size_t>(i)];
      if (shares && xc != oc) region[oc].push_back(xc);
      ++xc;
    } while (next_tuple(x, n));
    box[oc] = box_codes(alphas, o, n);
  }
  PairSet pairs(n);
  for (const auto& f : pol) {
    for (Code oc = 0; oc < points; ++oc) {
      const Elem fo = f.at(oc);
      const bool absorbing = std::all_of(region[oc].begin(), region[oc].end(),
                                         [&](Code xc) { return f.at(xc) == fo; });
      if (!absorbing) continue;
      for (Code b : box[oc]) pairs.add(f.at(b), fo);
    }
  }
  return pairs.generate(alg);
}

Partition nilpotent_t(const FiniteAlgebra& alg, std::span<const FunctionTable> pol,
                      std::span<const Partition> alphas) {
  const int n = alg.size();
  const std::size_t k = alphas.size();
  // For each o, the codes of (a, o) with a_i alpha_i o.
  std::vector<std::vector<Code>> inputs(static_cast<std::size_t>(n));
  const Code top = checked_pow(n, static_cast<std::size_t>(k));
  for (int o = 0; o < n; ++o) {
    const std::vector<Elem> diag(k, static_cast<Elem>(o));
    for (Code a : box_codes(alphas, diag, n)) inputs[static_cast<std::size_t>(o)].push_back(a + top * static_cast<Code>(o));
  }
  PairSet pairs(n);
  for (const auto& c : pol) {
    if (!commutator_classify(c)) continue;
    for (int o = 0; o < n; ++o) {
      for (Code code : inputs[static_cast<std::size_t>(o)]) pairs.add(c.at(code), static_cast<Elem>(o));
    }
  }
  return pairs.generate(alg);
}

}  // namespace

CommutatorLab::CommutatorLab(const FiniteAlgebra& alg, std::size_t budget)
    : alg_(alg), budget_(budget) {}

const ClonePrefix& CommutatorLab::polynomials(int k) {
  auto it = pol_.find(k);
  if (it == pol_.end()) {
    it = pol_.emplace(k, clone_prefix(alg_, k, CloneKind::Polynomial, budget_)).first;
  }
  return it->second;
}

void CommutatorLab::check_args(std::span<const Partition> alphas) const {
  if (alphas.size() < 2) throw PreconditionError("commutator needs at least two congruences");
  for (const auto& a : alphas) {
    if (a.universe() != alg_.size()) throw PreconditionError("partition on the wrong universe");
    if (!is_congruence(alg_, a)) throw PreconditionError("not a congruence: " + to_string(a));
  }
}

Partition CommutatorLab::higher_commutator(std::span<const Partition> alphas,
                                           CommutatorMethod method) {
  check_args(alphas);
  const int k = static_cast<int>(alphas.size());
  if (method == CommutatorMethod::NilpotentT) {
    if (!is_nilpotent()) throw PreconditionError("nilpotent-T method refused: algebra is not nilpotent");
  }
  const int arity = method == CommutatorMethod::NilpotentT ? k + 1 : k;
  const ClonePrefix& pol = polynomials(arity);
  if (!pol.complete) {
    throw BudgetExceeded("incomplete closure: Pol_" + std::to_string(arity) + " exceeds budget of " +
                         std::to_string(budget_) + " tables");
  }
  return method == CommutatorMethod::NilpotentT ? nilpotent_t(alg_, pol.slice.members(), alphas)
                                                : absorbing_generation(alg_, pol.slice.members(), alphas);
}

CommutatorBound CommutatorLab::commutator_bound(std::span<const Partition> alphas) {
  check_args(alphas);
  const ClonePrefix& pol = polynomials(static_cast<int>(alphas.size()));
  return {absorbing_generation(alg_, pol.slice.members(), alphas), pol.complete};
}

std::vector<Partition> CommutatorLab::congruence_lattice() {
  if (lattice_) return *lattice_;
  const int n = alg_.size();
  std::set<Partition> found{Partition::equality(n)};
  std::vector<Partition> principal;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::pair<Elem, Elem> p{static_cast<Elem>(a), static_cast<Elem>(b)};
      Partition c = congruence_generate(alg_, std::span(&p, 1));
      if (found.insert(c).second) principal.push_back(c);
    }
  }
  // Every congruence is a join of principal ones; join new elements with
  // the principal congruences until nothing new appears.
  std::vector<Partition> frontier(principal);
  while (!frontier.empty()) {
    std::vector<Partition> next;
    for (const auto& x : frontier) {
      for (const auto& p : principal) {
        Partition j = x.join(p);
        if (found.insert(j).second) next.push_back(std::move(j));
      }
    }
    frontier = std::move(next);
  }
  std::vector<Partition> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
    if (a.block_count() != b.block_count()) return a.block_count() > b.block_count();
    return a < b;
  });
  lattice_ = out;
  return out;
}

NilpotenceReport CommutatorLab::lower_central_series(int cap, int supernilpotence_cap) {
  const int n = alg_.size();
  const Partition one = Partition::total(n);
  NilpotenceReport r;
  r.series_cap = cap;
  r.supernilpotence_cap = supernilpotence_cap;
  r.budget = budget_;
  r.series.push_back(one);
  r.status = "inconclusive";
  // Commutators are monotone, so lower bounds on each step stay lower
  // bounds on the series; a bound that stabilizes above equality proves
  // non-nilpotence even from a truncated enumeration.
  for (int step = 1; step <= cap; ++step) {
    const Partition cur = r.series.back();
    if (cur.is_equality()) break;
    const Partition args[2] = {one, cur};
    const CommutatorBound next = commutator_bound(args);
    r.series_exact = r.series_exact && next.exact;
    r.series.push_back(next.value);
    if (next.value.is_equality()) {
      if (r.series_exact) {
        r.status = "nilpotent";
        r.nilpotency_class = step;
      }
      break;
    }
    if (next.value == cur) {
      r.status = "not nilpotent";
      break;
    }
  }
  if (n == 1 || r.series.back().is_equality()) {
    if (r.series_exact) {
      r.status = "nilpotent";
      r.nilpotency_class = static_cast<int>(r.series.size()) - 1;
    }
  }

  if (r.status == "not nilpotent") {
    r.supernilpotence_status = "not nilpotent";
  } else if (r.status == "inconclusive") {
    r.supernilpotence_status = "inconclusive";
  } else {
    r.supernilpotence_status = "exceeds cap";
    for (int k = 1; k <= supernilpotence_cap; ++k) {
      const std::vector<Partition> ones(static_cast<std::size_t>(k + 1), one);
      try {
        if (higher_commutator(ones, CommutatorMethod::AbsorbingGeneration).is_equality()) {
          r.supernilpotence_status = "degree";
          r.supernilpotence_degree = k;
          break;
        }
      } catch (const BudgetExceeded&) {
        r.supernilpotence_status = "inconclusive";
        break;
      }
    }
  }
  return r;
}

bool CommutatorLab::is_nilpotent() {
  if (!nilpotent_) {
    const int cap = static_cast<int>(congruence_lattice().size());
    const NilpotenceReport r = lower_central_series(cap, 0);
    if (r.status == "inconclusive") {
      throw BudgetExceeded("nilpotence undecided within budget of " + std::to_string(budget_) +
                           " tables");
    }
    nilpotent_ = r.status == "nilpotent";
  }
  return *nilpotent_;
}

bool CommutatorLab::centrality_check(const Partition& alpha) {
  const Partition args[2] = {alpha, Partition::total(alg_.size())};
  return higher_commutator(args, CommutatorMethod::AbsorbingGeneration).is_equality();
}

std::optional<NonabelianWitness> CommutatorLab::minimal_nonabelian_below(const Partition& beta,
                                                                         int cap) {
  if (!is_congruence(alg_, beta)) throw PreconditionError("not a congruence: " + to_string(beta));
  std::vector<Partition> nonabelian;
  for (const auto& a : congruence_lattice()) {
    if (!a.leq(beta) || a.is_equality()) continue;
    const Partition args[2] = {a, a};
    if (!higher_commutator(args, CommutatorMethod::AbsorbingGeneration).is_equality()) {
      nonabelian.push_back(a);
    }
  }
  for (const auto& a : nonabelian) {
    const bool minimal = std::none_of(nonabelian.begin(), nonabelian.end(), [&](const Partition& b) {
      return b != a && b.leq(a);
    });
    if (!minimal) continue;
    const Partition args[2] = {a, a};
    NonabelianWitness w{a, higher_commutator(args, CommutatorMethod::AbsorbingGeneration), 0};
    for (int k = 2; k <= cap; ++k) {
      const std::vector<Partition> alphas(static_cast<std::size_t>(k + 1), a);
      if (higher_commutator(alphas, CommutatorMethod::AbsorbingGeneration).is_equality()) {
        w.k = k;
        return w;
      }
    }
    throw Error("congruence " + to_string(a) + " is not supernilpotent within cap " +
                std::to_string(cap));
  }
  return std::nullopt;
}

Partition higher_commutator(const FiniteAlgebra& alg, std::span<const Partition> alphas,
                            CommutatorMethod method, std::size_t budget) {
  return CommutatorLab(alg, budget).higher_commutator(alphas, method);
}

NilpotenceReport lower_central_series(const FiniteAlgebra& alg, int cap, int supernilpotence_cap,
                                      std::size_t budget) {
  return CommutatorLab(alg, budget).lower_central_series(cap, supernilpotence_cap);
}

bool centrality_check(const FiniteAlgebra& alg, const Partition& alpha, std::size_t budget) {
  return CommutatorLab(alg, budget).centrality_check(alpha);
}

std::optional<NonabelianWitness> minimal_nonabelian_below(const FiniteAlgebra& alg,
                                                          const Partition& beta, int cap,
                                                          std::size_t budget) {
  return CommutatorLab(alg, budget).minimal_nonabelian_below(beta, cap);
}

}  // namespace nildual
