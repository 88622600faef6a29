#include <gtest/gtest.h>

#include <random>

#include "nildual/cad.hpp"
#include "nildual/error.hpp"
#include "nildual/z4.hpp"
#include "oracles.hpp"

using namespace nildual;

namespace {

std::uint64_t mask_of(const RelationSet& r) {
  std::uint64_t m = 0;
  for (Code c : r.members()) m |= std::uint64_t{1} << c;
  return m;
}

std::vector<oracle::Vec> tables(const CloneSlice& s) {
  std::vector<oracle::Vec> out;
  for (const auto& f : s.members()) out.emplace_back(f.values().begin(), f.values().end());
  return out;
}

PartialFunction restrict(const FunctionTable& f, const RelationSet& d) {
  std::vector<Elem> v;
  for (Code c : d.members()) v.push_back(f.at(c));
  return PartialFunction(d, v);
}

}  // namespace

TEST(CadEnumerate, EqualsGaloisClosedFamily) {
  for (const char* name : {"z4", "klein", "semilattice2", "z4_trunc2"}) {
    const auto alg = oracle::load(name);
    for (int k = 1; k <= 2; ++k) {
      const auto slice = clone_upto(alg, k, CloneKind::Term);
      const auto doms = cad_enumerate(slice);
      std::set<std::uint64_t> got;
      for (const auto& d : doms) {
        EXPECT_TRUE(d.witness_matches());
        EXPECT_FALSE(d.members.empty());
        got.insert(mask_of(d.members));
      }
      EXPECT_EQ(got.size(), doms.size());
      EXPECT_EQ(got, oracle::galois_cad_family(tables(slice), oracle::ipow(static_cast<std::size_t>(alg.size()), k)))
          << name << " k=" << k;
    }
  }
}

TEST(CadEnumerate, KnownSets) {
  const auto slice = clone_upto(z4_algebra(2), 1, CloneKind::Term);
  const auto doms = cad_enumerate(slice);
  bool has_even = false;
  for (const auto& d : doms) has_even = has_even || d.members == RelationSet(4, 1, {0, 2});
  EXPECT_TRUE(has_even);
  EXPECT_EQ(doms.back().members.size(), 4u);
  EXPECT_THROW(cad_enumerate(clone_upto(z4_algebra(2), 2, CloneKind::Term), 3), BudgetExceeded);
}

TEST(Preserves, Examples) {
  const auto alg = z4_algebra(2);
  const RelationSet even(4, 1, {0, 2});
  const PartialFunction bad(even, {0, 1});
  // The unary term clone as a subuniverse of A^4 (rows 0..3).
  std::vector<std::vector<Elem>> rows;
  const auto clo1_slice = clone_upto(alg, 1, CloneKind::Term);
  for (const auto& f : clo1_slice.members()) rows.emplace_back(f.values().begin(), f.values().end());
  const auto clo1 = RelationSet::from_tuples(4, 4, rows);
  EXPECT_FALSE(preserves(bad, clo1));
  EXPECT_FALSE(preserves_all_subpowers(alg, bad, 4));
  EXPECT_FALSE(extends_to_term(bad, clone_upto(alg, 1, CloneKind::Term)).has_value());

  const PartialFunction ok(even, {0, 2});
  EXPECT_TRUE(preserves(ok, clo1));
  EXPECT_TRUE(extends_to_term(ok, clone_upto(alg, 1, CloneKind::Term)).has_value());

  // No row combination lands in the domain {1}.
  const PartialFunction vac(RelationSet(4, 1, {1}), {3});
  EXPECT_TRUE(preserves(vac, RelationSet(4, 2, {0})));
}

TEST(PreservationScanner, MatchesLiteralSubpowerCheck) {
  // Every function on each small c.a.d. domain, checked literally, against
  // the scanner's list.
  const auto alg = z4_algebra(2);
  const auto slice = clone_upto(alg, 1, CloneKind::Term);
  CandidateSource src;
  src.power = 4;
  for (const auto& d : cad_enumerate(slice)) {
    std::set<std::vector<Elem>> scanned;
    PreservationScanner sc(alg, d.members, slice, src);
    sc.scan([&](const PartialFunction& f) {
      scanned.emplace(f.values().begin(), f.values().end());
      return true;
    });
    std::set<std::vector<Elem>> literal;
    std::vector<Elem> v(d.members.size(), 0);
    do {
      if (preserves_all_subpowers(alg, PartialFunction(d.members, v), 4)) literal.insert(v);
    } while (next_tuple(v, 4));
    EXPECT_EQ(scanned, literal) << to_string(d.members);
  }
}

TEST(Preserves, TermRestrictionsPreserveSubuniverses) {
  std::mt19937_64 rng(3);
  for (const char* name : {"z4", "klein", "z6", "semilattice2", "z4_trunc2"}) {
    const auto alg = oracle::load(name);
    for (int k = 1; k <= 2; ++k) {
      const auto slice = clone_upto(alg, k, CloneKind::Term);
      const auto doms = cad_enumerate(slice);
      for (int trial = 0; trial < 5; ++trial) {
        const auto& f = slice[rng() % slice.size()];
        const auto& d = doms[rng() % doms.size()].members;
        const int n = 1 + static_cast<int>(rng() % 3);
        std::vector<std::vector<Elem>> gens(2, std::vector<Elem>(static_cast<std::size_t>(n)));
        for (auto& g : gens)
          for (auto& x : g) x = static_cast<Elem>(rng() % static_cast<unsigned>(alg.size()));
        const auto r = subuniverse_generate(alg, n, RelationSet::from_tuples(alg.size(), n, gens));
        EXPECT_TRUE(preserves(restrict(f, d), r)) << name;
      }
    }
  }
}

TEST(FiniteRelatednessScan, CertifiesAbelianGroupAndTruncation) {
  CandidateSource src;
  src.power = 4;
  const auto z4 = finite_relatedness_scan(oracle::load("z4"), src, 2);
  EXPECT_EQ(z4.status, "certified");
  EXPECT_EQ(z4.scanned_arity, 2);
  ASSERT_EQ(z4.per_arity.size(), 2u);
  const auto tr = finite_relatedness_scan(z4_algebra(2), src, 2);
  EXPECT_EQ(tr.status, "certified");
  EXPECT_EQ(tr.per_arity[1].preserving, 1280u);
}

TEST(FiniteRelatednessScan, EmptyCandidatesGiveVerifiedCounterexample) {
  const auto alg = oracle::load("z4");
  const auto v = finite_relatedness_scan(alg, CandidateSource{}, 1);
  ASSERT_EQ(v.status, "counterexample");
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_FALSE(extends_to_term(*v.counterexample, clone_upto(alg, v.counterexample->arity(), CloneKind::Term)));
}

TEST(FiniteRelatednessScan, BudgetGivesInconclusive) {
  CandidateSource src;
  src.power = 2;
  ScanOptions opts;
  opts.clone_budget = 10;
  const auto v = finite_relatedness_scan(z4_algebra(2), src, 2, opts);
  EXPECT_EQ(v.status, "inconclusive");
  EXPECT_NE(v.evidence.find("arity"), std::string::npos);
}

TEST(FiniteRelatednessScan, RejectsNonSubuniverseCandidates) {
  CandidateSource src;
  src.relations.push_back(RelationSet(4, 1, {1}));
  EXPECT_THROW(finite_relatedness_scan(oracle::load("z4"), src, 1), InputError);
}
