#include <gtest/gtest.h>

#include "nildual/cad.hpp"
#include "nildual/clone.hpp"
#include "nildual/error.hpp"
#include "nildual/z4.hpp"
#include "oracles.hpp"

using namespace nildual;

namespace {

FunctionTable z4_fn(int k, int (*fn)(std::span<const Elem>)) {
  return FunctionTable::from_fn(4, k, [&](std::span<const Elem> t) { return ((fn(t) % 4) + 4) % 4; });
}

RelationSet set_of(int k, const std::vector<std::vector<Elem>>& tuples) {
  return RelationSet::from_tuples(4, k, tuples);
}

}  // namespace

TEST(Z4Algebra, SignatureAndPreconditions) {
  const auto a = z4_algebra(3);
  ASSERT_EQ(a.ops().size(), 4u);
  EXPECT_EQ(a.op("dbl3").table({1, 3, 3}), 2);
  EXPECT_EQ(a.op("one").table({2}), 1);
  EXPECT_THROW(z4_algebra(1), PreconditionError);
}

TEST(Z4NormalForm, Examples) {
  const auto xy = z4_term_normal_form(z4_fn(2, [](std::span<const Elem> t) { return 2 * t[0] * t[1]; }));
  ASSERT_TRUE(xy.has_value());
  EXPECT_EQ(xy->constant, 0);
  EXPECT_EQ(xy->lambdas, (std::vector<Elem>{0, 0}));
  EXPECT_EQ(xy->cosets, (std::vector<std::vector<Elem>>{{1, 1}}));
  EXPECT_EQ(xy->degree(), 2);

  EXPECT_FALSE(z4_term_normal_form(z4_fn(1, [](std::span<const Elem> t) { return t[0] * t[0] * t[0]; })));

  const auto id = z4_term_normal_form(FunctionTable::projection(4, 1, 0));
  ASSERT_TRUE(id.has_value());
  EXPECT_EQ(id->lambdas, (std::vector<Elem>{1}));
  EXPECT_TRUE(id->cosets.empty());
}

TEST(Z4NormalForm, EveryTermHasOneAndTablesRoundTrip) {
  for (int m = 2; m <= 3; ++m) {
    for (int k = 1; k <= 3; ++k) {
      const auto slice = clone_upto(z4_algebra(m), k, CloneKind::Term);
      const auto forms = z4_normal_forms(k, m);
      EXPECT_EQ(forms.size(), oracle::z4_form_count(k, m)) << m << " " << k;
      EXPECT_EQ(slice.size(), forms.size()) << m << " " << k;
      for (const auto& f : slice.members()) {
        const auto nf = z4_term_normal_form(f);
        ASSERT_TRUE(nf.has_value());
        EXPECT_LE(nf->degree(), m);
        EXPECT_EQ(nf->table(), f);
      }
    }
  }
}

TEST(Z4NormalForm, RejectsNonTerms) {
  // x -> x^2 is 1 on odds and 0 on evens: not affine mod the coset part.
  EXPECT_FALSE(z4_term_normal_form(z4_fn(1, [](std::span<const Elem> t) { return t[0] * t[0]; })));
  // 3 at (1,1), 0 elsewhere.
  EXPECT_FALSE(z4_term_normal_form(z4_fn(2, [](std::span<const Elem> t) { return t[0] == 1 && t[1] == 1 ? 3 : 0; })));
}

TEST(Z4CadClassify, Examples) {
  const auto even2 = set_of(2, {{0, 0}, {0, 2}, {2, 0}, {2, 2}});
  const auto a = z4_cad_classify(even2);
  ASSERT_TRUE(a.has_value());
  EXPECT_EQ(a->reps.size(), 1u);
  EXPECT_EQ(a->members(), even2);

  const auto odd = z4_cad_classify(set_of(1, {{1}, {3}}));
  ASSERT_TRUE(odd.has_value());
  EXPECT_EQ(odd->subgroup, (std::vector<Code>{0, 2}));
  EXPECT_EQ(odd->shift, (std::vector<Elem>{1}));

  EXPECT_FALSE(z4_cad_classify(set_of(1, {{0}, {1}})).has_value());
  EXPECT_TRUE(z4_cad_classify(set_of(2, {{3, 1}})).has_value());
}

TEST(Z4CadClassify, AgreesWithGaloisOracleOnEverySubset) {
  for (int k = 1; k <= 2; ++k) {
    const std::size_t points = oracle::ipow(4, k);
    const auto slice = clone_upto(z4_algebra(std::max(2, k)), k, CloneKind::Term);
    std::vector<oracle::Vec> terms;
    for (const auto& f : slice.members()) terms.emplace_back(f.values().begin(), f.values().end());
    const auto family = oracle::galois_cad_family(terms, points);
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << points); ++m) {
      std::vector<Code> members;
      for (std::size_t p = 0; p < points; ++p)
        if (m & (std::uint64_t{1} << p)) members.push_back(p);
      const RelationSet d(4, k, members);
      EXPECT_EQ(z4_cad_classify(d).has_value(), family.count(m) > 0) << to_string(d);
    }
  }
}

TEST(Z4CadDomains, EqualEnumeratedFamily) {
  for (int k = 1; k <= 2; ++k) {
    const auto doms = z4_cad_domains(k);
    const auto en = cad_enumerate(clone_upto(z4_algebra(2), k, CloneKind::Term));
    ASSERT_EQ(doms.size(), en.size());
    for (std::size_t i = 0; i < doms.size(); ++i) EXPECT_EQ(doms[i], en[i].members);
  }
  EXPECT_EQ(z4_cad_domains(1).size(), 7u);
}

TEST(Z4PreservesAllSubA4, Examples) {
  const RelationSet even(4, 1, {0, 2});
  EXPECT_FALSE(z4_preserves_all_sub_A4(PartialFunction(even, {0, 1})));
  const auto sq = set_of(2, {{0, 0}, {0, 2}, {2, 0}, {2, 2}});
  std::vector<Elem> plus;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const auto t = sq.tuple(i);
    plus.push_back(static_cast<Elem>((t[0] + t[1]) % 4));
  }
  EXPECT_TRUE(z4_preserves_all_sub_A4(PartialFunction(sq, plus)));
}

TEST(Z4Extend, BuildsAgreeingTerm) {
  // 2xy + x + 3 on the odd residues in the first coordinate.
  const auto d = set_of(2, {{1, 0}, {1, 1}, {1, 2}, {1, 3}, {3, 0}, {3, 1}, {3, 2}, {3, 3}});
  ASSERT_TRUE(z4_cad_classify(d).has_value());
  std::vector<Elem> v;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto t = d.tuple(i);
    v.push_back(static_cast<Elem>((2 * t[0] * t[1] + t[0] + 3) % 4));
  }
  const auto ext = z4_extend(PartialFunction(d, v));
  EXPECT_TRUE(ext.agrees);
  EXPECT_TRUE(ext.hom_identity);
  EXPECT_TRUE(ext.h_dichotomy);
  const auto t = ext.form.table();
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(t(d.tuple(i)), v[i]);
  EXPECT_THROW(z4_extend(PartialFunction(RelationSet(4, 1, {0, 1}), {0, 0})), PreconditionError);
}

TEST(Z4VerifyDuality, ArityOneAndTwo) {
  const auto r1 = z4_verify_duality(1);
  EXPECT_TRUE(r1.ok());
  EXPECT_EQ(r1.domains, 7u);
  EXPECT_EQ(r1.preserving, r1.extended);
  const auto r2 = z4_verify_duality(2);
  EXPECT_TRUE(r2.ok());
  EXPECT_EQ(r2.domains, 79u);
  EXPECT_EQ(r2.preserving, r2.extended);
  EXPECT_GT(r2.pruned, 0u);
}

TEST(Z4VerifyDuality, SamplingIsLabeledAndSeeded) {
  Z4VerifyOptions opts;
  opts.sample = 5;
  opts.seed = 9;
  const auto a = z4_verify_duality(2, opts);
  const auto b = z4_verify_duality(2, opts);
  EXPECT_TRUE(a.sampled);
  EXPECT_TRUE(a.ok());
  EXPECT_EQ(a.preserving, b.preserving);
  EXPECT_EQ(a.nodes, b.nodes);
}
