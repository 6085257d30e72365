#include <gtest/gtest.h>

#include "causalkit/catalog.hpp"
#include "causalkit/error.hpp"
#include "causalkit/oracle.hpp"

using namespace causalkit;
using oracle::Predicate;

namespace {

const Predicate kSpacePredicates[] = {Predicate::kIndependence, Predicate::kSource, Predicate::kEffect};
const Predicate kMapPredicates[] = {Predicate::kAdmissible, Predicate::kDistributional, Predicate::kInterventional,
                                    Predicate::kInterventionalAllEvents};

void expect_agreement(const FiniteCausalSpace& c) {
  const auto axioms = oracle::full_event_check(Predicate::kAxioms, c);
  EXPECT_TRUE(axioms.passed) << render(axioms);
  const auto subsets = canonical_subsets(c.space());
  for (CoordSet u : subsets) {
    for (CoordSet v : subsets) {
      for (Predicate p : kSpacePredicates) {
        const auto r = oracle::full_event_check(p, c, {u, v, c.space().all() - v});
        EXPECT_TRUE(r.passed) << render(r);
      }
    }
  }
}

void expect_agreement(const Transformation& t) {
  for (Predicate p : kMapPredicates) {
    const auto r = oracle::full_event_check(p, t);
    EXPECT_TRUE(r.passed) << render(r);
  }
}

}  // namespace

TEST(Oracle, AgreesOnCatalogSpaces) {
  expect_agreement(compile(catalog::xor_scm()));
  expect_agreement(compile(catalog::parity_scm()));
  expect_agreement(compile(catalog::fork_scm()));
  expect_agreement(compile(catalog::collider_scm()));
  expect_agreement(compile(catalog::composition_scm()));
}

TEST(Oracle, EffectVerdictsOnXorAndParity) {
  const auto x = compile(catalog::xor_scm());
  const auto r = oracle::full_event_check(Predicate::kEffect, x, {x.space().subset({"X"}), x.space().subset({"Y"})});
  EXPECT_EQ(r.message, "generator and enumeration agree: Active");
  const auto p = compile(catalog::parity_scm());
  const auto d = oracle::full_event_check(Predicate::kEffect, p, {p.space().subset({"X"}), p.space().subset({"Y"})});
  EXPECT_EQ(d.message, "generator and enumeration agree: Dormant");
}

TEST(Oracle, AgreesOnInclusion) {
  const auto scm = catalog::composition_scm();
  expect_agreement(inclusion_transform(scm, {"X1", "Y"}));
}

TEST(Oracle, AgreesOnSmallHierarchies) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto h = oracle::random_hierarchy(seed, 12);
    const auto t = h.first();
    expect_agreement(t);
    expect_agreement(h.fine);
    expect_agreement(h.second(t.target()));
  }
}

TEST(Oracle, AgreesOnFailingTransformations) {
  const auto h = oracle::random_hierarchy(3, 12);
  const auto t = h.first();
  // The independence mechanism of the same measure is generally a wrong
  // target; both routes have to say so in the same way.
  const auto wrong = t.with_target(independent_mechanism(t.target().measure()));
  expect_agreement(wrong);
  const auto x = compile(catalog::xor_scm());
  const auto flipped = Transformation::deterministic(x, x, {3, 2, 1, 0}, IndexMap::identity(x.space()));
  expect_agreement(flipped);
  const auto c = compile(catalog::collider_scm());
  expect_agreement(Transformation::deterministic(c, c, {1, 0, 3, 2, 5, 4, 7, 6}, IndexMap::identity(c.space())));
}

TEST(Oracle, RandomSpacesAgree) {
  for (std::uint64_t i = 0; i < 30; ++i) {
    oracle::Rng rng(i);
    const auto c = oracle::random_space(oracle::trial_seed(99, i));
    EXPECT_TRUE(validate_causal_space(c).passed);
    const auto u = CoordSet(rng.next() & c.space().all().bits());
    const auto v = CoordSet(rng.next() & c.space().all().bits());
    for (Predicate p : kSpacePredicates) {
      const auto r = oracle::full_event_check(p, c, {u, v, c.space().all() - v});
      EXPECT_TRUE(r.passed) << render(r);
    }
  }
}

TEST(Oracle, PerturbedSpacesFailBothRoutes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto one = oracle::random_space(seed, {}, oracle::Perturbation::kAxiomOne);
    const auto v1 = validate_causal_space(one);
    ASSERT_FALSE(v1.passed);
    EXPECT_EQ(v1.first_failure()->check, "axiom (i): K_empty = P");
    ASSERT_TRUE(v1.first_failure()->witness.has_value());
    const auto r1 = oracle::full_event_check(Predicate::kAxioms, one);
    EXPECT_TRUE(r1.passed) << render(r1);
    EXPECT_EQ(r1.message, "generator and enumeration agree: fails");

    const auto two = oracle::random_space(seed, {}, oracle::Perturbation::kAxiomTwo);
    const auto v2 = validate_causal_space(two);
    ASSERT_FALSE(v2.passed);
    EXPECT_EQ(v2.first_failure()->check, "axiom (ii): interventional determinism");
    EXPECT_TRUE(oracle::full_event_check(Predicate::kAxioms, two).passed);
  }
}

TEST(Oracle, RejectsLargeSpaces) {
  const auto big = compile(catalog::abstraction_scm());
  EXPECT_THROW(oracle::full_event_check(Predicate::kAxioms, big), CapExceeded);
  EXPECT_THROW(oracle::full_event_check(Predicate::kAdmissible, compile(catalog::xor_scm())), InvalidArgument);
}

TEST(Oracle, PredicateNamesRoundTrip) {
  for (Predicate p : {Predicate::kAxioms, Predicate::kAdmissible, Predicate::kDistributional,
                      Predicate::kInterventional, Predicate::kInterventionalAllEvents, Predicate::kIndependence,
                      Predicate::kSource, Predicate::kEffect}) {
    EXPECT_EQ(oracle::parse_predicate(oracle::to_string(p)), p);
  }
  EXPECT_THROW(oracle::parse_predicate("nonsense"), InvalidArgument);
}

TEST(Random, SeedsReproduce) {
  EXPECT_TRUE(same_causal_space(oracle::random_space(7), oracle::random_space(7)));
  EXPECT_NE(oracle::trial_seed(1, 0), oracle::trial_seed(1, 1));
  oracle::Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
  const auto h1 = oracle::random_hierarchy(11);
  const auto h2 = oracle::random_hierarchy(11);
  EXPECT_EQ(h1.f1, h2.f1);
  EXPECT_EQ(h1.f2, h2.f2);
  EXPECT_TRUE(same_causal_space(h1.fine, h2.fine));
}

TEST(Random, ShapesAreRespected) {
  oracle::RandomShape shape;
  shape.max_outcomes = 8;
  shape.max_variables = 5;
  shape.full_support = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto scm = oracle::random_scm(seed, shape);
    EXPECT_LE(scm.space().outcome_count(), 8u);
    for (const auto& v : scm.variables()) EXPECT_EQ(v.noise.size(), v.cardinality);
  }
}

TEST(Random, HierarchiesAreAbstractions) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = oracle::random_hierarchy(seed);
    EXPECT_LE(h.fine.space().outcome_count(), 64u);
    const auto t1 = h.first();
    const auto t2 = h.second(t1.target());
    EXPECT_TRUE(is_perfect_abstraction(t1)) << seed;
    EXPECT_TRUE(is_perfect_abstraction(t2)) << seed;
  }
}

class LemmaSuite : public ::testing::TestWithParam<std::string> {};

TEST_P(LemmaSuite, HoldsOnRandomInstances) {
  const auto r = oracle::lemma_suite(GetParam(), 20, 20240611);
  EXPECT_TRUE(r.passed) << render(r);
  EXPECT_NE(r.message.find("20 trials"), std::string::npos);
}

INSTANTIATE_TEST_SUITE_P(Oracle, LemmaSuite, ::testing::ValuesIn(oracle::lemma_ids()),
                         [](const auto& info) {
                           std::string name = info.param;
                           for (auto& ch : name) {
                             if (ch == '-') ch = '_';
                           }
                           return name;
                         });

TEST(Lemma, UnknownIdThrows) { EXPECT_THROW(oracle::lemma_suite("nope", 1, 0), InvalidArgument); }
