#include <gtest/gtest.h>

#include <thread>

#include "causalkit/catalog.hpp"
#include "causalkit/error.hpp"
#include "support/scm_oracle.hpp"

using namespace causalkit;

namespace {

Event y_is(const CoordinateSpace& s, const std::string& name, std::size_t v) {
  return Event::cylinder(s, s.subset({name}), v);
}

std::map<CoordSet, StochKernel> tabulate(const FiniteCausalSpace& c) { return c.kernels(); }

FiniteCausalSpace hard(const CoordinateSpace& space, CoordSet u, std::size_t sub_value) {
  return observational_mechanism(FiniteMeasure::dirac(space.restrict(u), sub_value));
}

}  // namespace

TEST(CausalSpace, XorCompiledValues) {
  const auto c = compile(catalog::xor_scm());
  const auto& s = c.space();
  EXPECT_TRUE(validate_causal_space(c).passed);
  EXPECT_EQ(c.measure().weight(s.encode(std::vector<std::size_t>{1, 1})), Rational(3, 8));
  EXPECT_EQ(c.kernel(s.subset({"X"})).evaluate(0, y_is(s, "Y", 1)), Rational(1, 4));
  EXPECT_EQ(project(c.measure(), s.subset({"Y"})).weights(),
            (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
}

TEST(CausalSpace, AxiomOneViolationReported) {
  const auto c = compile(catalog::xor_scm());
  auto k = tabulate(c);
  const FiniteMeasure wrong(c.space(), {Rational(1, 8), Rational(3, 8), Rational(3, 8), Rational(1, 8)});
  k.erase(CoordSet{});
  k.emplace(CoordSet{}, StochKernel::constant(c.space().restrict(CoordSet{}), wrong));
  const auto report = validate_causal_space(FiniteCausalSpace::tabulated(c.measure(), k));
  ASSERT_FALSE(report.passed);
  EXPECT_EQ(report.first_failure()->check, "axiom (i): K_empty = P");
  EXPECT_EQ(report.first_failure()->witness->lhs, "1/8");
  EXPECT_EQ(report.first_failure()->witness->rhs, "3/8");
}

TEST(CausalSpace, AxiomTwoViolationReported) {
  const auto c = compile(catalog::xor_scm());
  const auto& s = c.space();
  auto k = tabulate(c);
  const CoordSet x = s.subset({"X"});
  auto rows = k.at(x).rows();
  // Row x=1 leaks 1/4 to the outcome (X=0, Y=0).
  rows[1] = {{0, Rational(1, 4)}, {2, Rational(1, 4)}, {3, Rational(1, 2)}};
  k.erase(x);
  k.emplace(x, StochKernel(s.restrict(x), s, rows));
  const auto report = validate_causal_space(FiniteCausalSpace::tabulated(c.measure(), k));
  ASSERT_FALSE(report.passed);
  const auto* f = report.first_failure();
  EXPECT_EQ(f->check, "axiom (ii): interventional determinism");
  EXPECT_EQ(f->witness->subset, std::vector<std::string>{"X"});
  EXPECT_EQ(f->witness->omega, "(X=1)");
  EXPECT_EQ(f->witness->lhs, "3/4");
}

TEST(CausalSpace, TabulatedRequiresEveryKernel) {
  const auto c = compile(catalog::xor_scm());
  auto k = tabulate(c);
  k.erase(c.space().subset({"Y"}));
  EXPECT_THROW(FiniteCausalSpace::tabulated(c.measure(), k), InvalidArgument);
}

TEST(Intervene, HardInterventionOnXor) {
  const auto scm = catalog::xor_scm();
  const auto c = compile(scm);
  const auto& s = c.space();
  const CoordSet x = s.subset({"X"});
  const auto done = intervene(c, x, hard(s, x, 1));
  EXPECT_TRUE(validate_causal_space(done).passed);
  EXPECT_EQ(done.measure().probability(y_is(s, "Y", 1)), Rational(3, 4));
  // Independent route: enumerate the noise of the mutilated SCM.
  EXPECT_EQ(done.measure().weights(), oracle_support::enumerate_law(scm, {{"X", 1}}));
}

TEST(Intervene, EmptyInterventionIsIdentity) {
  const auto c = compile(catalog::mediator_chain_scm());
  const auto done = intervene(c, CoordSet{}, one_point_space());
  EXPECT_TRUE(same_causal_space(c, done));
}

TEST(Intervene, ObservationalInterventionKeepsP) {
  const auto c = compile(catalog::xor_scm());
  const CoordSet x = c.space().subset({"X"});
  ASSERT_TRUE(is_source(c, x, c.space().all()).passed);
  const auto done = intervene(c, x, project(c.measure(), x), marginalize(c, x));
  EXPECT_EQ(done.measure(), c.measure());
}

TEST(Intervene, RejectsInvalidMechanism) {
  const auto c = compile(catalog::xor_scm());
  const CoordSet x = c.space().subset({"X"});
  const auto sx = c.space().restrict(x);
  const StochKernel swap(sx, sx, {{{1, Rational(1)}}, {{0, Rational(1)}}});
  const auto bad = FiniteCausalSpace::tabulated(
      FiniteMeasure::uniform(sx), {{CoordSet{}, StochKernel::constant(sx.restrict(CoordSet{}), FiniteMeasure::uniform(sx))},
                                   {CoordSet(1), swap}});
  EXPECT_THROW(intervene(c, x, bad), InvalidArgument);
  EXPECT_THROW(intervene(c, x, one_point_space()), InvalidArgument);
}

TEST(Intervene, MatchesPinnedScm) {
  const auto scm = catalog::mediator_chain_scm();
  const auto c = compile(scm);
  const auto& s = c.space();
  const CoordSet u = s.subset({"X", "H"});
  for (std::size_t r = 0; r < 4; ++r) {
    const auto done = intervene(c, u, hard(s, u, r));
    const std::size_t h = s.restrict(u).digit(r, 0);
    const std::size_t xv = s.restrict(u).digit(r, 1);
    const auto pinned = compile(scm.pinned({{"H", h}, {"X", xv}}));
    EXPECT_EQ(done.measure(), pinned.measure());
    for (CoordSet sub : canonical_subsets(s)) {
      EXPECT_EQ(done.kernel(sub).rows(), pinned.kernel(sub).rows());
    }
  }
}

TEST(Effects, XorActive) {
  const auto c = compile(catalog::xor_scm());
  const auto& s = c.space();
  const auto e = classify_effect(c, s.subset({"X"}), y_is(s, "Y", 1));
  EXPECT_EQ(e.tag, Effect::kActive);
  ASSERT_TRUE(e.witness);
  EXPECT_EQ(e.witness->omega, "(X=0)");
  EXPECT_EQ(e.witness->lhs, "1/4");
  EXPECT_EQ(e.witness->rhs, "1/2");
}

TEST(Effects, XorNoEffectOfYOnX) {
  const auto c = compile(catalog::xor_scm());
  const auto e = classify_effect(c, c.space().subset({"Y"}), c.space().subset({"X"}));
  EXPECT_EQ(e.tag, Effect::kNone);
  EXPECT_FALSE(e.witness);
}

TEST(Effects, ParityDormant) {
  const auto c = compile(catalog::parity_scm());
  const auto& s = c.space();
  const auto e = classify_effect(c, s.subset({"X"}), y_is(s, "Y", 1));
  EXPECT_EQ(e.tag, Effect::kDormant);
  ASSERT_TRUE(e.witness);
  EXPECT_EQ(e.witness->subset, (std::vector<std::string>{"X", "Z"}));
  EXPECT_EQ(e.witness->omega, "(X=0, Z=0)");
  EXPECT_EQ(e.witness->lhs, "0");
  EXPECT_EQ(e.witness->rhs, "1/2");
}

TEST(Effects, EmptyInterventionHasNoEffect) {
  const auto c = compile(catalog::parity_scm());
  for (const auto& a : atoms(c.space(), c.space().all())) {
    EXPECT_EQ(classify_effect(c, CoordSet{}, a).tag, Effect::kNone);
  }
}

TEST(Sources, XorAndParity) {
  const auto x = compile(catalog::xor_scm());
  EXPECT_TRUE(is_source(x, x.space().subset({"X"}), x.space().subset({"Y"})).passed);
  EXPECT_FALSE(is_source(x, x.space().subset({"Y"}), x.space().subset({"X"})).passed);
  const auto p = compile(catalog::parity_scm());
  EXPECT_TRUE(is_source(p, p.space().subset({"X"}), p.space().subset({"Y"})).passed);
}

TEST(Sources, NullAtomsAreExemptAndListed) {
  // Y = X with X fair, plus a constant Z: the atom Z=1 is P-null.
  const FiniteSCM scm({{"X", 2, {}, {Rational(1, 2), Rational(1, 2)}, {0, 1}},
                       {"Z", 2, {}, {Rational(1)}, {0}},
                       {"Y", 2, {"X"}, {Rational(1)}, {0, 1}}});
  const auto c = compile(scm);
  const auto report = is_source(c, c.space().subset({"Z"}), c.space().all());
  EXPECT_TRUE(report.passed);
  ASSERT_EQ(report.notes.size(), 1u);
  EXPECT_NE(report.notes[0].find("Z=1"), std::string::npos);
}

TEST(Independence, ForkAndTrivialEvents) {
  const auto c = compile(catalog::fork_scm());
  const auto& s = c.space();
  const CoordSet x = s.subset({"X"});
  EXPECT_TRUE(causally_independent(c, x, y_is(s, "Y1", 1), y_is(s, "Y2", 1)));
  EXPECT_TRUE(causally_independent(c, x, s.subset({"Y1"}), s.subset({"Y2"})));
  EXPECT_TRUE(causally_independent(c, x, Event::full(s), y_is(s, "Y2", 1)));
  // Pinning Y1 as well still leaves Y2 free of it.
  EXPECT_TRUE(causally_independent(c, s.subset({"X", "Y1"}), s.subset({"Y1"}), s.subset({"Y2"})));
  // Y1 is never independent of itself unless it is pinned.
  EXPECT_FALSE(causally_independent(c, x, y_is(s, "Y1", 1), y_is(s, "Y1", 1)));
}

TEST(Independence, ColliderCausalButNotConditional) {
  const auto c = compile(catalog::collider_scm());
  const auto& s = c.space();
  const Event a = y_is(s, "X1", 1);
  const Event b = y_is(s, "X2", 1);
  EXPECT_TRUE(causally_independent(c, s.subset({"Y"}), a, b));
  // Conditional independence given Y=0 fails: P(a n b | Y=0) = 1/2, P(a|Y=0) P(b|Y=0) = 1/4.
  const Event y0 = y_is(s, "Y", 0);
  const auto& p = c.measure();
  const Rational py = p.probability(y0);
  EXPECT_EQ(p.probability(a & b & y0) / py, Rational(1, 2));
  EXPECT_EQ((p.probability(a & y0) / py) * (p.probability(b & y0) / py), Rational(1, 4));
}

TEST(Product, WithOnePointIsSameSpace) {
  const auto c = compile(catalog::xor_scm());
  EXPECT_TRUE(same_causal_space(product(c, one_point_space()), c));
}

TEST(Product, TwoXorSpaces) {
  const auto a = compile(catalog::xor_scm());
  const auto b = rename(a, {{"X", "X2"}, {"Y", "Y2"}});
  const auto c = product(a, b);
  const auto& s = c.space();
  EXPECT_TRUE(validate_causal_space(c).passed);
  EXPECT_EQ(c.measure().weight(s.encode(std::vector<std::size_t>{1, 1, 0, 0})),
            Rational(3, 8) * Rational(3, 8));
  const CoordSet first = s.subset({"X", "Y"});
  const CoordSet second = s.subset({"X2", "Y2"});
  EXPECT_EQ(classify_effect(c, first, second).tag, Effect::kNone);
  EXPECT_EQ(classify_effect(c, second, first).tag, Effect::kNone);
  EXPECT_TRUE(is_source(c, first, second).passed);
  EXPECT_TRUE(is_source(c, second, first).passed);
  EXPECT_THROW(product(a, a), InvalidArgument);
}

TEST(CausalSpace, ConcurrentKernelAccess) {
  const auto c = compile(catalog::mediator_chain_scm());
  const auto subsets = canonical_subsets(c.space());
  std::vector<std::thread> threads;
  std::vector<int> ok(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int rep = 0; rep < 20; ++rep) {
        for (std::size_t i = 0; i < subsets.size(); ++i) {
          const auto& k = c.kernel(subsets[(i + t * 3) % subsets.size()]);
          ok[t] += k.row_count() > 0 ? 1 : 0;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  for (int v : ok) EXPECT_EQ(v, static_cast<int>(20 * subsets.size()));
  EXPECT_TRUE(validate_causal_space(c).passed);
}

TEST(CanonicalOrder, SizeThenNames) {
  const CoordinateSpace s({{"Z", 2}, {"A", 2}, {"M", 2}});
  const auto order = canonical_subsets(s);
  ASSERT_EQ(order.size(), 8u);
  EXPECT_TRUE(order[0].empty());
  EXPECT_EQ(s.names_of(order[1]), std::vector<std::string>{"A"});
  EXPECT_EQ(s.names_of(order[2]), std::vector<std::string>{"M"});
  EXPECT_EQ(s.names_of(order[3]), std::vector<std::string>{"Z"});
  EXPECT_EQ(order[7], s.all());
}
