#include <gtest/gtest.h>

#include "causalkit/catalog.hpp"
#include "causalkit/error.hpp"

using namespace causalkit;

namespace {

using Digits = std::vector<std::size_t>;

struct Merge {
  FiniteCausalSpace source;
  CoordinateSpace target;
  std::vector<std::size_t> f;
  IndexMap rho;
};

// XOR space, f(x, y) = x onto a single coordinate X, rho(X) = rho(Y) = X.
Merge xor_merge() {
  const auto c = compile(catalog::xor_scm());
  CoordinateSpace target({{"X", 2}});
  auto f = tabulate_map(c.space(), target, [](const Digits& d) { return Digits{d[0]}; });
  IndexMap rho(c.space(), target, {{"X", "X"}, {"Y", "X"}});
  return {c, target, std::move(f), std::move(rho)};
}

// Parity space, f(x, z, y) = (x xor z, y), rho(X) = rho(Z) = W, rho(Y) = Y.
Merge parity_merge() {
  const auto c = compile(catalog::parity_scm());
  CoordinateSpace target({{"W", 2}, {"Y", 2}});
  auto f = tabulate_map(c.space(), target, [](const Digits& d) { return Digits{d[0] ^ d[1], d[2]}; });
  IndexMap rho(c.space(), target, {{"X", "W"}, {"Z", "W"}, {"Y", "Y"}});
  return {c, target, std::move(f), std::move(rho)};
}

}  // namespace

TEST(IndexMap, ImagePreimageAndChaining) {
  const CoordinateSpace a({{"X1", 2}, {"X2", 2}, {"Y", 2}});
  const CoordinateSpace b({{"X", 3}, {"Y", 2}});
  const IndexMap rho(a, b, {{"X1", "X"}, {"X2", "X"}, {"Y", "Y"}});
  EXPECT_TRUE(rho.surjective());
  EXPECT_EQ(rho.preimage(b.subset({"X"})), a.subset({"X1", "X2"}));
  EXPECT_EQ(rho.apply(a.subset({"X2"})), b.subset({"X"}));
  const auto r = rho.restrict(a.subset({"X2", "Y"}));
  EXPECT_EQ(r.positions(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(rho.then(IndexMap::identity(b)), rho);
  EXPECT_THROW(IndexMap(a, b, {{"X1", "X"}, {"Y", "Y"}}), InvalidArgument);
  EXPECT_THROW(IndexMap(a, b, {{"X1", "X"}, {"X2", "Q"}, {"Y", "Y"}}), InvalidArgument);
}

TEST(Transform, IdentityIsPerfectAbstraction) {
  const auto t = identity_transformation(compile(catalog::mediator_chain_scm()));
  EXPECT_TRUE(check_transformation(t).passed);
  EXPECT_TRUE(check_interventional(t, EventScope::kAllEvents).passed);
  EXPECT_TRUE(is_perfect_abstraction(t));
}

TEST(Transform, InclusionIntoProduct) {
  const auto c1 = compile(catalog::xor_scm());
  const auto c2 = rename(compile(catalog::fork_scm()), {{"X", "F"}});
  const auto t = inclusion_into_product(c1, c2);
  EXPECT_TRUE(check_admissible(t).passed);
  EXPECT_TRUE(check_distributional(t).passed);
  EXPECT_TRUE(check_interventional(t).passed);
  EXPECT_TRUE(check_interventional(t, EventScope::kAllEvents).passed);
  EXPECT_FALSE(is_abstraction(t));
}

TEST(Transform, DroppingYOntoMarginal) {
  const auto scm = catalog::xor_scm();
  const auto c = compile(scm);
  const auto target = marginal_space(scm, {"X"});
  auto f = tabulate_map(c.space(), target.space(), [](const Digits& d) { return Digits{d[0]}; });
  IndexMap rho(c.space(), target.space(), {{"X", "X"}, {"Y", "X"}});
  const auto t = Transformation::deterministic(c, target, f, rho);
  EXPECT_TRUE(check_distributional(t).passed);
  EXPECT_TRUE(check_transformation(t).passed);
  EXPECT_TRUE(is_perfect_abstraction(t));
}

TEST(Transform, WrongTargetKernelFailsInterventional) {
  const auto m = xor_merge();
  const auto good = pushforward_space(m.source, m.f, m.rho);
  auto kernels = good.kernels();
  const CoordSet x(1);
  kernels.erase(x);
  kernels.emplace(x, StochKernel(m.target.restrict(x), m.target, {{{1, Rational(1)}}, {{0, Rational(1)}}}));
  const auto bad_target = FiniteCausalSpace::tabulated(good.measure(), kernels);
  const auto t = Transformation::deterministic(m.source, bad_target, m.f, m.rho);
  EXPECT_TRUE(check_distributional(t).passed);
  const auto report = check_interventional(t);
  ASSERT_FALSE(report.passed);
  EXPECT_EQ(report.witness->subset, std::vector<std::string>{"X"});
  EXPECT_EQ(report.witness->omega, "(X=0, Y=0)");
  EXPECT_EQ(report.witness->event, "X=0");
  EXPECT_EQ(report.witness->lhs, "1");
  EXPECT_EQ(report.witness->rhs, "0");
}

TEST(Transform, MergeIsPerfectAbstraction) {
  const auto m = xor_merge();
  const auto target = pushforward_space(m.source, m.f, m.rho);
  const auto t = Transformation::deterministic(m.source, target, m.f, m.rho);
  EXPECT_TRUE(is_perfect_abstraction(t));
  EXPECT_TRUE(check_transformation(t).passed);
  // Fair coin with the Dirac kernel on X.
  EXPECT_EQ(target.measure().weights(), (std::vector<Rational>{Rational(1, 2), Rational(1, 2)}));
  EXPECT_EQ(target.kernel(CoordSet(1)), StochKernel::identity(m.target));
}

TEST(Transform, AbstractionMapOnFourBits) {
  const auto c = compile(catalog::abstraction_scm());
  const auto a = catalog::abstraction_map(c.space());
  const auto target = pushforward_space(c, a.f, a.rho);
  const auto t = Transformation::deterministic(c, target, a.f, a.rho);
  EXPECT_TRUE(check_admissible(t).passed);
  EXPECT_TRUE(check_transformation(t).passed);
  EXPECT_TRUE(is_perfect_abstraction(t));
  EXPECT_TRUE(validate_causal_space(target).passed);
}

TEST(Transform, CompositionCounterexample) {
  const auto scm = catalog::composition_scm();
  const auto t1 = inclusion_transform(scm, {"X1", "Y"});
  const auto c2 = t1.target();
  CoordinateSpace s3({{"X", 3}, {"Y", 2}});
  auto f = tabulate_map(c2.space(), s3, [](const Digits& d) { return Digits{d[0] + d[1], d[2]}; });
  IndexMap rho(c2.space(), s3, {{"X1", "X"}, {"X2", "X"}, {"Y", "Y"}});
  const auto c3 = pushforward_space(c2, f, rho);
  const auto t2 = Transformation::deterministic(c2, c3, f, rho);
  ASSERT_TRUE(check_transformation(t1).passed);
  ASSERT_TRUE(check_transformation(t2).passed);

  const auto result = compose(t1, t2);
  EXPECT_FALSE(result.report.passed);
  ASSERT_FALSE(result.report.notes.empty());
  EXPECT_NE(result.report.notes[0].find("not covered"), std::string::npos);

  const auto adm = check_admissible(result.transformation);
  ASSERT_FALSE(adm.passed);
  EXPECT_EQ(adm.witness->subset, std::vector<std::string>{"X"});
  EXPECT_NE(adm.message.find("depend on source coordinate Y"), std::string::npos);

  const auto inter = check_interventional(result.transformation);
  ASSERT_FALSE(inter.passed);
  EXPECT_EQ(inter.witness->subset, std::vector<std::string>{"X"});
}

TEST(Transform, ComposeRelabelings) {
  const auto c = compile(catalog::xor_scm());
  const auto renamed = rename(c, {{"X", "A"}, {"Y", "B"}});
  std::vector<std::size_t> id(c.space().outcome_count());
  for (std::size_t o = 0; o < id.size(); ++o) id[o] = o;
  const auto t1 = Transformation::deterministic(c, renamed, id,
                                                IndexMap(c.space(), renamed.space(), {{"X", "A"}, {"Y", "B"}}));
  const auto t2 = Transformation::deterministic(renamed, c, id,
                                                IndexMap(renamed.space(), c.space(), {{"A", "X"}, {"B", "Y"}}));
  const auto result = compose(t1, t2);
  EXPECT_TRUE(result.report.passed);
  EXPECT_NE(result.report.notes[0].find("covered by the composition guarantee"), std::string::npos);
  EXPECT_EQ(result.transformation.rho(), IndexMap::identity(c.space()));
  EXPECT_THROW(compose(t1, t1), SpaceMismatch);
}

TEST(Pushforward, FixedPointAndUniqueness) {
  const auto m = parity_merge();
  const auto target = pushforward_space(m.source, m.f, m.rho);
  EXPECT_TRUE(validate_causal_space(target).passed);
  EXPECT_TRUE(check_transformation(Transformation::deterministic(m.source, target, m.f, m.rho)).passed);
  const auto again = pushforward_space(target, identity_transformation(target).map(),
                                       IndexMap::identity(target.space()));
  EXPECT_TRUE(same_causal_space(again, target));
  EXPECT_TRUE(same_causal_space(pushforward_space(m.source, m.f, m.rho), target));
}

TEST(Pushforward, Errors) {
  const auto m = xor_merge();
  CoordinateSpace wide({{"X", 2}, {"Q", 2}});
  auto f_wide = tabulate_map(m.source.space(), wide, [](const Digits& d) { return Digits{d[0], 0}; });
  EXPECT_THROW(pushforward_space(m.source, f_wide, IndexMap(m.source.space(), wide, {{"X", "X"}, {"Y", "X"}})),
               NotSurjective);
  EXPECT_THROW(pushforward_space(m.source, f_wide, IndexMap(m.source.space(), wide, {{"X", "X"}, {"Y", "Q"}})),
               NotSurjective);

  // X1, X2 fair, Y1 = X1, Y2 = 0: K_{X1,X2} pushed forward depends on x1, not
  // only on x1 + x2.
  const FiniteSCM scm({{"X1", 2, {}, {Rational(1, 2), Rational(1, 2)}, {0, 1}},
                       {"X2", 2, {}, {Rational(1, 2), Rational(1, 2)}, {0, 1}},
                       {"Y1", 2, {"X1"}, {Rational(1)}, {0, 1}},
                       {"Y2", 2, {}, {Rational(1)}, {0}}});
  const auto c = compile(scm);
  CoordinateSpace target({{"X", 3}, {"Y", 3}});
  auto f = tabulate_map(c.space(), target, [](const Digits& d) { return Digits{d[0] + d[1], d[2] + d[3]}; });
  IndexMap rho(c.space(), target, {{"X1", "X"}, {"X2", "X"}, {"Y1", "Y"}, {"Y2", "Y"}});
  try {
    pushforward_space(c, f, rho);
    FAIL() << "expected WellDefinednessViolation";
  } catch (const WellDefinednessViolation& e) {
    EXPECT_EQ(e.omega(), "(X1=0, X2=1, Y1=0, Y2=0)");
    EXPECT_EQ(e.omega_other(), "(X1=1, X2=0, Y1=0, Y2=0)");
  }

  // f(x, y) = (y, x) with rho(X) = A, rho(Y) = B: A depends on Y.
  CoordinateSpace swapped({{"A", 2}, {"B", 2}});
  auto f_bad = tabulate_map(m.source.space(), swapped, [](const Digits& d) { return Digits{d[1], d[0]}; });
  EXPECT_THROW(pushforward_space(m.source, f_bad, IndexMap(m.source.space(), swapped, {{"X", "A"}, {"Y", "B"}})),
               InvalidArgument);
}

TEST(PushforwardIntervention, EmptyIntervention) {
  const auto m = parity_merge();
  const auto result = pushforward_intervention(m.source, m.f, m.rho, CoordSet{}, one_point_space());
  EXPECT_TRUE(result.report.passed) << render(result.report);
  EXPECT_TRUE(same_causal_space(result.source, m.source));
  EXPECT_TRUE(same_causal_space(result.target, pushforward_space(m.source, m.f, m.rho)));
}

TEST(PushforwardIntervention, XorHardIntervention) {
  const auto m = xor_merge();
  const CoordSet u2(1);
  const CoordSet u1 = m.rho.preimage(u2);
  const auto l1 = observational_mechanism(FiniteMeasure::dirac(m.source.space().restrict(u1), 2));
  const auto result = pushforward_intervention(m.source, m.f, m.rho, u2, l1);
  EXPECT_TRUE(result.report.passed) << render(result.report);
  EXPECT_EQ(result.target.measure().weights(), (std::vector<Rational>{0, 1}));
}

TEST(PushforwardIntervention, ParityOnMergedCoordinate) {
  const auto m = parity_merge();
  const CoordSet u2 = m.target.subset({"W"});
  const CoordSet u1 = m.rho.preimage(u2);
  const auto sub = m.source.space().restrict(u1);
  const FiniteMeasure q1(sub, {Rational(1, 2), 0, 0, Rational(1, 2)});
  const auto result = pushforward_intervention(m.source, m.f, m.rho, u2, observational_mechanism(q1));
  EXPECT_TRUE(result.report.passed) << render(result.report);
  EXPECT_EQ(result.target.measure().probability(Event::cylinder(m.target, u2, 0)), Rational(1));
}

TEST(Rigidity, SameAndDifferentSecondFactors) {
  const auto c1 = compile(catalog::xor_scm());
  const auto c2 = rename(compile(catalog::mediator_chain_scm()), {{"X", "X2"}, {"Y", "Y2"}});
  const auto t = inclusion_into_product(c1, c2);
  EXPECT_TRUE(rigidity_check(t, t).passed);

  // Same measure on the second factor, different mechanism.
  const auto c2_other = independent_mechanism(c2.measure());
  ASSERT_FALSE(same_causal_space(c2, c2_other));
  const auto t_other = inclusion_into_product(c1, c2_other);
  ASSERT_TRUE(check_transformation(t_other).passed);
  EXPECT_FALSE(same_causal_space(t.target(), t_other.target()));
  EXPECT_TRUE(rigidity_check(t, t_other).passed);
}

TEST(Rigidity, TwoPushforwardTargets) {
  const auto m = parity_merge();
  const auto t1 = Transformation::deterministic(m.source, pushforward_space(m.source, m.f, m.rho), m.f, m.rho);
  const auto t2 = Transformation::deterministic(m.source, pushforward_space(m.source, m.f, m.rho), m.f, m.rho);
  EXPECT_TRUE(rigidity_check(t1, t2).passed);
}
