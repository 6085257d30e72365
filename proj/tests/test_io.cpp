#include <gtest/gtest.h>

#include <cstdlib>

#include "causalkit/catalog.hpp"
#include "causalkit/error.hpp"
#include "causalkit/gaussian_catalog.hpp"
#include "causalkit/io.hpp"
#include "causalkit/oracle.hpp"

using namespace causalkit;
using io::Json;

TEST(Io, RandomSpacesRoundTrip) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto c = oracle::random_space(seed);
    const auto j = io::to_json(c);
    const auto back = io::load_space(j);
    EXPECT_TRUE(same_causal_space(c, back));
    EXPECT_EQ(io::canonical(io::to_json(back)), io::canonical(j));
  }
}

TEST(Io, ScmRoundTripAndCompile) {
  const auto scm = catalog::mediator_chain_scm();
  const auto j = io::to_json(scm);
  EXPECT_EQ(io::load_scm(j).variables(), scm.variables());
  EXPECT_TRUE(same_causal_space(io::load_space(j), compile(scm)));
}

TEST(Io, RationalsAreLowestTermStrings) {
  const auto j = io::to_json(compile(catalog::xor_scm()));
  EXPECT_EQ(j.at("measure"), Json::parse(R"(["3/8", "1/8", "1/8", "3/8"])"));
  auto k = j;
  k["measure"] = Json::parse(R"(["6/16", "1/8", "1/8", "3/8"])");
  EXPECT_EQ(io::to_json(io::load_space(k)).at("measure"), j.at("measure"));
  k["measure"] = Json::parse(R"([0.375, "1/8", "1/8", "3/8"])");
  EXPECT_THROW(io::load_space(k), ParseError);
}

TEST(Io, KernelFamilies) {
  Json j = io::to_json(compile(catalog::xor_scm()));
  j["kernels"] = "independent";
  EXPECT_TRUE(same_causal_space(io::load_space(j), independent_mechanism(compile(catalog::xor_scm()).measure())));
  j["kernels"] = "observational";
  EXPECT_TRUE(validate_causal_space(io::load_space(j)).passed);
  j["kernels"] = "other";
  EXPECT_THROW(io::load_space(j), ParseError);
}

TEST(Io, RejectsMalformedDocuments) {
  const Json good = io::to_json(catalog::xor_scm());
  auto extra = good;
  extra["note"] = "x";
  EXPECT_THROW(io::load_scm(extra), ParseError);
  auto missing = good;
  missing.erase("variables");
  EXPECT_THROW(io::load_scm(missing), ParseError);
  EXPECT_THROW(io::kind_of(Json::parse(R"({"kind": "spaceship"})")), ParseError);
  EXPECT_THROW(io::load_transformation(good), ParseError);

  auto space = io::to_json(compile(catalog::xor_scm()));
  space["kernels"]["Y,X"] = space["kernels"]["X,Y"];
  EXPECT_THROW(io::load_space(space), ParseError);
}

TEST(Io, TransformationsRoundTrip) {
  const auto scm = catalog::composition_scm();
  const auto t = inclusion_transform(scm, {"X1", "Y"});
  const auto j = io::to_json(t);
  const auto back = io::load_transformation(j);
  EXPECT_EQ(io::canonical(io::to_json(back)), io::canonical(j));
  EXPECT_EQ(back.rho(), t.rho());

  const auto x = compile(catalog::xor_scm());
  const auto flip = Transformation::deterministic(x, x, {3, 2, 1, 0}, IndexMap::identity(x.space()));
  const auto fj = io::to_json(flip);
  ASSERT_TRUE(fj.contains("map"));
  EXPECT_EQ(io::load_transformation(fj).map(), flip.map());
}

TEST(Io, GaussianRoundTrip) {
  namespace gc = gaussian::catalog;
  const auto scm = gc::abstraction_source();
  const auto j = io::to_json(scm);
  const auto back = io::load_gaussian_scm(j);
  EXPECT_EQ(back.names(), scm.names());
  EXPECT_TRUE(gaussian::approx_equal(back.coefficients(), scm.coefficients()));
  EXPECT_EQ(io::canonical(io::to_json(back)), io::canonical(j));

  io::GaussianTransformationFile file{gc::abstraction_source(), gc::abstraction_target(), gc::abstraction_matrix(),
                                      gaussian::Vector::Zero(2), gaussian::Matrix::Zero(2, 2),
                                      {{"X1", "X"}, {"X2", "X"}, {"Y1", "Y"}, {"Y2", "Y"}}};
  const auto tj = io::to_json(file);
  EXPECT_TRUE(io::is_gaussian_transformation(tj));
  EXPECT_TRUE(gaussian::check_transformation(io::load_gaussian_transformation(tj).build()).passed);
  EXPECT_EQ(io::canonical(io::to_json(io::load_gaussian_transformation(tj))), io::canonical(tj));
}

TEST(Io, GaussianSubsystems) {
  io::GaussianSubsystemFile file{gaussian::faithfulness_scm(), {"Y", "X"}, true};
  const auto j = io::to_json(file);
  const auto back = io::load_gaussian_subsystem(j);
  EXPECT_EQ(io::canonical(io::to_json(back)), io::canonical(j));
  const auto marginal = back.build();
  EXPECT_EQ(marginal.names(), (std::vector<std::string>{"X", "Y"}));
  const auto x = marginal.subset({"X"});
  const auto y = marginal.subset({"Y"});
  EXPECT_EQ(gaussian::classify_effect(marginal, x, y).tag, Effect::kActive);
  file.marginalized = false;
  const auto indep = io::load_gaussian_subsystem(io::to_json(file)).build();
  EXPECT_EQ(gaussian::classify_effect(indep, x, y).tag, Effect::kNone);

  auto bad = j;
  bad["kernels"] = "other";
  EXPECT_THROW(io::load_gaussian_subsystem(bad), ParseError);
  bad = j;
  bad["visible"] = Json::array({"X", "Q"});
  EXPECT_THROW(io::load_gaussian_subsystem(bad), ParseError);
}

TEST(Io, ReportsRoundTrip) {
  const auto r = check_transformation(compose(inclusion_transform(catalog::composition_scm(), {"X1", "Y"}),
                                              identity_transformation(compile(catalog::composition_scm())))
                                          .transformation);
  EXPECT_EQ(io::load_report(io::to_json(r)), r);
  const auto failing = validate_causal_space(oracle::random_space(3, {}, oracle::Perturbation::kAxiomTwo));
  EXPECT_EQ(io::load_report(io::to_json(failing)), failing);
}

TEST(Io, CommandLineFragments) {
  const CoordinateSpace s({{"X", 2}, {"Y", 3}});
  EXPECT_EQ(io::parse_coordinates(s, "Y,X"), s.all());
  EXPECT_TRUE(io::parse_coordinates(s, "").empty());
  EXPECT_THROW(io::parse_coordinates(s, "Z"), InvalidArgument);
  const auto e = io::parse_event(s, "Y=2");
  EXPECT_EQ(e.count(), 2u);
  EXPECT_TRUE(e.contains(s.encode(std::vector<std::size_t>{1, 2})));
  EXPECT_EQ(io::parse_event(s, "X=1,Y=0").count(), 1u);
  EXPECT_THROW(io::parse_event(s, "Y=3"), InvalidArgument);
  EXPECT_THROW(io::parse_event(s, "Y=1x"), InvalidArgument);
  EXPECT_THROW(io::parse_event(s, "X=0,X=1"), InvalidArgument);
}

TEST(Io, OutcomeCapFromEnvironment) {
  ::setenv("CAUSALKIT_MAX_OUTCOMES", "8", 1);
  EXPECT_EQ(io::max_outcomes_from_env(), 8u);
  io::LoadOptions o;
  o.max_outcomes = io::max_outcomes_from_env();
  EXPECT_THROW(io::load_scm(io::to_json(catalog::abstraction_scm()), o), CapExceeded);
  ::setenv("CAUSALKIT_MAX_OUTCOMES", "lots", 1);
  EXPECT_THROW(io::max_outcomes_from_env(), InvalidArgument);
  ::unsetenv("CAUSALKIT_MAX_OUTCOMES");
  EXPECT_EQ(io::max_outcomes_from_env(), kDefaultMaxOutcomes);
}
