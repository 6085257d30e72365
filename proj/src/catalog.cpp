#include "causalkit/catalog.hpp"

namespace causalkit::catalog {

namespace {

const Rational kHalf(1, 2);

std::vector<Rational> bernoulli(const Rational& p) { return {1 - p, p}; }

ScmVariable fair_root(const std::string& name) { return {name, 2, {}, bernoulli(kHalf), {0, 1}}; }

}  // namespace

FiniteSCM xor_scm() {
  return FiniteSCM({fair_root("X"), {"Y", 2, {"X"}, bernoulli(Rational(1, 4)), {0, 1, 1, 0}}});
}

FiniteSCM parity_scm() {
  return FiniteSCM({fair_root("X"), fair_root("Z"), {"Y", 2, {"X", "Z"}, {Rational(1)}, {0, 1, 1, 0}}});
}

FiniteSCM fork_scm() {
  return FiniteSCM({fair_root("X"),
                    {"Y1", 2, {"X"}, bernoulli(kHalf), {0, 1, 1, 0}},
                    {"Y2", 2, {"X"}, bernoulli(kHalf), {0, 1, 1, 0}}});
}

FiniteSCM collider_scm() {
  return FiniteSCM({fair_root("X1"), fair_root("X2"), {"Y", 2, {"X1", "X2"}, {Rational(1)}, {0, 1, 1, 0}}});
}

FiniteSCM mediator_chain_scm() {
  // Y table rows: (m, h) = (0,0), (0,1), (1,0), (1,1); noise flips the value.
  return FiniteSCM({fair_root("H"),
                    {"X", 2, {"H"}, bernoulli(Rational(1, 4)), {0, 1, 1, 0}},
                    {"M", 2, {"X"}, bernoulli(Rational(1, 3)), {0, 1, 1, 0}},
                    {"Y", 2, {"M", "H"}, bernoulli(Rational(1, 5)), {0, 1, 1, 0, 1, 0, 1, 0}}});
}

FiniteSCM composition_scm() {
  return FiniteSCM({fair_root("X1"), fair_root("X2"),
                    {"Y", 2, {"X1", "X2"}, bernoulli(Rational(1, 4)), {0, 1, 1, 0, 1, 0, 0, 1}}});
}

FiniteSCM abstraction_scm() {
  return FiniteSCM({fair_root("X1"), fair_root("X2"),
                    {"Y1", 2, {"X1", "X2"}, bernoulli(Rational(1, 4)), {0, 1, 1, 0, 1, 0, 0, 1}},
                    {"Y2", 2, {"X1", "X2"}, bernoulli(Rational(1, 3)), {0, 1, 0, 1, 0, 1, 1, 0}}});
}

AbstractionMap abstraction_map(const CoordinateSpace& source) {
  CoordinateSpace target({{"X", 3}, {"Y", 4}});
  auto f = tabulate_map(source, target, [](const std::vector<std::size_t>& d) {
    return std::vector<std::size_t>{d[0] + d[1], d[2] + 2 * d[3]};
  });
  IndexMap rho(source, target, {{"X1", "X"}, {"X2", "X"}, {"Y1", "Y"}, {"Y2", "Y"}});
  return {target, std::move(f), std::move(rho)};
}

}  // namespace causalkit::catalog
