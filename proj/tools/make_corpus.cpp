// Writes the example corpus into a directory: make_corpus DIR.

#include <filesystem>
#include <iostream>

#include "causalkit/catalog.hpp"
#include "causalkit/gaussian_catalog.hpp"
#include "causalkit/io.hpp"

namespace fs = std::filesystem;
using namespace causalkit;
using io::Json;
using Digits = std::vector<std::size_t>;

namespace {

void put(const fs::path& dir, const std::string& name, const Json& doc) { io::write_file(dir / name, doc); }

Json gaussian_transformation(const gaussian::LinearGaussianSCM& source, const gaussian::LinearGaussianSCM& target,
                             const gaussian::GaussianTransformation& t) {
  std::map<std::string, std::string> rho;
  for (std::size_t i = 0; i < t.rho.size(); ++i) rho[source.names()[i]] = target.names()[t.rho[i]];
  return io::to_json(io::GaussianTransformationFile{source, target, t.map, t.offset, t.cov, rho});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_corpus DIR\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);

  // Finite SCMs and two compiled spaces.
  put(dir, "xor.scm.json", io::to_json(catalog::xor_scm()));
  put(dir, "parity.scm.json", io::to_json(catalog::parity_scm()));
  put(dir, "fork.scm.json", io::to_json(catalog::fork_scm()));
  put(dir, "collider.scm.json", io::to_json(catalog::collider_scm()));
  put(dir, "mediator-chain.scm.json", io::to_json(catalog::mediator_chain_scm()));
  put(dir, "composition.scm.json", io::to_json(catalog::composition_scm()));
  put(dir, "abstraction.scm.json", io::to_json(catalog::abstraction_scm()));
  const auto xor_space = compile(catalog::xor_scm());
  put(dir, "xor.space.json", io::to_json(xor_space));
  put(dir, "parity.space.json", io::to_json(compile(catalog::parity_scm())));

  // Intervention inputs on X of the XOR space: Q = (1/4, 3/4).
  const CoordinateSpace x_space({{"X", 2}});
  put(dir, "q-x.space.json", io::to_json(independent_mechanism(FiniteMeasure(x_space, {Rational(1, 4), Rational(3, 4)}))));

  // Inclusion of XOR into its product with a renamed collider.
  const auto collider = rename(compile(catalog::collider_scm()), {{"X1", "A1"}, {"X2", "A2"}, {"Y", "B"}});
  put(dir, "collider-renamed.space.json", io::to_json(collider));
  put(dir, "inclusion.json", io::to_json(inclusion_into_product(xor_space, collider)));

  // Finite perfect abstraction (x1 + x2, y1 + 2 y2), plus the inputs of
  // the abstract command that rebuild it.
  const auto fine = compile(catalog::abstraction_scm());
  const auto m = catalog::abstraction_map(fine.space());
  const auto coarse = pushforward_space(fine, m.f, m.rho);
  put(dir, "abstraction.json", io::to_json(Transformation::deterministic(fine, coarse, m.f, m.rho)));
  Json coords = Json::array();
  for (const auto& c : m.target.coordinates()) coords.push_back({{"cardinality", c.cardinality}, {"name", c.name}});
  Json table = Json::array();
  for (auto o : m.f) table.push_back(m.target.digits(o));
  put(dir, "abstraction-map.json", {{"coordinates", coords}, {"map", table}});
  put(dir, "abstraction-rho.json", m.rho.names());

  // Composition counterexample on three bits: the (X1, Y) inclusion, then
  // the sum map onto (X, Y).
  const auto scm = catalog::composition_scm();
  const auto t1 = inclusion_transform(scm, {"X1", "Y"});
  const auto& c2 = t1.target();
  const CoordinateSpace s3({{"X", 3}, {"Y", 2}});
  auto f = tabulate_map(c2.space(), s3, [](const Digits& d) { return Digits{d[0] + d[1], d[2]}; });
  const IndexMap rho(c2.space(), s3, {{"X1", "X"}, {"X2", "X"}, {"Y", "Y"}});
  const auto c3 = pushforward_space(c2, f, rho);
  put(dir, "composition-inclusion.json", io::to_json(t1));
  put(dir, "composition-sum.json", io::to_json(Transformation::deterministic(c2, c3, f, rho)));

  // Gaussian models.
  namespace gc = gaussian::catalog;
  put(dir, "gaussian-abstraction-source.json", io::to_json(gc::abstraction_source()));
  put(dir, "gaussian-abstraction-target.json", io::to_json(gc::abstraction_target()));
  const auto abs = gaussian::GaussianTransformation::linear(
      gaussian::GaussianCausalSpace::from_scm(gc::abstraction_source()),
      gaussian::GaussianCausalSpace::from_scm(gc::abstraction_target()), gc::abstraction_matrix(), gc::abstraction_rho());
  put(dir, "gaussian-abstraction.json", gaussian_transformation(gc::abstraction_source(), gc::abstraction_target(), abs));
  const auto cc = gc::composition_case();
  put(dir, "gaussian-composition-inclusion.json",
      gaussian_transformation(gc::composition_subsystem(), gc::composition_source(), cc.inclusion));
  put(dir, "gaussian-composition-sum.json",
      gaussian_transformation(gc::composition_source(), gc::composition_target(), cc.sum));
  put(dir, "gaussian-chain.json", io::to_json(gc::chain_scm()));
  put(dir, "faithfulness.json", io::to_json(gaussian::faithfulness_scm()));
  // The two readings of the (X,Y) subsystem of the faithfulness example.
  put(dir, "faithfulness-independent.json",
      io::to_json(io::GaussianSubsystemFile{gaussian::faithfulness_scm(), {"X", "Y"}, false}));
  put(dir, "faithfulness-marginalized.json",
      io::to_json(io::GaussianSubsystemFile{gaussian::faithfulness_scm(), {"X", "Y"}, true}));
  return 0;
}
