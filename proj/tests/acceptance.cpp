// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and time limits are pinned below.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "causalkit/catalog.hpp"
#include "causalkit/error.hpp"
#include "causalkit/gaussian_catalog.hpp"
#include "causalkit/io.hpp"
#include "causalkit/oracle.hpp"

using namespace causalkit;
namespace fs = std::filesystem;
namespace gc = causalkit::gaussian::catalog;

namespace {

constexpr double kTol = 1e-9;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool passed = true;
  std::string detail;
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      problems.push_back(what);
    }
  }
};

bool near(double a, double b) { return std::abs(a - b) <= kTol; }

gaussian::Matrix mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> values) {
  gaussian::Matrix m(r, c);
  Eigen::Index k = 0;
  for (double v : values) m(k / c, k % c) = v, ++k;
  return m;
}

const gaussian::Tolerance kGaussTol{kTol, kTol};

// --- criteria ----------------------------------------------------------------

Outcome gaussian_moments() {
  Outcome o;
  const auto law = gaussian::linear_pushforward(gaussian::observational_law(gc::abstraction_source()),
                                                gc::abstraction_matrix());
  const double xx = law.cov(0, 0) + law.mean(0) * law.mean(0);
  const double yy = law.cov(1, 1) + law.mean(1) * law.mean(1);
  const double xy = law.cov(0, 1) + law.mean(0) * law.mean(1);
  o.require(near(xx, 2.0), "E[(X1+X2)^2] = " + std::to_string(xx));
  o.require(near(yy, 23.0), "E[(Y1+2Y2)^2] = " + std::to_string(yy));
  o.require(near(xy, 6.0), "E[(X1+X2)(Y1+2Y2)] = " + std::to_string(xy));
  std::ostringstream os;
  os << "E[X^2]=" << xx << " E[Y^2]=" << yy << " E[XY]=" << xy;
  o.detail = os.str();
  return o;
}

Outcome gaussian_kernels() {
  Outcome o;
  const auto src = gc::abstraction_source();
  const auto tgt = gc::abstraction_target();
  const auto f = gc::abstraction_matrix();
  const auto kx = gaussian::linear_pushforward(gaussian::interventional_kernel(src, src.subset({"X1", "X2"})), f);
  // delta_{x1+x2} x N(3 x1 + 3 x2, 5)
  o.require(gaussian::approx_equal(kx.map, mat(2, 2, {1, 1, 3, 3}), kGaussTol), "pushed K_{X1,X2} mean map");
  o.require(gaussian::approx_equal(kx.offset, gaussian::Vector::Zero(2), kGaussTol), "pushed K_{X1,X2} offset");
  o.require(gaussian::approx_equal(kx.cov, mat(2, 2, {0, 0, 0, 5}), kGaussTol), "pushed K_{X1,X2} covariance");
  // f_* K_{Y1,Y2}(omega) against L_Y(f(omega)): L_Y reads y = y1 + 2 y2.
  const auto ky = gaussian::linear_pushforward(gaussian::interventional_kernel(src, src.subset({"Y1", "Y2"})), f);
  const auto ly = gaussian::interventional_kernel(tgt, tgt.subset({"Y"}));
  const gaussian::Matrix y_of = f.block(1, 2, 1, 2);
  o.require(gaussian::approx_equal(ky.map, ly.map * y_of, kGaussTol), "pushed K_{Y1,Y2} mean map vs L_Y");
  o.require(gaussian::approx_equal(ky.offset, ly.offset, kGaussTol), "pushed K_{Y1,Y2} offset vs L_Y");
  o.require(gaussian::approx_equal(ky.cov, ly.cov, kGaussTol), "pushed K_{Y1,Y2} covariance vs L_Y");
  const auto full = gaussian::check_linear_transform(src, tgt, f, gc::abstraction_rho(), kGaussTol);
  o.require(full.passed, "check_linear_transform: " + full.message);
  o.detail = "K_{X1,X2} and K_{Y1,Y2} pushforwards match; check_linear_transform " +
             std::string(full.passed ? "passes" : "fails");
  return o;
}

Outcome inclusion_pairs() {
  Outcome o;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    oracle::RandomShape a;
    a.prefix = "A";
    oracle::RandomShape b;
    b.prefix = "B";
    const auto c1 = oracle::random_space(oracle::trial_seed(kSeed, 2 * i), a);
    const auto c2 = oracle::random_space(oracle::trial_seed(kSeed, 2 * i + 1), b);
    const auto t = inclusion_into_product(c1, c2);
    largest = std::max(largest, t.target().space().outcome_count());
    for (const auto& r : {check_admissible(t), check_distributional(t), check_interventional(t)}) {
      o.require(r.passed, "pair " + std::to_string(i) + ": " + r.check + " fails: " + r.message);
    }
  }
  o.detail = "50 pairs, up to " + std::to_string(largest) + " product outcomes";
  return o;
}

Outcome composition_counterexample() {
  Outcome o;
  const std::string expected = "depend on source coordinate Y";
  const std::vector<std::string> at_x{"X"};

  // Gaussian scale.
  const auto cc = gc::composition_case();
  o.require(check_transformation(cc.inclusion, kGaussTol).passed, "Gaussian inclusion is not a causal transformation");
  o.require(check_transformation(cc.sum, kGaussTol).passed, "Gaussian sum map is not a causal transformation");
  const auto g_adm = gaussian::check_admissible(cc.composite, kGaussTol);
  o.require(!g_adm.passed, "Gaussian composite passes check_admissible");
  o.require(g_adm.message.find(expected) != std::string::npos, "Gaussian witness message: " + g_adm.message);
  o.require(g_adm.witness && g_adm.witness->subset == at_x, "Gaussian admissibility witness is not at S={X}");
  const auto g_int = gaussian::check_interventional(cc.composite, kGaussTol);
  o.require(!g_int.passed && g_int.witness && g_int.witness->subset == at_x,
            "Gaussian composite interventional failure not at S={X}");

  // Three-bit finite discretization.
  using Digits = std::vector<std::size_t>;
  const auto t1 = inclusion_transform(catalog::composition_scm(), {"X1", "Y"});
  const auto& c2 = t1.target();
  const CoordinateSpace s3({{"X", 3}, {"Y", 2}});
  const auto f = tabulate_map(c2.space(), s3, [](const Digits& d) { return Digits{d[0] + d[1], d[2]}; });
  const IndexMap rho(c2.space(), s3, {{"X1", "X"}, {"X2", "X"}, {"Y", "Y"}});
  const auto t2 = Transformation::deterministic(c2, pushforward_space(c2, f, rho), f, rho);
  o.require(check_transformation(t1).passed, "finite inclusion is not a causal transformation");
  o.require(check_transformation(t2).passed, "finite sum map is not a causal transformation");
  const auto composite = compose(t1, t2).transformation;
  const auto f_adm = check_admissible(composite);
  o.require(!f_adm.passed, "finite composite passes check_admissible");
  o.require(f_adm.message.find(expected) != std::string::npos, "finite witness message: " + f_adm.message);
  o.require(f_adm.witness && f_adm.witness->subset == at_x, "finite admissibility witness is not at S={X}");
  const auto f_int = check_interventional(composite);
  o.require(!f_int.passed && f_int.witness && f_int.witness->subset == at_x,
            "finite composite interventional failure not at S={X}");

  o.detail = "Gaussian: \"" + g_adm.message + "\"; finite: \"" + f_adm.message + "\"; interventional fails at S={X} on both";
  return o;
}

Outcome lemma_suites() {
  Outcome o;
  std::size_t uncovered = 0;
  for (const auto& id : oracle::lemma_ids()) {
    const auto r = oracle::lemma_suite(id, 100, kSeed);
    o.require(r.passed, id + ": " + r.message);
    const auto pos = r.message.find(" passed, ");
    if (pos != std::string::npos) uncovered += std::stoul(r.message.substr(pos + 9));
  }
  o.detail = std::to_string(oracle::lemma_ids().size()) + " lemmas x 100 trials, 0 failures required, " +
             std::to_string(uncovered) + " trials outside the hypotheses";
  return o;
}

// The pinned oracle corpus: 14 spaces and 11 transformations, |Omega| <= 12.
Outcome oracle_agreement() {
  Outcome o;
  std::vector<std::pair<std::string, FiniteCausalSpace>> spaces{
      {"xor", compile(catalog::xor_scm())},
      {"parity", compile(catalog::parity_scm())},
      {"fork", compile(catalog::fork_scm())},
      {"collider", compile(catalog::collider_scm())},
      {"composition", compile(catalog::composition_scm())},
  };
  for (std::uint64_t s = 1; s <= 5; ++s) spaces.emplace_back("random " + std::to_string(s), oracle::random_space(s));
  const std::size_t valid = spaces.size();
  for (std::uint64_t s = 1; s <= 2; ++s) {
    spaces.emplace_back("axiom (i) broken " + std::to_string(s),
                        oracle::random_space(s, {}, oracle::Perturbation::kAxiomOne));
    spaces.emplace_back("axiom (ii) broken " + std::to_string(s),
                        oracle::random_space(s, {}, oracle::Perturbation::kAxiomTwo));
  }

  using Digits = std::vector<std::size_t>;
  std::vector<std::pair<std::string, Transformation>> maps;
  const auto t1 = inclusion_transform(catalog::composition_scm(), {"X1", "Y"});
  const auto& c2 = t1.target();
  const CoordinateSpace s3({{"X", 3}, {"Y", 2}});
  const auto f = tabulate_map(c2.space(), s3, [](const Digits& d) { return Digits{d[0] + d[1], d[2]}; });
  const IndexMap rho(c2.space(), s3, {{"X1", "X"}, {"X2", "X"}, {"Y", "Y"}});
  const auto t2 = Transformation::deterministic(c2, pushforward_space(c2, f, rho), f, rho);
  maps.emplace_back("composition inclusion", t1);
  maps.emplace_back("composition sum", t2);
  maps.emplace_back("composition composite", compose(t1, t2).transformation);
  const auto x = compile(catalog::xor_scm());
  maps.emplace_back("xor flip", Transformation::deterministic(x, x, {3, 2, 1, 0}, IndexMap::identity(x.space())));
  oracle::RandomShape small;
  small.max_variables = 1;
  small.max_outcomes = 3;
  small.prefix = "B";
  maps.emplace_back("xor inclusion", inclusion_into_product(x, oracle::random_space(4, small)));
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const auto h = oracle::random_hierarchy(s, 12);
    const auto first = h.first();
    maps.emplace_back("hierarchy " + std::to_string(s) + " fine->mid", first);
    maps.emplace_back("hierarchy " + std::to_string(s) + " mid->coarse", h.second(first.target()));
  }

  std::size_t checks = 0;
  auto record = [&](const std::string& name, const CheckReport& r) {
    ++checks;
    o.require(r.passed, name + ": " + r.message);
  };
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    const auto& [name, c] = spaces[i];
    record(name, oracle::full_event_check(oracle::Predicate::kAxioms, c));
    if (i >= valid) continue;
    const auto subsets = canonical_subsets(c.space());
    for (CoordSet u : subsets) {
      for (CoordSet v : subsets) {
        const oracle::SpaceQuery q{u, v, c.space().all() - v};
        record(name, oracle::full_event_check(oracle::Predicate::kIndependence, c, q));
        record(name, oracle::full_event_check(oracle::Predicate::kSource, c, q));
        record(name, oracle::full_event_check(oracle::Predicate::kEffect, c, q));
      }
    }
  }
  for (const auto& [name, t] : maps) {
    for (auto p : {oracle::Predicate::kAdmissible, oracle::Predicate::kDistributional,
                   oracle::Predicate::kInterventional, oracle::Predicate::kInterventionalAllEvents}) {
      record(name, oracle::full_event_check(p, t));
    }
  }
  const std::size_t instances = spaces.size() + maps.size();
  o.require(instances == 25, "corpus has " + std::to_string(instances) + " instances");
  o.detail = std::to_string(instances) + " instances, " + std::to_string(checks) + " generator/enumeration comparisons";
  return o;
}

Outcome effect_classification() {
  Outcome o;
  const auto parity = compile(catalog::parity_scm());
  const auto& ps = parity.space();
  const auto d = classify_effect(parity, ps.subset({"X"}), io::parse_event(ps, "Y=1"));
  o.require(d.tag == Effect::kDormant, "parity: " + to_string(d.tag));
  o.require(d.witness.has_value(), "parity: no witness");
  if (d.witness) {
    const auto& w = *d.witness;
    // K_{X,Z}((0,0), Y=1) = 0 while K_Z(0, Y=1) = 1/2.
    o.require(w.subset == std::vector<std::string>{"X", "Z"}, "parity witness S");
    o.require(w.omega == "(X=0, Z=0)", "parity witness omega: " + w.omega);
    o.require(w.lhs == "0" && w.rhs == "1/2", "parity witness values: " + w.lhs + " vs " + w.rhs);
  }
  const auto x = compile(catalog::xor_scm());
  const auto a = classify_effect(x, x.space().subset({"X"}), x.space().subset({"Y"}));
  o.require(a.tag == Effect::kActive, "xor: " + to_string(a.tag));
  const auto p = product(x, rename(parity, {{"X", "A"}, {"Z", "C"}, {"Y", "B"}}));
  const auto left = p.space().subset({"X", "Y"});
  const auto right = p.space().subset({"A", "B", "C"});
  const auto n1 = classify_effect(p, left, right);
  const auto n2 = classify_effect(p, right, left);
  o.require(n1.tag == Effect::kNone && n2.tag == Effect::kNone, "product cross-factor effect present");
  o.detail = "parity " + to_string(d.tag) + " at S={X,Z} omega=(X=0, Z=0), xor " + to_string(a.tag) +
             ", product cross-factor " + to_string(n1.tag) + "/" + to_string(n2.tag);
  return o;
}

Outcome faithfulness() {
  Outcome o;
  const auto scm = gaussian::faithfulness_scm();
  const auto k = gaussian::interventional_kernel(scm, scm.subset({"X"}));
  gaussian::Vector one(1);
  one << 1.0;
  const auto law = k.at(one);
  const auto y = static_cast<Eigen::Index>(scm.subset({"Y"}).positions().front());
  const auto xi = static_cast<Eigen::Index>(scm.subset({"X"}).positions().front());
  o.require(near(law.mean(y), -1.0) && near(law.cov(y, y), 3.0), "do(X=1) law of Y");
  const auto obs = gaussian::observational_law(scm);
  o.require(near(obs.cov(xi, y), 0.0), "observational Cov(X,Y)");

  const auto reports = gaussian::faithfulness_demo(kGaussTol);
  o.require(reports.full_system.passed, "full-system report fails");
  o.require(reports.subsystem.passed, "subsystem report fails");
  bool no_effect = false;
  for (const auto& c : reports.subsystem.children) no_effect |= c.message == "NoEffect";
  o.require(no_effect, "subsystem does not report NoEffect");
  std::cout << render(reports.full_system) << render(reports.subsystem);
  std::ostringstream os;
  os << "Y | do(X=1) ~ N(" << law.mean(y) << ", " << law.cov(y, y) << "), Cov(X,Y) = " << obs.cov(xi, y)
     << ", subsystem NoEffect; both reports emitted above";
  o.detail = os.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Serializes a document and returns (canonical text, verdict of re-validation).
std::pair<std::string, bool> reserialize(const io::Json& j, const io::LoadOptions& opts) {
  switch (io::kind_of(j)) {
    case io::Kind::kFiniteSpace: {
      const auto s = io::load_space(j, opts);
      return {io::canonical(io::to_json(s)), validate_causal_space(s).passed};
    }
    case io::Kind::kFiniteScm: {
      const auto s = io::load_scm(j, opts);
      return {io::canonical(io::to_json(s)), validate_causal_space(compile(s)).passed};
    }
    case io::Kind::kGaussianScm: {
      const auto s = io::load_gaussian_scm(j);
      return {io::canonical(io::to_json(s)),
              gaussian::validate(gaussian::GaussianCausalSpace::from_scm(s), kGaussTol).passed};
    }
    case io::Kind::kGaussianSubsystem: {
      const auto s = io::load_gaussian_subsystem(j, opts);
      return {io::canonical(io::to_json(s)), gaussian::validate(s.build(), kGaussTol).passed};
    }
    case io::Kind::kTransformation:
      if (io::is_gaussian_transformation(j, opts)) {
        const auto t = io::load_gaussian_transformation(j, opts);
        return {io::canonical(io::to_json(t)), gaussian::check_transformation(t.build(), kGaussTol).passed};
      } else {
        const auto t = io::load_transformation(j, opts);
        return {io::canonical(io::to_json(t)), check_transformation(t).passed};
      }
  }
  return {};
}

Outcome round_trip() {
  Outcome o;
  const fs::path dir = CAUSALKIT_CORPUS_DIR;
  std::size_t artifacts = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json" && e.path().filename() != "manifest.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  io::LoadOptions opts;
  opts.base_dir = dir;
  for (const auto& path : files) {
    ++artifacts;
    const std::string name = path.filename().string();
    const std::string text = slurp(path);
    try {
      const auto j = io::Json::parse(text);
      if (!j.contains("kind")) {
        o.require(io::canonical(j) == text, name + ": not canonical");
        continue;
      }
      const auto [first, verdict1] = reserialize(j, opts);
      o.require(first == text, name + ": serialization differs from the file");
      const auto [second, verdict2] = reserialize(io::Json::parse(first), opts);
      o.require(second == first, name + ": second serialization differs");
      o.require(verdict1 == verdict2, name + ": verdict changed after reload");
    } catch (const std::exception& e) {
      o.require(false, name + ": " + e.what());
    }
  }
  o.require(artifacts > 0, "empty corpus");
  o.detail = std::to_string(artifacts) + " corpus artifacts byte-stable";
  return o;
}

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;  // 0 = no time limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Gaussian abstraction moments (tol 1e-9)", 1.0, gaussian_moments},
      {2, "Gaussian abstraction kernel identities (tol 1e-9)", 0.0, gaussian_kernels},
      {3, "inclusion into products, 50 random pairs", 10.0, inclusion_pairs},
      {4, "composition counterexample, Gaussian and 3-bit", 0.0, composition_counterexample},
      {5, "lemma suites, 100 trials each", 60.0, lemma_suites},
      {6, "oracle agreement on the pinned corpus", 120.0, oracle_agreement},
      {7, "effect classification: Dormant, Active, NoEffect", 0.0, effect_classification},
      {8, "faithfulness demo", 0.0, faithfulness},
      {9, "corpus round-trip stability", 0.0, round_trip},
  };
  int failed = 0;
  std::vector<std::string> lines;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.require(false, "took " + std::to_string(secs) + " s");
    }
    std::ostringstream line;
    line << "criterion " << c.id << ": " << (o.passed ? "PASS" : "FAIL") << "  " << c.title << "  ("
         << std::fixed << std::setprecision(3) << secs << " s";
    if (c.limit_seconds > 0) line << ", limit " << std::setprecision(0) << c.limit_seconds << " s";
    line << ")  " << o.detail;
    for (const auto& p : o.problems) line << "\n    problem: " << p;
    lines.push_back(line.str());
    if (!o.passed) ++failed;
  }
  for (const auto& l : lines) std::cout << l << '\n';
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " acceptance criteria passed\n";
  return failed == 0 ? 0 : 1;
}
