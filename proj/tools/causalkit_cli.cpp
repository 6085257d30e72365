// causalkit: command-line front end.
//
// Exit codes: 0 every check passed or the construction succeeded,
// 1 a check failed, 2 invalid input.

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "causalkit/error.hpp"
#include "causalkit/gaussian.hpp"
#include "causalkit/io.hpp"
#include "causalkit/oracle.hpp"

namespace fs = std::filesystem;
using namespace causalkit;
using io::Json;

namespace {

struct Output {
  bool json = false;
  std::string out;
};

io::LoadOptions options_for(const std::string& path) {
  io::LoadOptions o;
  o.max_outcomes = io::max_outcomes_from_env();
  o.base_dir = fs::path(path).parent_path();
  return o;
}

Json read(const std::string& path) { return io::read_file(path); }

FiniteCausalSpace load_space(const std::string& path) { return io::load_space(read(path), options_for(path)); }

bool is_gaussian_scm(const Json& j) { return io::kind_of(j) == io::Kind::kGaussianScm; }
bool is_gaussian_subsystem(const Json& j) { return io::kind_of(j) == io::Kind::kGaussianSubsystem; }

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

CoordSet gaussian_subset(const gaussian::LinearGaussianSCM& scm, const std::string& text) {
  return scm.subset(split_names(text));
}

int emit(const CheckReport& report, const Output& o) {
  if (o.json) {
    std::cout << io::canonical(io::to_json(report));
  } else {
    std::cout << render(report);
  }
  return report.passed ? 0 : 1;
}

void write_out(const Output& o, const Json& doc) {
  if (o.out.empty()) return;
  io::write_file(o.out, doc);
}

CheckReport effect_report(const std::string& what, const EffectClass& e) {
  auto r = CheckReport::pass("classify_effect", to_string(e.tag));
  r.witness = e.witness;
  r.notes.push_back(what);
  return r;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string gaussian_law_text(const gaussian::GaussianLaw& law, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    s += (i ? ", " : "") + names[i] + " ~ N(" + fmt(law.mean(k)) + ", " + fmt(law.cov(k, k)) + ")";
  }
  return s;
}

// --- commands --------------------------------------------------------------

int cmd_validate(const std::string& path, const Output& o) {
  const Json j = read(path);
  if (is_gaussian_scm(j)) {
    return emit(gaussian::validate(gaussian::GaussianCausalSpace::from_scm(io::load_gaussian_scm(j))), o);
  }
  if (is_gaussian_subsystem(j)) {
    return emit(gaussian::validate(io::load_gaussian_subsystem(j, options_for(path)).build()), o);
  }
  return emit(validate_causal_space(io::load_space(j, options_for(path))), o);
}

int cmd_intervene(const std::string& path, const std::string& on, const std::string& q_path,
                  const std::string& mechanism_path, const std::string& assignment, const Output& o) {
  const Json j = read(path);
  if (is_gaussian_scm(j)) {
    if (assignment.empty()) throw InvalidArgument("Gaussian interventions take --do");
    const auto scm = io::load_gaussian_scm(j);
    std::vector<std::string> names;
    std::map<std::size_t, double> values;
    for (const auto& item : split_names(assignment)) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidArgument("--do expects NAME=VALUE pairs");
      const auto name = item.substr(0, eq);
      names.push_back(name);
      try {
        values[scm.subset({name}).positions().front()] = std::stod(item.substr(eq + 1));
      } catch (const std::logic_error&) {
        throw InvalidArgument("--do: '" + item.substr(eq + 1) + "' is not a number");
      }
    }
    const auto k = gaussian::interventional_kernel(scm, scm.subset(names));
    gaussian::Vector input(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (const auto& [pos, v] : values) input(i++) = v;
    const auto law = k.at(input);
    auto r = CheckReport::pass("intervene", "do(" + assignment + "): " + gaussian_law_text(law, scm.names()));
    return emit(r, o);
  }
  const auto space = load_space(path);
  const auto& s = space.space();
  CoordSet u;
  std::optional<FiniteCausalSpace> mechanism;
  std::optional<FiniteMeasure> q;
  if (!assignment.empty()) {
    if (!q_path.empty() || !mechanism_path.empty()) throw InvalidArgument("--do excludes --q and --mechanism");
    const auto event = io::parse_event(s, assignment);
    std::vector<std::string> names;
    for (const auto& item : split_names(assignment)) names.push_back(item.substr(0, item.find('=')));
    u = s.subset(names);
    const auto restricted = s.restrict(u);
    const auto outcome = s.project(event.outcomes().front(), u);
    mechanism = independent_mechanism(FiniteMeasure::dirac(restricted, outcome));
  } else {
    if (on.empty()) throw InvalidArgument("intervene needs --on with --q/--mechanism, or --do");
    u = io::parse_coordinates(s, on);
    if (!q_path.empty()) q = load_space(q_path).measure();
    if (!mechanism_path.empty()) {
      mechanism = load_space(mechanism_path);
    } else if (q) {
      mechanism = independent_mechanism(*q);
    } else {
      throw InvalidArgument("intervene needs --q, --mechanism or --do");
    }
  }
  const auto result = q ? intervene(space, u, *q, *mechanism) : intervene(space, u, *mechanism);
  write_out(o, io::to_json(result));
  return emit(validate_causal_space(result), o);
}

int cmd_product(const std::string& first, const std::string& second, const Output& o) {
  const auto p = product(load_space(first), load_space(second), io::max_outcomes_from_env());
  write_out(o, io::to_json(p));
  return emit(validate_causal_space(p), o);
}

int cmd_check_transform(const std::string& path, bool all_events, const Output& o) {
  const Json j = read(path);
  const auto opts = options_for(path);
  if (io::is_gaussian_transformation(j, opts)) {
    return emit(gaussian::check_transformation(io::load_gaussian_transformation(j, opts).build()), o);
  }
  const auto t = io::load_transformation(j, opts);
  if (!all_events) return emit(check_transformation(t), o);
  return emit(CheckReport::all_of("causal_transformation",
                                  {check_admissible(t), check_distributional(t),
                                   check_interventional(t, EventScope::kAllEvents)}),
              o);
}

int cmd_classify(const std::string& path, const std::string& on, const std::string& target, const std::string& event,
                 const Output& o) {
  const Json j = read(path);
  if (is_gaussian_scm(j)) {
    if (!event.empty()) throw InvalidArgument("Gaussian classification takes --target, not --event");
    const auto scm = io::load_gaussian_scm(j);
    const auto space = gaussian::GaussianCausalSpace::from_scm(scm);
    return emit(effect_report("U={" + on + "} V={" + target + "}",
                              gaussian::classify_effect(space, gaussian_subset(scm, on), gaussian_subset(scm, target))),
                o);
  }
  if (is_gaussian_subsystem(j)) {
    if (!event.empty()) throw InvalidArgument("Gaussian classification takes --target, not --event");
    const auto space = io::load_gaussian_subsystem(j, options_for(path)).build();
    return emit(effect_report("U={" + on + "} V={" + target + "}",
                              gaussian::classify_effect(space, space.subset(split_names(on)),
                                                        space.subset(split_names(target)))),
                o);
  }
  const auto space = io::load_space(j, options_for(path));
  const auto& s = space.space();
  const CoordSet u = io::parse_coordinates(s, on);
  if (event.empty() == target.empty()) throw InvalidArgument("classify needs exactly one of --target and --event");
  if (!event.empty()) {
    return emit(effect_report("U={" + on + "} A={" + event + "}", classify_effect(space, u, io::parse_event(s, event))),
                o);
  }
  return emit(effect_report("U={" + on + "} V={" + target + "}",
                            classify_effect(space, u, io::parse_coordinates(s, target))),
              o);
}

int cmd_source(const std::string& path, const std::string& on, const std::string& target, const std::string& event,
               const Output& o) {
  const auto space = load_space(path);
  const auto& s = space.space();
  const CoordSet u = io::parse_coordinates(s, on);
  if (!event.empty()) return emit(is_source(space, u, io::parse_event(s, event)), o);
  return emit(is_source(space, u, target.empty() ? s.all() : io::parse_coordinates(s, target)), o);
}

int cmd_independence(const std::string& path, const std::string& on, const std::string& a, const std::string& b,
                     const std::string& first, const std::string& second, const Output& o) {
  const auto space = load_space(path);
  const auto& s = space.space();
  const CoordSet u = io::parse_coordinates(s, on);
  if (!a.empty() || !b.empty()) {
    if (a.empty() || b.empty() || !first.empty() || !second.empty()) {
      throw InvalidArgument("independence takes --a and --b, or --first and --second");
    }
    return emit(check_causal_independence(space, u, io::parse_event(s, a), io::parse_event(s, b)), o);
  }
  if (first.empty() || second.empty()) throw InvalidArgument("independence takes --a and --b, or --first and --second");
  return emit(check_causal_independence(space, u, io::parse_coordinates(s, first), io::parse_coordinates(s, second)),
              o);
}

// f-spec: {"coordinates": [{name, cardinality}], "map": [[target digits] per source outcome]}.
// rho-spec: {"source name": "target name"}.
int cmd_abstract(const std::string& path, const std::string& map_path, const std::string& rho_path,
                 const std::string& target_out, const Output& o) {
  const auto source = load_space(path);
  const auto& s1 = source.space();
  const Json fj = read(map_path);
  if (!fj.is_object() || !fj.contains("coordinates") || !fj.contains("map") || fj.size() != 2) {
    throw ParseError(map_path + ": expected exactly 'coordinates' and 'map'");
  }
  // Reuse the finite-space reader for the coordinate list.
  std::vector<Coordinate> coords;
  for (const auto& c : fj.at("coordinates")) {
    if (!c.is_object() || c.size() != 2 || !c.contains("name") || !c.contains("cardinality")) {
      throw ParseError(map_path + ": coordinates are {name, cardinality}");
    }
    coords.push_back({c.at("name").get<std::string>(), c.at("cardinality").get<std::size_t>()});
  }
  const CoordinateSpace s2(coords, io::max_outcomes_from_env());
  const auto& m = fj.at("map");
  if (!m.is_array() || m.size() != s1.outcome_count()) {
    throw ParseError(map_path + ": map needs one entry per source outcome");
  }
  std::vector<std::size_t> f;
  for (const auto& entry : m) {
    const auto digits = entry.get<std::vector<std::size_t>>();
    if (digits.size() != s2.dimension()) throw ParseError(map_path + ": map entries list every target coordinate");
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (digits[i] >= s2.coordinate(i).cardinality) throw ParseError(map_path + ": map value out of range");
    }
    f.push_back(s2.encode(digits));
  }
  const IndexMap rho(s1, s2, read(rho_path).get<std::map<std::string, std::string>>());
  const auto target = pushforward_space(source, f, rho);
  const auto t = Transformation::deterministic(source, target, std::move(f), rho);
  write_out(o, io::to_json(t));
  if (!target_out.empty()) io::write_file(target_out, io::to_json(target));
  return emit(check_transformation(t), o);
}

int cmd_compose(const std::string& first, const std::string& second, const Output& o) {
  const Json j1 = read(first);
  const Json j2 = read(second);
  const auto o1 = options_for(first);
  const auto o2 = options_for(second);
  const bool g1 = io::is_gaussian_transformation(j1, o1);
  if (g1 != io::is_gaussian_transformation(j2, o2)) throw InvalidArgument("cannot compose finite and Gaussian maps");
  if (g1) {
    const auto f1 = io::load_gaussian_transformation(j1, o1);
    const auto f2 = io::load_gaussian_transformation(j2, o2);
    const auto composite = gaussian::compose(f1.build(), f2.build());
    std::map<std::string, std::string> rho;
    for (const auto& [a, b] : f1.rho) {
      const auto it = f2.rho.find(b);
      if (it == f2.rho.end()) throw InvalidArgument("rho of the second map does not cover " + b);
      rho[a] = it->second;
    }
    const io::GaussianTransformationFile file{f1.source, f2.target, composite.map, composite.offset, composite.cov,
                                             rho};
    write_out(o, io::to_json(file));
    return emit(CheckReport::all_of("compose", gaussian::check_transformation(composite).children), o);
  }
  const auto c = compose(io::load_transformation(j1, o1), io::load_transformation(j2, o2));
  write_out(o, io::to_json(c.transformation));
  return emit(c.report, o);
}

int cmd_lemma(const std::string& id, std::size_t trials, std::uint64_t seed, const Output& o) {
  if (id != "all") return emit(oracle::lemma_suite(id, trials, seed), o);
  std::vector<CheckReport> all;
  for (const auto& l : oracle::lemma_ids()) all.push_back(oracle::lemma_suite(l, trials, seed));
  return emit(CheckReport::all_of("lemmas", std::move(all)), o);
}

int cmd_oracle(const std::string& predicate, const std::string& path, const std::string& on,
               const std::string& first, const std::string& second, const Output& o) {
  const auto p = oracle::parse_predicate(predicate);
  const Json j = read(path);
  if (io::kind_of(j) == io::Kind::kTransformation) {
    return emit(oracle::full_event_check(p, io::load_transformation(j, options_for(path))), o);
  }
  const auto space = io::load_space(j, options_for(path));
  const auto& s = space.space();
  oracle::SpaceQuery q{io::parse_coordinates(s, on), io::parse_coordinates(s, first),
                       io::parse_coordinates(s, second)};
  return emit(oracle::full_event_check(p, space, q), o);
}

int cmd_faithfulness(const Output& o) {
  auto reports = gaussian::faithfulness_demo();
  write_out(o, io::to_json(gaussian::faithfulness_scm()));
  // Both reports are printed; the demo itself passes when each report
  // shows what it is meant to show.
  return emit(CheckReport::all_of("faithfulness", {std::move(reports.full_system), std::move(reports.subsystem)}), o);
}

// Loads a document and prints it in canonical form.
int cmd_format(const std::string& path, const Output& o) {
  const Json j = read(path);
  const auto opts = options_for(path);
  Json doc;
  switch (io::kind_of(j)) {
    case io::Kind::kFiniteSpace: doc = io::to_json(io::load_space(j, opts)); break;
    case io::Kind::kFiniteScm: doc = io::to_json(io::load_scm(j, opts)); break;
    case io::Kind::kGaussianScm: doc = io::to_json(io::load_gaussian_scm(j)); break;
    case io::Kind::kGaussianSubsystem: doc = io::to_json(io::load_gaussian_subsystem(j, opts)); break;
    case io::Kind::kTransformation:
      doc = io::is_gaussian_transformation(j, opts) ? io::to_json(io::load_gaussian_transformation(j, opts))
                                                    : io::to_json(io::load_transformation(j, opts));
      break;
  }
  if (o.out.empty()) {
    std::cout << io::canonical(doc);
  } else {
    io::write_file(o.out, doc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causalkit: build, check and transform causal spaces"};
  app.require_subcommand(1);
  Output o;
  auto common = [&o](CLI::App* c, bool with_out) {
    c->add_flag("--json", o.json, "print the report as JSON");
    if (with_out) c->add_option("--out", o.out, "write the constructed object here");
  };
  std::function<int()> run;

  std::string path, path2, on, target, event, q, mechanism, assignment, a, b, first, second, map, rho, target_out;
  std::string id, predicate;
  std::size_t trials = 100;
  std::uint64_t seed = 20240611;
  bool all_events = false;

  auto* validate = app.add_subcommand("validate", "check the causal-space axioms");
  validate->add_option("space", path, "finite-space, finite-scm or gaussian-scm file")->required();
  common(validate, false);
  validate->callback([&] { run = [&] { return cmd_validate(path, o); }; });

  auto* intervene_cmd = app.add_subcommand("intervene", "intervene on a space");
  intervene_cmd->add_option("space", path)->required();
  intervene_cmd->add_option("--on", on, "intervened coordinates, e.g. X,Y");
  intervene_cmd->add_option("--q", q, "finite-space file whose measure is Q");
  intervene_cmd->add_option("--mechanism", mechanism, "finite-space file with the mechanism L");
  intervene_cmd->add_option("--do", assignment, "hard intervention, e.g. X=1");
  common(intervene_cmd, true);
  intervene_cmd->callback([&] { run = [&] { return cmd_intervene(path, on, q, mechanism, assignment, o); }; });

  auto* product_cmd = app.add_subcommand("product", "product of two causal spaces");
  product_cmd->add_option("first", path)->required();
  product_cmd->add_option("second", path2)->required();
  common(product_cmd, true);
  product_cmd->callback([&] { run = [&] { return cmd_product(path, path2, o); }; });

  auto* check = app.add_subcommand("check-transform", "admissibility and consistency of a transformation");
  check->add_option("transformation", path)->required();
  check->add_flag("--all-events", all_events, "check interventional consistency on every target event");
  common(check, false);
  check->callback([&] { run = [&] { return cmd_check_transform(path, all_events, o); }; });

  auto* classify = app.add_subcommand("classify", "classify the causal effect of H_U");
  classify->add_option("space", path)->required();
  classify->add_option("--on", on, "intervened coordinates U")->required();
  classify->add_option("--target", target, "target coordinates V");
  classify->add_option("--event", event, "target event, e.g. Y=1");
  common(classify, false);
  classify->callback([&] { run = [&] { return cmd_classify(path, on, target, event, o); }; });

  auto* source = app.add_subcommand("source", "is H_U a source of H_V (global when --target is omitted)");
  source->add_option("space", path)->required();
  source->add_option("--on", on, "conditioning coordinates U")->required();
  source->add_option("--target", target, "target coordinates V");
  source->add_option("--event", event, "target event");
  common(source, false);
  source->callback([&] { run = [&] { return cmd_source(path, on, target, event, o); }; });

  auto* independence = app.add_subcommand("independence", "causal independence on H_U");
  independence->add_option("space", path)->required();
  independence->add_option("--on", on, "intervened coordinates U")->required();
  independence->add_option("--a", a, "first event, e.g. X=1");
  independence->add_option("--b", b, "second event");
  independence->add_option("--first", first, "first coordinate set");
  independence->add_option("--second", second, "second coordinate set");
  common(independence, false);
  independence->callback([&] { run = [&] { return cmd_independence(path, on, a, b, first, second, o); }; });

  auto* abstract = app.add_subcommand("abstract", "pushforward of a space along (f, rho)");
  abstract->add_option("space", path)->required();
  abstract->add_option("--map", map, "target coordinates and outcome map")->required();
  abstract->add_option("--rho", rho, "index map as {source: target}")->required();
  abstract->add_option("--target-out", target_out, "write the target space here");
  common(abstract, true);
  abstract->callback([&] { run = [&] { return cmd_abstract(path, map, rho, target_out, o); }; });

  auto* compose_cmd = app.add_subcommand("compose", "compose two transformations and check the result");
  compose_cmd->add_option("first", path)->required();
  compose_cmd->add_option("second", path2)->required();
  common(compose_cmd, true);
  compose_cmd->callback([&] { run = [&] { return cmd_compose(path, path2, o); }; });

  auto* lemma = app.add_subcommand("lemma", "randomized lemma suite");
  lemma->add_option("id", id, "lemma id, or 'all'")->required();
  lemma->add_option("--trials", trials)->capture_default_str();
  lemma->add_option("--seed", seed)->capture_default_str();
  common(lemma, false);
  lemma->callback([&] { run = [&] { return cmd_lemma(id, trials, seed, o); }; });

  auto* oracle_cmd = app.add_subcommand("oracle", "compare a check with full event enumeration");
  oracle_cmd->add_option("predicate", predicate)->required();
  oracle_cmd->add_option("file", path)->required();
  oracle_cmd->add_option("--on", on);
  oracle_cmd->add_option("--first", first);
  oracle_cmd->add_option("--second", second);
  common(oracle_cmd, false);
  oracle_cmd->callback([&] { run = [&] { return cmd_oracle(predicate, path, on, first, second, o); }; });

  auto* faithfulness = app.add_subcommand("faithfulness", "Gaussian faithfulness-violation demo");
  common(faithfulness, true);
  faithfulness->callback([&] { run = [&] { return cmd_faithfulness(o); }; });

  auto* format = app.add_subcommand("format", "print a document in canonical form");
  format->add_option("file", path)->required();
  common(format, true);
  format->callback([&] { run = [&] { return cmd_format(path, o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
