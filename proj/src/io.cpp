#include "causalkit/io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "causalkit/error.hpp"

namespace causalkit::io {

namespace {

// Rejects missing required fields and any field not listed.
void require_fields(const Json& j, const std::string& what, std::initializer_list<const char*> required,
                    std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw ParseError(what + ": expected a JSON object");
  std::set<std::string> allowed;
  for (const char* r : required) {
    allowed.insert(r);
    if (!j.contains(r)) throw ParseError(what + ": missing field '" + r + "'");
  }
  for (const char* o : optional) allowed.insert(o);
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ParseError(what + ": unknown field '" + key + "'");
  }
}

const Json& array_field(const Json& j, const char* key, const std::string& what) {
  const Json& a = j.at(key);
  if (!a.is_array()) throw ParseError(what + ": '" + key + "' must be an array");
  return a;
}

std::string string_of(const Json& j, const std::string& what) {
  if (!j.is_string()) throw ParseError(what + ": expected a string");
  return j.get<std::string>();
}

std::size_t index_of(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ParseError(what + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

double number_of(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ParseError(what + ": expected a number");
  return j.get<double>();
}

Rational rational_of(const Json& j, const std::string& what) {
  if (!j.is_string()) throw ParseError(what + ": probabilities are written as strings such as \"3/8\"");
  return parse_rational(j.get<std::string>());
}

std::string subset_key(const CoordinateSpace& space, CoordSet s) {
  auto names = space.names_of(s);
  std::sort(names.begin(), names.end());
  std::string key;
  for (std::size_t i = 0; i < names.size(); ++i) key += (i ? "," : "") + names[i];
  return key;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : cur.substr(b, e - b + 1));
  }
  return out;
}

Json row_json(const SparseRow& row) {
  Json out = Json::array();
  for (const auto& e : row) out.push_back(Json::array({e.outcome, causalkit::to_string(e.weight)}));
  return out;
}

SparseRow row_of(const Json& j, std::size_t codomain_size, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": a kernel row is an array of [outcome, \"weight\"] pairs");
  SparseRow row;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ParseError(what + ": a kernel row entry is [outcome, \"weight\"]");
    const std::size_t o = index_of(e[0], what);
    if (o >= codomain_size) throw ParseError(what + ": outcome " + std::to_string(o) + " out of range");
    Rational w = rational_of(e[1], what);
    if (w == 0) continue;
    row.push_back({o, std::move(w)});
  }
  return row;
}

Json coordinates_json(const CoordinateSpace& space) {
  Json out = Json::array();
  for (const auto& c : space.coordinates()) out.push_back({{"name", c.name}, {"cardinality", c.cardinality}});
  return out;
}

CoordinateSpace coordinates_of(const Json& j, const LoadOptions& options, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": 'coordinates' must be an array");
  std::vector<Coordinate> coords;
  for (const auto& c : j) {
    require_fields(c, what + " coordinate", {"name", "cardinality"});
    coords.push_back({string_of(c.at("name"), what), index_of(c.at("cardinality"), what)});
  }
  return CoordinateSpace(std::move(coords), options.max_outcomes);
}

Json matrix_json(const gaussian::Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json vector_json(const gaussian::Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

gaussian::Matrix matrix_of(const Json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
  }
  gaussian::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ParseError(what + ": expected " + std::to_string(cols) + " columns in every row");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = number_of(row[static_cast<std::size_t>(k)], what);
  }
  return m;
}

gaussian::Vector vector_of(const Json& j, Eigen::Index size, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw ParseError(what + ": expected " + std::to_string(size) + " entries");
  }
  gaussian::Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = number_of(j[static_cast<std::size_t>(i)], what);
  return v;
}

// A nested document, or a path to one relative to the referring file.
Json resolve(const Json& j, const LoadOptions& options, LoadOptions& nested) {
  nested = options;
  if (j.is_string()) {
    const auto path = options.base_dir / j.get<std::string>();
    nested.base_dir = path.parent_path();
    return read_file(path);
  }
  return j;
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::kFiniteSpace: return "finite-space";
    case Kind::kFiniteScm: return "finite-scm";
    case Kind::kGaussianScm: return "gaussian-scm";
    case Kind::kGaussianSubsystem: return "gaussian-subsystem";
    case Kind::kTransformation: return "transformation";
  }
  return "?";
}

Kind kind_of(const Json& json) {
  if (!json.is_object() || !json.contains("kind") || !json.at("kind").is_string()) {
    throw ParseError("document has no 'kind' field");
  }
  const auto k = json.at("kind").get<std::string>();
  for (Kind c : {Kind::kFiniteSpace, Kind::kFiniteScm, Kind::kGaussianScm, Kind::kGaussianSubsystem,
                 Kind::kTransformation}) {
    if (k == to_string(c)) return c;
  }
  throw ParseError("unknown document kind '" + k + "'");
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string canonical(const Json& json) { return json.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const Json& json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << canonical(json);
}

// --- finite spaces ---------------------------------------------------------

Json to_json(const FiniteCausalSpace& space) {
  const auto& s = space.space();
  Json measure = Json::array();
  for (const auto& w : space.measure().weights()) measure.push_back(causalkit::to_string(w));
  Json kernels = Json::object();
  for (const auto& [subset, k] : space.kernels()) {
    Json rows = Json::array();
    for (const auto& r : k.rows()) rows.push_back(row_json(r));
    kernels[subset_key(s, subset)] = std::move(rows);
  }
  return {{"kind", "finite-space"}, {"coordinates", coordinates_json(s)}, {"measure", measure}, {"kernels", kernels}};
}

FiniteCausalSpace load_space(const Json& json, const LoadOptions& options) {
  const Kind kind = kind_of(json);
  if (kind == Kind::kFiniteScm) return compile(load_scm(json, options));
  if (kind != Kind::kFiniteSpace) throw ParseError("expected a finite-space or finite-scm document");
  const std::string what = "finite-space";
  require_fields(json, what, {"kind", "coordinates", "measure", "kernels"});
  const auto space = coordinates_of(json.at("coordinates"), options, what);
  const auto& m = array_field(json, "measure", what);
  if (m.size() != space.outcome_count()) {
    throw ParseError(what + ": measure needs " + std::to_string(space.outcome_count()) + " weights");
  }
  std::vector<Rational> weights;
  for (const auto& w : m) weights.push_back(rational_of(w, what));
  FiniteMeasure measure(space, std::move(weights));

  const auto& k = json.at("kernels");
  if (k.is_string()) {
    const auto family = k.get<std::string>();
    if (family == "independent") return independent_mechanism(measure);
    if (family == "observational") return observational_mechanism(measure);
    throw ParseError(what + ": kernel family must be \"independent\" or \"observational\"");
  }
  if (!k.is_object()) throw ParseError(what + ": 'kernels' must be an object or a kernel family name");
  if (space.dimension() > kMaxCausalCoordinates) throw CapExceeded(what + ": too many coordinates to tabulate");
  std::map<std::string, CoordSet> by_key;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << space.dimension()); ++bits) {
    by_key[subset_key(space, CoordSet(bits))] = CoordSet(bits);
  }
  std::map<CoordSet, StochKernel> kernels;
  for (const auto& [key, rows_json] : k.items()) {
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw ParseError(what + ": kernel key '" + key + "' is not a sorted list of coordinate names");
    }
    const CoordinateSpace domain = space.restrict(it->second);
    if (!rows_json.is_array() || rows_json.size() != domain.outcome_count()) {
      throw ParseError(what + ": kernel '" + key + "' needs " + std::to_string(domain.outcome_count()) + " rows");
    }
    std::vector<SparseRow> rows;
    for (const auto& r : rows_json) rows.push_back(row_of(r, space.outcome_count(), what + " kernel '" + key + "'"));
    try {
      kernels.emplace(it->second, StochKernel(domain, space, std::move(rows)));
    } catch (const InvalidArgument& e) {
      throw ParseError(what + ": kernel '" + key + "': " + e.what());
    }
  }
  return FiniteCausalSpace::tabulated(std::move(measure), std::move(kernels));
}

// --- finite SCMs -----------------------------------------------------------

Json to_json(const FiniteSCM& scm) {
  Json vars = Json::array();
  for (const auto& v : scm.variables()) {
    Json noise = Json::array();
    for (const auto& w : v.noise) noise.push_back(causalkit::to_string(w));
    vars.push_back({{"name", v.name},
                    {"cardinality", v.cardinality},
                    {"parents", v.parents},
                    {"noise", noise},
                    {"mechanism", v.mechanism}});
  }
  return {{"kind", "finite-scm"}, {"variables", vars}};
}

FiniteSCM load_scm(const Json& json, const LoadOptions& options) {
  const std::string what = "finite-scm";
  if (kind_of(json) != Kind::kFiniteScm) throw ParseError("expected a finite-scm document");
  require_fields(json, what, {"kind", "variables"});
  std::vector<ScmVariable> vars;
  for (const auto& v : array_field(json, "variables", what)) {
    require_fields(v, what + " variable", {"name", "cardinality", "parents", "noise", "mechanism"});
    ScmVariable var;
    var.name = string_of(v.at("name"), what);
    var.cardinality = index_of(v.at("cardinality"), what);
    for (const auto& p : array_field(v, "parents", what)) var.parents.push_back(string_of(p, what));
    for (const auto& w : array_field(v, "noise", what)) var.noise.push_back(rational_of(w, what));
    for (const auto& m : array_field(v, "mechanism", what)) var.mechanism.push_back(index_of(m, what));
    vars.push_back(std::move(var));
  }
  return FiniteSCM(std::move(vars), options.max_outcomes);
}

// --- transformations ---------------------------------------------------------

Json to_json(const Transformation& t) {
  Json out{{"kind", "transformation"},
           {"source", to_json(t.source())},
           {"target", to_json(t.target())},
           {"rho", t.rho().names()}};
  const auto& s1 = t.source().space();
  const auto& s2 = t.target().space();
  if (t.is_deterministic()) {
    Json map = Json::array();
    for (std::size_t o = 0; o < s1.outcome_count(); ++o) map.push_back(s2.digits(t.map()[o]));
    out["map"] = std::move(map);
  } else {
    Json rows = Json::array();
    for (const auto& r : t.kernel().rows()) rows.push_back(row_json(r));
    out["kernel"] = std::move(rows);
  }
  return out;
}

Transformation load_transformation(const Json& json, const LoadOptions& options) {
  const std::string what = "transformation";
  if (kind_of(json) != Kind::kTransformation) throw ParseError("expected a transformation document");
  if (json.contains("matrix")) throw ParseError(what + ": this is a Gaussian transformation");
  require_fields(json, what, {"kind", "source", "target", "rho"}, {"map", "kernel"});
  if (json.contains("map") == json.contains("kernel")) {
    throw ParseError(what + ": exactly one of 'map' and 'kernel' is required");
  }
  LoadOptions nested;
  const auto source = load_space(resolve(json.at("source"), options, nested), nested);
  const auto target = load_space(resolve(json.at("target"), options, nested), nested);
  const auto& s1 = source.space();
  const auto& s2 = target.space();
  const auto& rho_json = json.at("rho");
  if (!rho_json.is_object()) throw ParseError(what + ": 'rho' must map source names to target names");
  std::map<std::string, std::string> rho_names;
  for (const auto& [k, v] : rho_json.items()) rho_names[k] = string_of(v, what + " rho");
  IndexMap rho(s1, s2, rho_names);

  if (json.contains("map")) {
    const auto& m = array_field(json, "map", what);
    if (m.size() != s1.outcome_count()) {
      throw ParseError(what + ": map needs one target outcome per source outcome (" +
                       std::to_string(s1.outcome_count()) + ")");
    }
    std::vector<std::size_t> f;
    for (const auto& entry : m) {
      if (!entry.is_array() || entry.size() != s2.dimension()) {
        throw ParseError(what + ": each map entry lists the target coordinate values");
      }
      std::vector<std::size_t> digits;
      for (std::size_t i = 0; i < entry.size(); ++i) {
        const std::size_t d = index_of(entry[i], what);
        if (d >= s2.coordinate(i).cardinality) throw ParseError(what + ": map value out of range");
        digits.push_back(d);
      }
      f.push_back(s2.encode(digits));
    }
    return Transformation::deterministic(source, target, std::move(f), std::move(rho));
  }
  const auto& rows_json = array_field(json, "kernel", what);
  if (rows_json.size() != s1.outcome_count()) throw ParseError(what + ": kernel needs one row per source outcome");
  std::vector<SparseRow> rows;
  for (const auto& r : rows_json) rows.push_back(row_of(r, s2.outcome_count(), what + " kernel"));
  try {
    return Transformation::stochastic(source, target, StochKernel(s1, s2, std::move(rows)), std::move(rho));
  } catch (const InvalidArgument& e) {
    throw ParseError(what + ": " + e.what());
  }
}

// --- Gaussian --------------------------------------------------------------

Json to_json(const gaussian::LinearGaussianSCM& scm) {
  std::vector<std::string> order;
  for (std::size_t i : scm.order()) order.push_back(scm.names()[i]);
  return {{"kind", "gaussian-scm"},
          {"variables", scm.names()},
          {"coefficients", matrix_json(scm.coefficients())},
          {"noise_variances", vector_json(scm.noise_variances())},
          {"noise_means", vector_json(scm.noise_means())},
          {"order", order}};
}

gaussian::LinearGaussianSCM load_gaussian_scm(const Json& json) {
  const std::string what = "gaussian-scm";
  if (kind_of(json) != Kind::kGaussianScm) throw ParseError("expected a gaussian-scm document");
  require_fields(json, what, {"kind", "variables", "coefficients", "noise_variances"}, {"noise_means", "order"});
  std::vector<std::string> names;
  for (const auto& n : array_field(json, "variables", what)) names.push_back(string_of(n, what));
  const auto n = static_cast<Eigen::Index>(names.size());
  auto b = matrix_of(json.at("coefficients"), n, n, what + " coefficients");
  auto d = vector_of(json.at("noise_variances"), n, what + " noise_variances");
  gaussian::Vector mu = json.contains("noise_means") ? vector_of(json.at("noise_means"), n, what + " noise_means")
                                                     : gaussian::Vector::Zero(n);
  std::vector<std::size_t> order;
  if (json.contains("order")) {
    for (const auto& o : array_field(json, "order", what)) {
      const auto name = string_of(o, what);
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw ParseError(what + ": order names unknown variable '" + name + "'");
      order.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    if (order.empty() && n > 0) throw ParseError(what + ": order must list every variable");
  }
  return gaussian::LinearGaussianSCM(std::move(names), std::move(b), std::move(d), std::move(mu), std::move(order));
}

gaussian::GaussianTransformation GaussianTransformationFile::build() const {
  auto t = gaussian::GaussianTransformation::linear(gaussian::GaussianCausalSpace::from_scm(source),
                                                    gaussian::GaussianCausalSpace::from_scm(target), map,
                                                    gaussian::index_map(source.names(), target.names(), rho));
  t.offset = offset;
  t.cov = cov;
  return t;
}

bool is_gaussian_transformation(const Json& json, const LoadOptions& options) {
  if (kind_of(json) != Kind::kTransformation || !json.contains("source")) return false;
  if (json.contains("matrix")) return true;
  LoadOptions nested;
  const Json source = resolve(json.at("source"), options, nested);
  return kind_of(source) == Kind::kGaussianScm;
}

GaussianTransformationFile load_gaussian_transformation(const Json& json, const LoadOptions& options) {
  const std::string what = "transformation";
  if (kind_of(json) != Kind::kTransformation) throw ParseError("expected a transformation document");
  require_fields(json, what, {"kind", "source", "target", "rho", "matrix"}, {"offset", "cov"});
  LoadOptions nested;
  auto source = load_gaussian_scm(resolve(json.at("source"), options, nested));
  auto target = load_gaussian_scm(resolve(json.at("target"), options, nested));
  const auto n1 = static_cast<Eigen::Index>(source.dimension());
  const auto n2 = static_cast<Eigen::Index>(target.dimension());
  auto map = matrix_of(json.at("matrix"), n2, n1, what + " matrix");
  gaussian::Vector offset =
      json.contains("offset") ? vector_of(json.at("offset"), n2, what + " offset") : gaussian::Vector::Zero(n2);
  gaussian::Matrix cov =
      json.contains("cov") ? matrix_of(json.at("cov"), n2, n2, what + " cov") : gaussian::Matrix::Zero(n2, n2);
  const auto& rho_json = json.at("rho");
  if (!rho_json.is_object()) throw ParseError(what + ": 'rho' must map source names to target names");
  std::map<std::string, std::string> rho;
  for (const auto& [k, v] : rho_json.items()) rho[k] = string_of(v, what + " rho");
  return {std::move(source), std::move(target), std::move(map), std::move(offset), std::move(cov), std::move(rho)};
}

Json to_json(const GaussianTransformationFile& t) {
  return {{"kind", "transformation"},   {"source", to_json(t.source)}, {"target", to_json(t.target)},
          {"rho", t.rho},               {"matrix", matrix_json(t.map)}, {"offset", vector_json(t.offset)},
          {"cov", matrix_json(t.cov)}};
}

gaussian::GaussianCausalSpace GaussianSubsystemFile::build() const {
  const auto visible_part = gaussian::marginalize(gaussian::GaussianCausalSpace::from_scm(system), visible);
  if (marginalized) return visible_part;
  return gaussian::GaussianCausalSpace::independent(visible_part.names(), visible_part.law());
}

GaussianSubsystemFile load_gaussian_subsystem(const Json& json, const LoadOptions& options) {
  const std::string what = "gaussian-subsystem";
  if (kind_of(json) != Kind::kGaussianSubsystem) throw ParseError("expected a gaussian-subsystem document");
  require_fields(json, what, {"kind", "system", "visible", "kernels"});
  LoadOptions nested;
  GaussianSubsystemFile out{load_gaussian_scm(resolve(json.at("system"), options, nested)), {}, true};
  for (const auto& n : array_field(json, "visible", what)) out.visible.push_back(string_of(n, what));
  try {
    out.system.subset(out.visible);
  } catch (const InvalidArgument& e) {
    throw ParseError(what + ": " + e.what());
  }
  const auto kernels = string_of(json.at("kernels"), what);
  if (kernels == "independent") {
    out.marginalized = false;
  } else if (kernels != "marginalized") {
    throw ParseError(what + ": kernels must be 'marginalized' or 'independent'");
  }
  return out;
}

Json to_json(const GaussianSubsystemFile& s) {
  return {{"kind", "gaussian-subsystem"},
          {"system", to_json(s.system)},
          {"visible", s.visible},
          {"kernels", s.marginalized ? "marginalized" : "independent"}};
}

// --- reports ---------------------------------------------------------------

Json to_json(const CheckReport& report) {
  Json out{{"check", report.check}, {"passed", report.passed}, {"message", report.message}, {"notes", report.notes}};
  if (report.witness) {
    const auto& w = *report.witness;
    out["witness"] = {{"subset", w.subset}, {"omega", w.omega}, {"omega_other", w.omega_other},
                      {"event", w.event},   {"lhs", w.lhs},     {"rhs", w.rhs}};
  } else {
    out["witness"] = nullptr;
  }
  Json children = Json::array();
  for (const auto& c : report.children) children.push_back(to_json(c));
  out["children"] = std::move(children);
  return out;
}

CheckReport load_report(const Json& json) {
  const std::string what = "report";
  require_fields(json, what, {"check", "passed", "message", "notes", "witness", "children"});
  CheckReport r;
  r.check = string_of(json.at("check"), what);
  if (!json.at("passed").is_boolean()) throw ParseError(what + ": 'passed' must be a boolean");
  r.passed = json.at("passed").get<bool>();
  r.message = string_of(json.at("message"), what);
  for (const auto& n : array_field(json, "notes", what)) r.notes.push_back(string_of(n, what));
  if (!json.at("witness").is_null()) {
    const auto& w = json.at("witness");
    require_fields(w, what + " witness", {"subset", "omega", "omega_other", "event", "lhs", "rhs"});
    Witness wit;
    for (const auto& s : array_field(w, "subset", what)) wit.subset.push_back(string_of(s, what));
    wit.omega = string_of(w.at("omega"), what);
    wit.omega_other = string_of(w.at("omega_other"), what);
    wit.event = string_of(w.at("event"), what);
    wit.lhs = string_of(w.at("lhs"), what);
    wit.rhs = string_of(w.at("rhs"), what);
    r.witness = std::move(wit);
  }
  for (const auto& c : array_field(json, "children", what)) r.children.push_back(load_report(c));
  return r;
}

// --- command-line fragments ------------------------------------------------

CoordSet parse_coordinates(const CoordinateSpace& space, const std::string& text) {
  const auto names = split(text, ',');
  for (const auto& n : names) {
    if (!space.has_coordinate(n)) throw InvalidArgument("unknown coordinate '" + n + "'");
  }
  return space.subset(names);
}

Event parse_event(const CoordinateSpace& space, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) return Event::full(space);
  std::vector<std::string> names;
  std::map<std::string, std::size_t> values;
  for (const auto& p : parts) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw InvalidArgument("event term '" + p + "' is not of the form NAME=VALUE");
    const auto name = p.substr(0, eq);
    if (!space.has_coordinate(name)) throw InvalidArgument("unknown coordinate '" + name + "'");
    std::size_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoul(p.substr(eq + 1), &used);
      if (used != p.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidArgument("event term '" + p + "' has a malformed value");
    }
    if (value >= space.coordinate(space.position_of(name)).cardinality) {
      throw InvalidArgument("event term '" + p + "' is out of range");
    }
    if (values.count(name)) throw InvalidArgument("coordinate '" + name + "' fixed twice");
    values[name] = value;
    names.push_back(name);
  }
  const CoordSet s = space.subset(names);
  const auto restricted = space.restrict(s);
  std::vector<std::size_t> digits;
  for (const auto& n : restricted.names()) digits.push_back(values[n]);
  return Event::cylinder(space, s, restricted.encode(digits));
}

std::size_t max_outcomes_from_env() {
  const char* v = std::getenv("CAUSALKIT_MAX_OUTCOMES");
  if (v == nullptr || *v == '\0') return kDefaultMaxOutcomes;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end != '\0' || n == 0 || v[0] == '-') {
    throw InvalidArgument(std::string("CAUSALKIT_MAX_OUTCOMES must be a positive integer, got '") + v + "'");
  }
  return static_cast<std::size_t>(n);
}

}  // namespace causalkit::io
