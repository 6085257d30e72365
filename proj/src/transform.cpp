#include "causalkit/transform.hpp"

#include <algorithm>
#include <bit>

#include "causalkit/error.hpp"

namespace causalkit {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ",") + n;
  return out;
}

std::vector<std::string> sorted_names(const CoordinateSpace& space, CoordSet s) {
  auto names = space.names_of(s);
  std::sort(names.begin(), names.end());
  return names;
}

std::string braces(const CoordinateSpace& space, CoordSet s) {
  return "{" + join(sorted_names(space, s)) + "}";
}

CoordSet image_of(const std::vector<std::size_t>& positions) {
  std::uint64_t bits = 0;
  for (std::size_t p : positions) bits |= std::uint64_t{1} << p;
  return CoordSet(bits);
}

}  // namespace

// ---------------------------------------------------------------------------
// IndexMap

IndexMap::IndexMap(const CoordinateSpace& source, const CoordinateSpace& target,
                   const std::map<std::string, std::string>& rho)
    : source_(source), target_(target) {
  for (const auto& [from, to] : rho) {
    if (!source.has_coordinate(from)) {
      throw InvalidArgument("rho maps unknown source coordinate '" + from + "'");
    }
    if (!target.has_coordinate(to)) {
      throw InvalidArgument("rho maps '" + from + "' to unknown target coordinate '" + to + "'");
    }
  }
  for (const auto& c : source.coordinates()) {
    auto it = rho.find(c.name);
    if (it == rho.end()) {
      throw InvalidArgument("rho is not defined on source coordinate '" + c.name + "'");
    }
    positions_.push_back(target.position_of(it->second));
  }
  image_ = image_of(positions_);
}

IndexMap::IndexMap(const CoordinateSpace& source, const CoordinateSpace& target,
                   std::vector<std::size_t> positions)
    : source_(source), target_(target), positions_(std::move(positions)) {
  if (positions_.size() != source.dimension()) {
    throw InvalidArgument("rho must be defined on every source coordinate");
  }
  for (std::size_t p : positions_) {
    if (p >= target.dimension()) {
      throw InvalidArgument("rho maps to a position outside the target");
    }
  }
  image_ = image_of(positions_);
}

IndexMap IndexMap::identity(const CoordinateSpace& space) {
  std::vector<std::size_t> positions(space.dimension());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
  return IndexMap(space, space, std::move(positions));
}

CoordSet IndexMap::apply(CoordSet source_subset) const {
  std::uint64_t bits = 0;
  for (std::size_t p : source_subset.positions()) bits |= std::uint64_t{1} << positions_[p];
  return CoordSet(bits);
}

CoordSet IndexMap::preimage(CoordSet target_subset) const {
  std::uint64_t bits = 0;
  for (std::size_t p = 0; p < positions_.size(); ++p) {
    if (target_subset.contains(positions_[p])) bits |= std::uint64_t{1} << p;
  }
  return CoordSet(bits);
}

IndexMap IndexMap::then(const IndexMap& next) const {
  if (!(target_ == next.source_)) {
    throw SpaceMismatch("index maps do not chain: target of the first is not the source of the second");
  }
  std::vector<std::size_t> positions(positions_.size());
  for (std::size_t p = 0; p < positions.size(); ++p) positions[p] = next.positions_[positions_[p]];
  return IndexMap(source_, next.target_, std::move(positions));
}

IndexMap IndexMap::restrict(CoordSet subset) const {
  source_.require_subset(subset);
  const CoordSet img = apply(subset);
  std::vector<std::size_t> positions;
  for (std::size_t p : subset.positions()) {
    const std::uint64_t below = img.bits() & ((std::uint64_t{1} << positions_[p]) - 1);
    positions.push_back(static_cast<std::size_t>(std::popcount(below)));
  }
  return IndexMap(source_.restrict(subset), target_.restrict(img), std::move(positions));
}

std::map<std::string, std::string> IndexMap::names() const {
  std::map<std::string, std::string> out;
  for (std::size_t p = 0; p < positions_.size(); ++p) {
    out.emplace(source_.coordinate(p).name, target_.coordinate(positions_[p]).name);
  }
  return out;
}

bool IndexMap::operator==(const IndexMap& other) const {
  return source_ == other.source_ && target_ == other.target_ && positions_ == other.positions_;
}

// ---------------------------------------------------------------------------
// Transformation

Transformation::Transformation(FiniteCausalSpace source, FiniteCausalSpace target, StochKernel kappa,
                               std::optional<std::vector<std::size_t>> f, IndexMap rho)
    : source_(std::move(source)),
      target_(std::move(target)),
      kappa_(std::move(kappa)),
      f_(std::move(f)),
      rho_(std::move(rho)) {
  if (!(kappa_.domain() == source_.space()) || !(kappa_.codomain() == target_.space())) {
    throw SpaceMismatch("kernel must map the source outcome space to the target outcome space");
  }
  if (!(rho_.source() == source_.space()) || !(rho_.target() == target_.space())) {
    throw SpaceMismatch("rho must map source coordinates to target coordinates");
  }
}

Transformation Transformation::stochastic(FiniteCausalSpace source, FiniteCausalSpace target,
                                          StochKernel kappa, IndexMap rho) {
  return Transformation(std::move(source), std::move(target), std::move(kappa), std::nullopt,
                        std::move(rho));
}

Transformation Transformation::deterministic(FiniteCausalSpace source, FiniteCausalSpace target,
                                             std::vector<std::size_t> f, IndexMap rho) {
  if (f.size() != source.space().outcome_count()) {
    throw InvalidArgument("deterministic map must give an image for every source outcome");
  }
  for (std::size_t v : f) {
    if (v >= target.space().outcome_count()) {
      throw InvalidArgument("deterministic map has an image outside the target outcome space");
    }
  }
  StochKernel kappa = StochKernel::deterministic(source.space(), target.space(), f);
  return Transformation(std::move(source), std::move(target), std::move(kappa), std::move(f),
                        std::move(rho));
}

const std::vector<std::size_t>& Transformation::map() const {
  if (!f_) {
    throw InvalidArgument("transformation is not deterministic");
  }
  return *f_;
}

Transformation Transformation::with_target(FiniteCausalSpace target) const {
  if (!(target.space() == target_.space())) {
    throw SpaceMismatch("replacement target lives on a different outcome space");
  }
  return Transformation(source_, std::move(target), kappa_, f_, rho_);
}

// ---------------------------------------------------------------------------
// Checks

CheckReport check_admissible(const Transformation& t) {
  const auto& s1 = t.source().space();
  const auto& s2 = t.target().space();
  const auto& kappa = t.kernel();
  const auto& rho = t.rho();
  for (CoordSet s : canonical_subsets(s2, rho.image())) {
    if (s.empty()) continue;
    const CoordSet pre = rho.preimage(s);
    const auto outside = (s1.all() - pre).positions();
    std::vector<std::vector<Rational>> marginal(s1.outcome_count());
    for (std::size_t o = 0; o < s1.outcome_count(); ++o) {
      marginal[o] = marginal_of_row(kappa.row(o), s2, s);
    }
    // Fibers of omega_{rho^-1(S)} are connected by single-coordinate moves,
    // so comparing omega with omega[c := 0] for every c outside covers them.
    for (std::size_t o = 0; o < s1.outcome_count(); ++o) {
      for (std::size_t c : outside) {
        if (s1.digit(o, c) == 0) continue;
        const std::size_t base = s1.assign(o, CoordSet::single(c), 0);
        if (marginal[o] == marginal[base]) continue;
        std::size_t atom = 0;
        while (marginal[o][atom] == marginal[base][atom]) ++atom;
        return CheckReport::fail(
            "admissible",
            "output coordinates " + braces(s2, s) + " depend on source coordinate " +
                s1.coordinate(c).name + ", outside rho^-1(S) = " + braces(s1, pre),
            Witness{sorted_names(s2, s), s1.describe(base), s1.describe(o),
                    Event::cylinder(s2, s, atom).describe(), to_string(marginal[base][atom]),
                    to_string(marginal[o][atom])});
      }
    }
  }
  return CheckReport::pass("admissible");
}

CheckReport check_distributional(const Transformation& t) {
  const auto& p1 = t.source().measure();
  const auto& p2 = t.target().measure();
  const auto& s2 = t.target().space();
  std::vector<Rational> pushed(s2.outcome_count(), Rational(0));
  for (std::size_t o = 0; o < p1.space().outcome_count(); ++o) {
    if (p1.weight(o) == 0) continue;
    for (const auto& e : t.kernel().row(o)) pushed[e.outcome] += p1.weight(o) * e.weight;
  }
  for (std::size_t o = 0; o < s2.outcome_count(); ++o) {
    if (pushed[o] != p2.weight(o)) {
      return CheckReport::fail("distributional",
                               "the image of P1 under kappa differs from P2",
                               Witness{{}, {}, {}, "{" + s2.describe(o) + "}", to_string(pushed[o]),
                                       to_string(p2.weight(o))});
    }
  }
  return CheckReport::pass("distributional");
}

CheckReport check_interventional(const Transformation& t, EventScope scope) {
  const auto& s1 = t.source().space();
  const auto& s2 = t.target().space();
  const auto& kappa = t.kernel();
  const auto& rho = t.rho();
  const CoordSet frame = scope == EventScope::kImage ? rho.image() : s2.all();
  const std::size_t cells = s2.restrict(frame).outcome_count();

  for (CoordSet s : canonical_subsets(s2, rho.image())) {
    const CoordSet pre = rho.preimage(s);
    const auto& k1 = t.source().kernel(pre);
    const auto& k2 = t.target().kernel(s);
    // Left side depends on omega only through omega_{rho^-1(S)}.
    std::vector<std::optional<std::vector<Rational>>> lhs_cache(k1.row_count());
    for (std::size_t o = 0; o < s1.outcome_count(); ++o) {
      const std::size_t r = s1.project(o, pre);
      if (!lhs_cache[r]) {
        lhs_cache[r] = marginal_of_row(mix_rows(k1.row(r), kappa), s2, frame);
      }
      const auto& lhs = *lhs_cache[r];
      std::vector<Rational> rhs(cells, Rational(0));
      for (const auto& e : kappa.row(o)) {
        for (const auto& f : k2.row(s2.project(e.outcome, s))) {
          rhs[s2.project(f.outcome, frame)] += e.weight * f.weight;
        }
      }
      if (lhs == rhs) continue;
      std::size_t atom = 0;
      while (lhs[atom] == rhs[atom]) ++atom;
      auto report = CheckReport::fail(
          "interventional",
          "intervening on " + braces(s1, pre) + " then transforming differs from transforming then "
          "intervening on " + braces(s2, s),
          Witness{sorted_names(s2, s), s1.describe(o), {},
                  Event::cylinder(s2, frame, atom).describe(), to_string(lhs[atom]),
                  to_string(rhs[atom])});
      report.notes.push_back("lhs = (K1_{rho^-1(S)} kappa)(omega, A), rhs = (kappa K2_S)(omega, A)");
      return report;
    }
  }
  auto report = CheckReport::pass("interventional");
  if (scope == EventScope::kAllEvents) report.notes.push_back("checked on every event of Omega2");
  return report;
}

CheckReport check_transformation(const Transformation& t) {
  return CheckReport::all_of("causal_transformation",
                             {check_admissible(t), check_distributional(t), check_interventional(t)});
}

bool is_abstraction(const Transformation& t) { return t.rho().surjective(); }

bool is_perfect_abstraction(const Transformation& t) {
  if (!is_abstraction(t) || !t.is_deterministic()) return false;
  std::vector<bool> hit(t.target().space().outcome_count(), false);
  for (std::size_t v : t.map()) hit[v] = true;
  return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
}

Composition compose(const Transformation& first, const Transformation& second) {
  if (!same_causal_space(first.target(), second.source())) {
    throw SpaceMismatch("compose: target of the first transformation is not the source of the second");
  }
  const IndexMap rho = first.rho().then(second.rho());
  std::optional<Transformation> composite;
  if (first.is_deterministic() && second.is_deterministic()) {
    std::vector<std::size_t> f(first.map().size());
    for (std::size_t o = 0; o < f.size(); ++o) f[o] = second.map()[first.map()[o]];
    composite = Transformation::deterministic(first.source(), second.target(), std::move(f), rho);
  } else {
    composite = Transformation::stochastic(first.source(), second.target(),
                                           kernel_compose(first.kernel(), second.kernel()), rho);
  }
  CheckReport report = check_transformation(*composite);
  report.check = "compose";
  const bool first_ok = check_transformation(first).passed;
  const bool second_ok = check_transformation(second).passed;
  if (is_abstraction(first) && first_ok && second_ok) {
    report.notes.push_back(
        "covered by the composition guarantee: the first map is an abstraction and both maps are "
        "causal transformations");
  } else {
    std::string why;
    if (!is_abstraction(first)) why = "the first map is not an abstraction";
    if (!first_ok) why += std::string(why.empty() ? "" : "; ") + "the first map is not a causal transformation";
    if (!second_ok) why += std::string(why.empty() ? "" : "; ") + "the second map is not a causal transformation";
    report.notes.push_back("not covered by the composition guarantee: " + why);
  }
  return {std::move(*composite), std::move(report)};
}

// ---------------------------------------------------------------------------
// Pushforward construction

namespace {

void require_map(const CoordinateSpace& s1, const CoordinateSpace& s2, std::span<const std::size_t> f) {
  if (f.size() != s1.outcome_count()) {
    throw InvalidArgument("deterministic map must give an image for every source outcome");
  }
  for (std::size_t v : f) {
    if (v >= s2.outcome_count()) {
      throw InvalidArgument("deterministic map has an image outside the target outcome space");
    }
  }
}

// f(omega)_s may depend on omega only through omega_{rho^-1(s)}; checking
// single target coordinates is enough because rho^-1 commutes with unions.
void require_admissible_map(const CoordinateSpace& s1, const CoordinateSpace& s2,
                            std::span<const std::size_t> f, const IndexMap& rho) {
  for (std::size_t t = 0; t < s2.dimension(); ++t) {
    const CoordSet pre = rho.preimage(CoordSet::single(t));
    for (std::size_t o = 0; o < s1.outcome_count(); ++o) {
      for (std::size_t c : (s1.all() - pre).positions()) {
        if (s1.digit(o, c) == 0) continue;
        const std::size_t base = s1.assign(o, CoordSet::single(c), 0);
        if (s2.digit(f[o], t) != s2.digit(f[base], t)) {
          throw InvalidArgument("(f, rho) is not admissible: output coordinate " +
                                s2.coordinate(t).name + " depends on source coordinate " +
                                s1.coordinate(c).name + " (omega=" + s1.describe(base) +
                                ", omega'=" + s1.describe(o) + ")");
        }
      }
    }
  }
}

}  // namespace

FiniteCausalSpace pushforward_space(const FiniteCausalSpace& source, std::span<const std::size_t> f,
                                    const IndexMap& rho) {
  const auto& s1 = source.space();
  const CoordinateSpace s2 = rho.target();
  if (!(rho.source() == s1)) {
    throw SpaceMismatch("rho does not start from the source coordinates");
  }
  require_map(s1, s2, f);
  if (!rho.surjective()) {
    throw NotSurjective("rho misses target coordinates " + braces(s2, s2.all() - rho.image()));
  }
  std::vector<bool> hit(s2.outcome_count(), false);
  for (std::size_t v : f) hit[v] = true;
  for (std::size_t o = 0; o < hit.size(); ++o) {
    if (!hit[o]) throw NotSurjective("f does not reach " + s2.describe(o));
  }
  require_admissible_map(s1, s2, f, rho);

  std::vector<Rational> weights(s2.outcome_count(), Rational(0));
  for (std::size_t o = 0; o < s1.outcome_count(); ++o) weights[f[o]] += source.measure().weight(o);
  FiniteMeasure p2(s2, std::move(weights));

  std::map<CoordSet, StochKernel> kernels;
  for (CoordSet s : canonical_subsets(s2)) {
    const CoordSet pre = rho.preimage(s);
    const auto& k1 = source.kernel(pre);
    const CoordinateSpace sub = s2.restrict(s);
    std::vector<std::optional<SparseRow>> pushed(k1.row_count());
    std::vector<std::optional<std::size_t>> representative(sub.outcome_count());
    std::vector<SparseRow> rows(sub.outcome_count());
    for (std::size_t o = 0; o < s1.outcome_count(); ++o) {
      const std::size_t r = s1.project(o, pre);
      if (!pushed[r]) pushed[r] = push_row(k1.row(r), f);
      const std::size_t cell = s2.project(f[o], s);
      if (!representative[cell]) {
        representative[cell] = o;
        rows[cell] = *pushed[r];
      } else if (rows[cell] != *pushed[r]) {
        throw WellDefinednessViolation(
            "K_" + braces(s1, pre) + "(., f^-1(A)) is not constant on a cell of f^-1(H2_" +
                braces(s2, s) + ")",
            s1.describe(*representative[cell]), s1.describe(o));
      }
    }
    kernels.emplace(s, StochKernel(sub, s2, std::move(rows)));
  }
  return FiniteCausalSpace::tabulated(std::move(p2), std::move(kernels));
}

std::vector<std::size_t> restricted_map(const CoordinateSpace& source, const CoordinateSpace& target,
                                        std::span<const std::size_t> f, const IndexMap& rho,
                                        CoordSet target_subset) {
  require_map(source, target, f);
  const CoordSet pre = rho.preimage(target_subset);
  std::vector<std::optional<std::size_t>> image(source.restrict(pre).outcome_count());
  for (std::size_t o = 0; o < source.outcome_count(); ++o) {
    const std::size_t r = source.project(o, pre);
    const std::size_t v = target.project(f[o], target_subset);
    if (!image[r]) {
      image[r] = v;
    } else if (*image[r] != v) {
      throw InvalidArgument("f restricted to " + braces(target, target_subset) +
                            " depends on coordinates outside " + braces(source, pre));
    }
  }
  std::vector<std::size_t> out;
  out.reserve(image.size());
  for (const auto& v : image) out.push_back(*v);
  return out;
}

IntervenedPair pushforward_intervention(const FiniteCausalSpace& source, std::span<const std::size_t> f,
                                        const IndexMap& rho, CoordSet intervened_target,
                                        const FiniteCausalSpace& mechanism) {
  const auto& s1 = source.space();
  const CoordinateSpace s2 = rho.target();
  s2.require_subset(intervened_target);
  const CoordSet u1 = rho.preimage(intervened_target);
  if (!(mechanism.space() == s1.restrict(u1))) {
    throw InvalidArgument("intervention mechanism must live on rho^-1(U2) = " + braces(s1, u1));
  }
  const FiniteCausalSpace target = pushforward_space(source, f, rho);
  const auto f_u = restricted_map(s1, s2, f, rho, intervened_target);
  const FiniteCausalSpace mechanism2 = pushforward_space(mechanism, f_u, rho.restrict(u1));

  FiniteCausalSpace source_i = intervene(source, u1, mechanism);
  FiniteCausalSpace target_i = intervene(target, intervened_target, mechanism2);
  const auto t = Transformation::deterministic(source_i, target_i, {f.begin(), f.end()}, rho);

  std::vector<CheckReport> parts;
  parts.push_back(check_transformation(t));
  parts.push_back(is_perfect_abstraction(t)
                      ? CheckReport::pass("perfect_abstraction")
                      : CheckReport::fail("perfect_abstraction", "(f, rho) is not a perfect abstraction",
                                          Witness{}));
  try {
    const bool same = same_causal_space(pushforward_space(source_i, f, rho), target_i);
    parts.push_back(same ? CheckReport::pass("unique_target")
                         : CheckReport::fail("unique_target",
                                             "pushforward of the intervened source differs from the "
                                             "intervened target",
                                             Witness{}));
  } catch (const Error& e) {
    parts.push_back(CheckReport::fail("unique_target", e.what(), Witness{}));
  }
  return {std::move(source_i), std::move(target_i),
          CheckReport::all_of("pushforward_intervention", std::move(parts))};
}

CheckReport rigidity_check(const Transformation& first, const Transformation& second) {
  if (!(first.source().space() == second.source().space()) ||
      !(first.target().space() == second.target().space()) || !(first.rho() == second.rho()) ||
      !(first.kernel() == second.kernel())) {
    throw SpaceMismatch("rigidity_check needs the same (kappa, rho) between the same outcome spaces");
  }
  const auto& s2 = first.target().space();
  const auto& p = first.target().measure();
  const auto& p_other = second.target().measure();
  for (std::size_t o = 0; o < s2.outcome_count(); ++o) {
    if (p.weight(o) != p_other.weight(o)) {
      return CheckReport::fail("rigidity", "the two target measures differ",
                               Witness{{}, {}, {}, "{" + s2.describe(o) + "}", to_string(p.weight(o)),
                                       to_string(p_other.weight(o))});
    }
  }
  const CoordSet frame = first.rho().image();
  std::size_t skipped = 0;
  for (CoordSet s : canonical_subsets(s2)) {
    const auto& k = first.target().kernel(s);
    const auto& k_other = second.target().kernel(s);
    const auto mass = project(p, s);
    for (std::size_t r = 0; r < k.row_count(); ++r) {
      if (mass.weight(r) == 0) {
        ++skipped;
        continue;
      }
      const auto a = marginal_of_row(k.row(r), s2, frame);
      const auto b = marginal_of_row(k_other.row(r), s2, frame);
      if (a == b) continue;
      std::size_t atom = 0;
      while (a[atom] == b[atom]) ++atom;
      return CheckReport::fail(
          "rigidity", "target kernels differ on H2_{rho(T1)} at a P2-positive atom",
          Witness{sorted_names(s2, s), s2.restrict(s).describe(r), {},
                  Event::cylinder(s2, frame, atom).describe(), to_string(a[atom]), to_string(b[atom])});
    }
  }
  auto report = CheckReport::pass("rigidity", "targets agree on " + braces(s2, frame));
  if (skipped > 0) report.notes.push_back(std::to_string(skipped) + " P2-null kernel rows not compared");
  return report;
}

Transformation inclusion_into_product(const FiniteCausalSpace& first, const FiniteCausalSpace& second,
                                      std::size_t max_outcomes) {
  FiniteCausalSpace target = product(first, second, max_outcomes);
  const auto& s1 = first.space();
  const std::size_t width = second.space().outcome_count();
  std::vector<SparseRow> rows(s1.outcome_count());
  for (std::size_t o = 0; o < rows.size(); ++o) {
    for (std::size_t w = 0; w < width; ++w) {
      if (second.measure().weight(w) != 0) rows[o].push_back({o * width + w, second.measure().weight(w)});
    }
  }
  StochKernel kappa(s1, target.space(), std::move(rows));
  std::map<std::string, std::string> names;
  for (const auto& n : s1.names()) names.emplace(n, n);
  IndexMap rho(s1, target.space(), names);
  return Transformation::stochastic(first, std::move(target), std::move(kappa), std::move(rho));
}

std::vector<std::size_t> tabulate_map(
    const CoordinateSpace& source, const CoordinateSpace& target,
    const std::function<std::vector<std::size_t>(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> out(source.outcome_count());
  for (std::size_t o = 0; o < out.size(); ++o) {
    const auto image = f(source.digits(o));
    if (image.size() != target.dimension()) {
      throw InvalidArgument("map image has the wrong number of coordinates");
    }
    for (std::size_t i = 0; i < image.size(); ++i) {
      if (image[i] >= target.coordinate(i).cardinality) {
        throw InvalidArgument("map image outside the domain of " + target.coordinate(i).name);
      }
    }
    out[o] = target.encode(image);
  }
  return out;
}

Transformation identity_transformation(const FiniteCausalSpace& space) {
  std::vector<std::size_t> f(space.space().outcome_count());
  for (std::size_t o = 0; o < f.size(); ++o) f[o] = o;
  return Transformation::deterministic(space, space, std::move(f), IndexMap::identity(space.space()));
}

}  // namespace causalkit
