#include "causalkit/causal_space.hpp"

#include <algorithm>
#include <mutex>

#include "causalkit/error.hpp"

namespace causalkit {

struct FiniteCausalSpace::Family {
  FiniteMeasure measure;
  Generator generator;
  std::size_t subset_count = 0;
  std::unique_ptr<std::once_flag[]> flags;
  mutable std::vector<std::optional<StochKernel>> cache;

  Family(FiniteMeasure m, Generator g) : measure(std::move(m)), generator(std::move(g)) {
    const std::size_t d = measure.space().dimension();
    if (d > kMaxCausalCoordinates) {
      throw CapExceeded("causal spaces support at most " + std::to_string(kMaxCausalCoordinates) +
                        " coordinates");
    }
    subset_count = std::size_t{1} << d;
    flags = std::make_unique<std::once_flag[]>(subset_count);
    cache.resize(subset_count);
  }

  void require_shape(CoordSet subset, const StochKernel& k) const {
    const auto& space = measure.space();
    if (!(k.domain() == space.restrict(subset)) || !(k.codomain() == space)) {
      throw InvalidArgument("kernel for subset {" + [&] {
        std::string s;
        for (const auto& n : space.names_of(subset)) s += (s.empty() ? "" : ",") + n;
        return s;
      }() + "} has the wrong domain or codomain");
    }
  }
};

FiniteCausalSpace::FiniteCausalSpace(std::shared_ptr<const Family> family)
    : family_(std::move(family)) {}

FiniteCausalSpace FiniteCausalSpace::tabulated(FiniteMeasure measure,
                                               std::map<CoordSet, StochKernel> kernels) {
  auto family = std::make_shared<Family>(std::move(measure), Generator{});
  const auto& space = family->measure.space();
  for (std::size_t bits = 0; bits < family->subset_count; ++bits) {
    const CoordSet s(bits);
    auto it = kernels.find(s);
    if (it == kernels.end()) {
      std::string names;
      for (const auto& n : space.names_of(s)) names += (names.empty() ? "" : ",") + n;
      throw InvalidArgument("missing kernel for subset {" + names + "}");
    }
    family->require_shape(s, it->second);
    family->cache[bits] = std::move(it->second);
    kernels.erase(it);
  }
  if (!kernels.empty()) {
    throw InvalidArgument("kernel given for a subset outside the coordinate set");
  }
  for (std::size_t bits = 0; bits < family->subset_count; ++bits) {
    std::call_once(family->flags[bits], [] {});
  }
  return FiniteCausalSpace(std::move(family));
}

FiniteCausalSpace FiniteCausalSpace::lazy(FiniteMeasure measure, Generator generator) {
  if (!generator) {
    throw InvalidArgument("lazy causal space needs a kernel generator");
  }
  return FiniteCausalSpace(std::make_shared<Family>(std::move(measure), std::move(generator)));
}

const CoordinateSpace& FiniteCausalSpace::space() const { return family_->measure.space(); }
const FiniteMeasure& FiniteCausalSpace::measure() const { return family_->measure; }

const StochKernel& FiniteCausalSpace::kernel(CoordSet subset) const {
  space().require_subset(subset);
  const auto index = static_cast<std::size_t>(subset.bits());
  std::call_once(family_->flags[index], [&] {
    StochKernel k = family_->generator(subset);
    family_->require_shape(subset, k);
    family_->cache[index] = std::move(k);
  });
  return *family_->cache[index];
}

std::map<CoordSet, StochKernel> FiniteCausalSpace::kernels() const {
  std::map<CoordSet, StochKernel> out;
  for (std::size_t bits = 0; bits < family_->subset_count; ++bits) {
    out.emplace(CoordSet(bits), kernel(CoordSet(bits)));
  }
  return out;
}

Rational FiniteCausalSpace::evaluate(CoordSet subset, std::size_t outcome,
                                     const Event& event) const {
  return kernel(subset).evaluate(space().project(outcome, subset), event);
}

// ---------------------------------------------------------------------------

std::vector<CoordSet> canonical_subsets(const CoordinateSpace& space, CoordSet within) {
  space.require_subset(within);
  std::vector<std::pair<std::vector<std::string>, CoordSet>> keyed;
  const std::uint64_t w = within.bits();
  for (std::uint64_t sub = w;; sub = (sub - 1) & w) {
    auto names = space.names_of(CoordSet(sub));
    std::sort(names.begin(), names.end());
    keyed.emplace_back(std::move(names), CoordSet(sub));
    if (sub == 0) break;
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  std::vector<CoordSet> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(k.second);
  return out;
}

namespace {

std::vector<std::string> sorted_names(const CoordinateSpace& space, CoordSet s) {
  auto names = space.names_of(s);
  std::sort(names.begin(), names.end());
  return names;
}

std::string describe_sub(const CoordinateSpace& space, CoordSet s, std::size_t sub_index) {
  return space.restrict(s).describe(sub_index);
}

}  // namespace

CheckReport validate_causal_space(const FiniteCausalSpace& c) {
  const auto& space = c.space();
  const auto& p = c.measure();
  std::vector<CheckReport> parts;

  // Axiom (i): the single row of K_empty is P.
  {
    const auto& k0 = c.kernel(CoordSet{});
    const auto row = k0.row_measure(0);
    std::optional<std::size_t> bad;
    for (std::size_t o = 0; o < space.outcome_count(); ++o) {
      if (row.weight(o) != p.weight(o)) {
        bad = o;
        break;
      }
    }
    if (bad) {
      parts.push_back(CheckReport::fail(
          "axiom (i): K_empty = P", "K_empty(omega, A) differs from P(A)",
          Witness{{}, "()", {}, "{" + space.describe(*bad) + "}", to_string(row.weight(*bad)),
                  to_string(p.weight(*bad))}));
    } else {
      parts.push_back(CheckReport::pass("axiom (i): K_empty = P"));
    }
  }

  // Axiom (ii) in atom form: every row of K_S is carried by its own S-atom.
  // This is equivalent to K_S(w, A n B) = 1_A(w) K_S(w, B) for A in H_S.
  {
    std::optional<CheckReport> failure;
    for (CoordSet s : canonical_subsets(space)) {
      const auto& k = c.kernel(s);
      for (std::size_t r = 0; r < k.row_count() && !failure; ++r) {
        Rational on_atom = 0;
        for (const auto& e : k.row(r)) {
          if (space.project(e.outcome, s) == r) on_atom += e.weight;
        }
        if (on_atom != 1) {
          failure = CheckReport::fail(
              "axiom (ii): interventional determinism",
              "K_S(omega, .) puts mass outside the atom of omega_S",
              Witness{sorted_names(space, s), describe_sub(space, s, r), {},
                      Event::cylinder(space, s, r).describe(), to_string(on_atom), "1"});
        }
      }
      if (failure) break;
    }
    parts.push_back(failure ? *failure : CheckReport::pass("axiom (ii): interventional determinism"));
  }
  return CheckReport::all_of("validate_causal_space", std::move(parts));
}

bool same_causal_space(const FiniteCausalSpace& a, const FiniteCausalSpace& b) {
  if (!(a.space() == b.space()) || !(a.measure() == b.measure())) {
    return false;
  }
  for (CoordSet s : canonical_subsets(a.space())) {
    if (!(a.kernel(s).rows() == b.kernel(s).rows())) {
      return false;
    }
  }
  return true;
}

FiniteCausalSpace independent_mechanism(const FiniteMeasure& measure) {
  return FiniteCausalSpace::lazy(measure, [measure](CoordSet s) {
    const auto& space = measure.space();
    const CoordSet rest = space.all() - s;
    const auto marginal = project(measure, rest);
    const CoordinateSpace sub = space.restrict(s);
    std::vector<SparseRow> rows(sub.outcome_count());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t base = space.lift(r, s);
      std::vector<std::pair<std::size_t, Rational>> entries;
      for (std::size_t m = 0; m < marginal.space().outcome_count(); ++m) {
        if (marginal.weight(m) != 0) {
          entries.emplace_back(space.assign(base, rest, m), marginal.weight(m));
        }
      }
      std::sort(entries.begin(), entries.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      for (auto& [o, w] : entries) rows[r].push_back({o, std::move(w)});
    }
    return StochKernel(sub, space, std::move(rows));
  });
}

FiniteCausalSpace observational_mechanism(const FiniteMeasure& measure) {
  const FiniteCausalSpace fallback = independent_mechanism(measure);
  return FiniteCausalSpace::lazy(measure, [measure, fallback](CoordSet s) {
    const auto& space = measure.space();
    const CoordinateSpace sub = space.restrict(s);
    std::vector<Rational> mass(sub.outcome_count(), Rational(0));
    for (std::size_t o = 0; o < space.outcome_count(); ++o) {
      mass[space.project(o, s)] += measure.weight(o);
    }
    std::vector<SparseRow> rows(sub.outcome_count());
    for (std::size_t o = 0; o < space.outcome_count(); ++o) {
      const std::size_t r = space.project(o, s);
      if (mass[r] != 0 && measure.weight(o) != 0) {
        rows[r].push_back({o, measure.weight(o) / mass[r]});
      }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (mass[r] == 0) rows[r] = fallback.kernel(s).row(r);
    }
    return StochKernel(sub, space, std::move(rows));
  });
}

FiniteCausalSpace marginalize(const FiniteCausalSpace& c, CoordSet subset) {
  const auto& space = c.space();
  space.require_subset(subset);
  const CoordinateSpace sub = space.restrict(subset);
  std::vector<std::size_t> to_sub(space.outcome_count());
  for (std::size_t o = 0; o < to_sub.size(); ++o) to_sub[o] = space.project(o, subset);
  return FiniteCausalSpace::lazy(project(c.measure(), subset), [c, subset, sub, to_sub](CoordSet local) {
    const CoordSet s = expand(local, subset);
    const auto& k = c.kernel(s);
    std::vector<SparseRow> rows;
    rows.reserve(k.row_count());
    for (const auto& row : k.rows()) rows.push_back(push_row(row, to_sub));
    return StochKernel(sub.restrict(local), sub, std::move(rows));
  });
}

FiniteCausalSpace intervene(const FiniteCausalSpace& c, CoordSet u, const FiniteCausalSpace& l) {
  const auto& space = c.space();
  space.require_subset(u);
  if (!(l.space() == space.restrict(u))) {
    throw InvalidArgument("intervention mechanism does not live on the intervened coordinates");
  }
  const CheckReport lcheck = validate_causal_space(l);
  if (!lcheck.passed) {
    throw InvalidArgument("intervention mechanism is not a causal mechanism: " +
                          lcheck.first_failure()->check);
  }

  const auto& q = l.measure();
  const auto& ku = c.kernel(u);
  std::vector<Rational> weights(space.outcome_count(), Rational(0));
  for (std::size_t r = 0; r < q.space().outcome_count(); ++r) {
    if (q.weight(r) == 0) continue;
    for (const auto& e : ku.row(r)) weights[e.outcome] += q.weight(r) * e.weight;
  }

  return FiniteCausalSpace::lazy(
      FiniteMeasure(space, std::move(weights)), [c, u, l](CoordSet s) {
        const auto& space = c.space();
        const CoordSet both = s & u;
        const auto& l_kernel = l.kernel(compress(both, u));
        const auto& k_union = c.kernel(s | u);
        const CoordinateSpace sub = space.restrict(s);
        std::vector<SparseRow> rows(sub.outcome_count());
        std::vector<Rational> dense(space.outcome_count(), Rational(0));
        std::vector<bool> touched(space.outcome_count(), false);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const std::size_t omega = space.lift(r, s);
          for (const auto& le : l_kernel.row(space.project(omega, both))) {
            const std::size_t combined = space.assign(omega, u, le.outcome);
            for (const auto& ke : k_union.row(space.project(combined, s | u))) {
              dense[ke.outcome] += le.weight * ke.weight;
              touched[ke.outcome] = true;
            }
          }
          for (std::size_t o = 0; o < dense.size(); ++o) {
            if (touched[o]) {
              if (dense[o] != 0) rows[r].push_back({o, dense[o]});
              dense[o] = 0;
              touched[o] = false;
            }
          }
        }
        return StochKernel(sub, space, std::move(rows));
      });
}

FiniteCausalSpace intervene(const FiniteCausalSpace& c, CoordSet u, const FiniteMeasure& q,
                            const FiniteCausalSpace& l) {
  if (!(q == l.measure())) {
    throw InvalidArgument("intervention measure Q differs from the mechanism's measure");
  }
  return intervene(c, u, l);
}

// ---------------------------------------------------------------------------

std::string to_string(Effect effect) {
  switch (effect) {
    case Effect::kNone:
      return "NoEffect";
    case Effect::kActive:
      return "Active";
    case Effect::kDormant:
      return "Dormant";
  }
  return "?";
}

namespace {

// Classification against a list of target events. For a sigma-algebra H_V
// the atoms of H_V are enough: both sides of every defining identity are
// measures in A, so they agree on H_V iff they agree on its atoms.
EffectClass classify_against(const FiniteCausalSpace& c, CoordSet u,
                             const std::vector<Event>& targets) {
  const auto& space = c.space();
  space.require_subset(u);
  const auto& p = c.measure();
  const auto& ku = c.kernel(u);
  for (const auto& a : targets) {
    const Rational pa = p.probability(a);
    for (std::size_t r = 0; r < ku.row_count(); ++r) {
      const Rational v = ku.evaluate(r, a);
      if (v != pa) {
        return {Effect::kActive, Witness{sorted_names(space, u), describe_sub(space, u, r), {},
                                         a.describe(), to_string(v), to_string(pa)}};
      }
    }
  }
  for (CoordSet s : canonical_subsets(space)) {
    const CoordSet reduced = s - u;
    if (reduced == s) continue;
    const auto& ks = c.kernel(s);
    const auto& kr = c.kernel(reduced);
    for (std::size_t r = 0; r < ks.row_count(); ++r) {
      const std::size_t rr = space.project(space.lift(r, s), reduced);
      for (const auto& a : targets) {
        const Rational lhs = ks.evaluate(r, a);
        const Rational rhs = kr.evaluate(rr, a);
        if (lhs != rhs) {
          return {Effect::kDormant, Witness{sorted_names(space, s), describe_sub(space, s, r), {},
                                            a.describe(), to_string(lhs), to_string(rhs)}};
        }
      }
    }
  }
  return {Effect::kNone, std::nullopt};
}

}  // namespace

EffectClass classify_effect(const FiniteCausalSpace& c, CoordSet u, const Event& event) {
  if (!(event.space() == c.space())) {
    throw SpaceMismatch("event does not live on the causal space");
  }
  return classify_against(c, u, {event});
}

EffectClass classify_effect(const FiniteCausalSpace& c, CoordSet u, CoordSet target) {
  return classify_against(c, u, atoms(c.space(), target));
}

namespace {

CheckReport source_against(const FiniteCausalSpace& c, CoordSet u, const std::vector<Event>& targets,
                           const std::string& target_label) {
  const auto& space = c.space();
  space.require_subset(u);
  const auto& p = c.measure();
  const auto& ku = c.kernel(u);
  const auto u_atoms = atoms(space, u);
  std::vector<std::string> exempt;
  for (std::size_t r = 0; r < u_atoms.size(); ++r) {
    const Rational mass = p.probability(u_atoms[r]);
    if (mass == 0) {
      exempt.push_back(describe_sub(space, u, r));
      continue;
    }
    for (const auto& a : targets) {
      const Rational kernel_value = ku.evaluate(r, a);
      const Rational conditional = p.probability(a & u_atoms[r]) / mass;
      if (kernel_value != conditional) {
        auto report = CheckReport::fail(
            "is_source", "K_U(omega, A) is not P(A | H_U)(omega) on a P-positive atom",
            Witness{sorted_names(space, u), describe_sub(space, u, r), {}, a.describe(),
                    to_string(kernel_value), to_string(conditional)});
        if (!exempt.empty()) report.notes.push_back("exempted P-null atoms so far: " + std::to_string(exempt.size()));
        return report;
      }
    }
  }
  auto report = CheckReport::pass("is_source", "H_U is a source of " + target_label);
  for (const auto& e : exempt) report.notes.push_back("exempted P-null atom " + e);
  return report;
}

}  // namespace

CheckReport is_source(const FiniteCausalSpace& c, CoordSet u, CoordSet target) {
  std::string label = "H_{";
  for (const auto& n : sorted_names(c.space(), target)) label += (label.size() > 3 ? "," : "") + n;
  label += "}";
  return source_against(c, u, atoms(c.space(), target), label);
}

CheckReport is_source(const FiniteCausalSpace& c, CoordSet u, const Event& event) {
  if (!(event.space() == c.space())) {
    throw SpaceMismatch("event does not live on the causal space");
  }
  return source_against(c, u, {event}, event.describe());
}

namespace {

CheckReport independence_against(const FiniteCausalSpace& c, CoordSet u,
                                 const std::vector<Event>& first,
                                 const std::vector<Event>& second) {
  const auto& space = c.space();
  space.require_subset(u);
  const auto& ku = c.kernel(u);
  for (std::size_t r = 0; r < ku.row_count(); ++r) {
    for (const auto& a : first) {
      const Rational ka = ku.evaluate(r, a);
      for (const auto& b : second) {
        const Rational joint = ku.evaluate(r, a & b);
        const Rational prod = ka * ku.evaluate(r, b);
        if (joint != prod) {
          return CheckReport::fail(
              "causal_independence", "K_U(omega, A n B) != K_U(omega, A) K_U(omega, B)",
              Witness{sorted_names(space, u), describe_sub(space, u, r), {},
                      a.describe() + " ; " + b.describe(), to_string(joint), to_string(prod)});
        }
      }
    }
  }
  return CheckReport::pass("causal_independence");
}

}  // namespace

CheckReport check_causal_independence(const FiniteCausalSpace& c, CoordSet u, const Event& a,
                                      const Event& b) {
  if (!(a.space() == c.space()) || !(b.space() == c.space())) {
    throw SpaceMismatch("events do not live on the causal space");
  }
  return independence_against(c, u, {a}, {b});
}

// Independence of two partition-generated algebras reduces to their atoms:
// both sides are bilinear in (1_A, 1_B), so atom-pair factorization extends
// to all unions of atoms.
CheckReport check_causal_independence(const FiniteCausalSpace& c, CoordSet u, CoordSet first,
                                      CoordSet second) {
  return independence_against(c, u, atoms(c.space(), first), atoms(c.space(), second));
}

bool causally_independent(const FiniteCausalSpace& c, CoordSet u, const Event& a, const Event& b) {
  return check_causal_independence(c, u, a, b).passed;
}

bool causally_independent(const FiniteCausalSpace& c, CoordSet u, CoordSet first, CoordSet second) {
  return check_causal_independence(c, u, first, second).passed;
}

// ---------------------------------------------------------------------------

FiniteCausalSpace product(const FiniteCausalSpace& first, const FiniteCausalSpace& second,
                          std::size_t max_outcomes) {
  FiniteMeasure p = product_measure(first.measure(), second.measure(), max_outcomes);
  const std::size_t d1 = first.space().dimension();
  return FiniteCausalSpace::lazy(std::move(p), [first, second, d1](CoordSet s) {
    const CoordSet s1 = s & CoordSet::first_n(d1);
    const CoordSet s2(s.bits() >> d1);
    return kernel_product(first.kernel(s1), second.kernel(s2));
  });
}

FiniteCausalSpace rename(const FiniteCausalSpace& c, const std::map<std::string, std::string>& renames) {
  std::vector<Coordinate> coords = c.space().coordinates();
  for (auto& coord : coords) {
    if (auto it = renames.find(coord.name); it != renames.end()) coord.name = it->second;
  }
  const CoordinateSpace renamed(std::move(coords), c.space().outcome_count());
  FiniteMeasure p(renamed, c.measure().weights());
  return FiniteCausalSpace::lazy(std::move(p), [c, renamed](CoordSet s) {
    const auto& k = c.kernel(s);
    return StochKernel(renamed.restrict(s), renamed, k.rows());
  });
}

FiniteCausalSpace one_point_space() {
  const CoordinateSpace point;
  const FiniteMeasure p = FiniteMeasure::dirac(point, 0);
  return FiniteCausalSpace::tabulated(p, {{CoordSet{}, StochKernel::constant(point, p)}});
}

}  // namespace causalkit
