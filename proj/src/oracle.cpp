#include "causalkit/oracle.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>

#include "causalkit/error.hpp"
#include "causalkit/io.hpp"

namespace causalkit::oracle {

namespace {

using Mask = std::uint32_t;

// Values of a measure on every event of a space with at most
// kMaxOracleOutcomes outcomes, as integers over a common denominator.
struct Table {
  std::int64_t den = 1;
  std::vector<std::int64_t> val;  // indexed by event mask
};

Table table_of(const std::vector<Rational>& dense) {
  mpz_class den = 1;
  for (const auto& w : dense) den = lcm(den, mpz_class(w.get_den()));
  if (den > (mpz_class(1) << 40)) throw CapExceeded("event oracle: denominators too large");
  std::vector<std::int64_t> num;
  for (const auto& w : dense) {
    const mpq_class scaled = w * mpq_class(den);
    num.push_back(mpz_class(scaled.get_num()).get_si());
  }
  Table t;
  t.den = den.get_si();
  t.val.assign(std::size_t{1} << dense.size(), 0);
  for (Mask m = 1; m < t.val.size(); ++m) {
    t.val[m] = t.val[m & (m - 1)] + num[static_cast<std::size_t>(std::countr_zero(m))];
  }
  return t;
}

bool same(const Table& a, Mask ma, const Table& b, Mask mb) {
  return static_cast<__int128>(a.val[ma]) * b.den == static_cast<__int128>(b.val[mb]) * a.den;
}

std::string fraction(const Table& t, Mask m) {
  return causalkit::to_string(Rational(mpz_class(std::to_string(t.val[m])), mpz_class(std::to_string(t.den))));
}

std::vector<Rational> dense_of(const SparseRow& row, std::size_t n) {
  std::vector<Rational> out(n, Rational(0));
  for (const auto& e : row) out[e.outcome] = e.weight;
  return out;
}

void require_small(const CoordinateSpace& space, const char* what) {
  if (space.outcome_count() > kMaxOracleOutcomes) {
    throw CapExceeded(std::string("event oracle: the ") + what + " space has " +
                      std::to_string(space.outcome_count()) + " outcomes, more than " +
                      std::to_string(kMaxOracleOutcomes));
  }
}

// Atom masks of H_S, indexed by omega_S.
std::vector<Mask> atom_masks(const CoordinateSpace& space, CoordSet s) {
  std::vector<Mask> atoms(space.restrict(s).outcome_count(), 0);
  for (std::size_t o = 0; o < space.outcome_count(); ++o) atoms[space.project(o, s)] |= Mask{1} << o;
  return atoms;
}

// Every event of H_S: all unions of its atoms.
std::vector<Mask> sigma_algebra(const CoordinateSpace& space, CoordSet s) {
  const auto atoms = atom_masks(space, s);
  std::vector<Mask> events(std::size_t{1} << atoms.size(), 0);
  for (std::size_t u = 1; u < events.size(); ++u) {
    events[u] = events[u & (u - 1)] | atoms[static_cast<std::size_t>(std::countr_zero(u))];
  }
  return events;
}

std::vector<Mask> all_events(const CoordinateSpace& space) {
  std::vector<Mask> events(std::size_t{1} << space.outcome_count());
  for (std::size_t m = 0; m < events.size(); ++m) events[m] = static_cast<Mask>(m);
  return events;
}

std::string describe(const CoordinateSpace& space, Mask m) {
  std::vector<bool> members(space.outcome_count());
  for (std::size_t o = 0; o < members.size(); ++o) members[o] = ((m >> o) & 1U) != 0;
  return Event(space, members).describe();
}

std::string braces(const CoordinateSpace& space, CoordSet s) {
  std::string out = "{";
  const auto names = space.names_of(s);
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out + "}";
}

std::vector<CoordSet> all_subsets(CoordSet within) {
  std::vector<CoordSet> out;
  const std::uint64_t w = within.bits();
  for (std::uint64_t s = w;; s = (s - 1) & w) {
    out.push_back(CoordSet(s));
    if (s == 0) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// Tables of every row of a kernel.
std::vector<Table> row_tables(const StochKernel& k) {
  std::vector<Table> out;
  for (const auto& r : k.rows()) out.push_back(table_of(dense_of(r, k.codomain().outcome_count())));
  return out;
}

struct Verdict {
  bool holds = true;
  std::string violation;  // first violation found by the enumeration
  std::uint64_t comparisons = 0;
};

Verdict axioms_by_enumeration(const FiniteCausalSpace& c) {
  const auto& space = c.space();
  Verdict v;
  const Table p = table_of(c.measure().weights());
  const Table k0 = table_of(dense_of(c.kernel(CoordSet{}).row(0), space.outcome_count()));
  for (Mask a : all_events(space)) {
    ++v.comparisons;
    if (!same(k0, a, p, a)) {
      return {false, "axiom (i): K_empty(A) = " + fraction(k0, a) + " but P(A) = " + fraction(p, a) +
                         " for A = " + describe(space, a), v.comparisons};
    }
  }
  const auto everything = all_events(space);
  for (CoordSet s : all_subsets(space.all())) {
    const auto tables = row_tables(c.kernel(s));
    const auto atoms = atom_masks(space, s);
    const auto hs = sigma_algebra(space, s);
    for (std::size_t r = 0; r < tables.size(); ++r) {
      const Table& t = tables[r];
      for (Mask a : hs) {
        const bool in_a = (a & atoms[r]) != 0;
        for (Mask b : everything) {
          ++v.comparisons;
          const std::int64_t lhs = t.val[a & b];
          const std::int64_t rhs = in_a ? t.val[b] : 0;
          if (lhs != rhs) {
            return {false,
                    "axiom (ii): S=" + braces(space, s) + " omega_S=" + space.restrict(s).describe(r) +
                        " A=" + describe(space, a) + " B=" + describe(space, b) + ": K_S(omega, A & B) = " +
                        fraction(t, a & b) + ", 1_A(omega) K_S(omega, B) = " + (in_a ? fraction(t, b) : "0"),
                    v.comparisons};
          }
        }
      }
    }
  }
  return v;
}

std::vector<Table> transformation_tables(const Transformation& t) { return row_tables(t.kernel()); }

Verdict admissible_by_enumeration(const Transformation& t) {
  const auto& s1 = t.source().space();
  const auto& s2 = t.target().space();
  const auto kappa = transformation_tables(t);
  Verdict v;
  for (CoordSet s : all_subsets(t.rho().image())) {
    const CoordSet pre = t.rho().preimage(s);
    for (Mask a : sigma_algebra(s2, s)) {
      for (std::size_t w = 0; w < s1.outcome_count(); ++w) {
        for (std::size_t w2 = w + 1; w2 < s1.outcome_count(); ++w2) {
          if (s1.project(w, pre) != s1.project(w2, pre)) continue;
          ++v.comparisons;
          if (!same(kappa[w], a, kappa[w2], a)) {
            return {false,
                    "S=" + braces(s2, s) + " A=" + describe(s2, a) + ": kappa(" + s1.describe(w) + ", A) = " +
                        fraction(kappa[w], a) + " but kappa(" + s1.describe(w2) + ", A) = " +
                        fraction(kappa[w2], a) + " on the same rho^-1(S) fiber",
                    v.comparisons};
          }
        }
      }
    }
  }
  return v;
}

Verdict distributional_by_enumeration(const Transformation& t) {
  const auto& s1 = t.source().space();
  const auto& s2 = t.target().space();
  std::vector<Rational> image(s2.outcome_count(), Rational(0));
  for (std::size_t w = 0; w < s1.outcome_count(); ++w) {
    for (const auto& e : t.kernel().row(w)) image[e.outcome] += t.source().measure().weight(w) * e.weight;
  }
  const Table lhs = table_of(image);
  const Table rhs = table_of(t.target().measure().weights());
  Verdict v;
  for (Mask a : all_events(s2)) {
    ++v.comparisons;
    if (!same(lhs, a, rhs, a)) {
      return {false, "A=" + describe(s2, a) + ": image of P1 gives " + fraction(lhs, a) + ", P2 gives " +
                         fraction(rhs, a), v.comparisons};
    }
  }
  return v;
}

Verdict interventional_by_enumeration(const Transformation& t, bool every_event) {
  const auto& s1 = t.source().space();
  const auto& s2 = t.target().space();
  const auto n2 = s2.outcome_count();
  const auto events = every_event ? all_events(s2) : sigma_algebra(s2, t.rho().image());
  Verdict v;
  for (CoordSet s : all_subsets(t.rho().image())) {
    const CoordSet pre = t.rho().preimage(s);
    const auto& k1 = t.source().kernel(pre);
    const auto& k2 = t.target().kernel(s);
    for (std::size_t w = 0; w < s1.outcome_count(); ++w) {
      std::vector<Rational> lhs(n2, Rational(0));
      for (const auto& e : k1.row(s1.project(w, pre))) {
        for (const auto& f : t.kernel().row(e.outcome)) lhs[f.outcome] += e.weight * f.weight;
      }
      std::vector<Rational> rhs(n2, Rational(0));
      for (const auto& e : t.kernel().row(w)) {
        for (const auto& f : k2.row(s2.project(e.outcome, s))) rhs[f.outcome] += e.weight * f.weight;
      }
      const Table a_tab = table_of(lhs);
      const Table b_tab = table_of(rhs);
      for (Mask a : events) {
        ++v.comparisons;
        if (!same(a_tab, a, b_tab, a)) {
          return {false,
                  "S=" + braces(s2, s) + " omega=" + s1.describe(w) + " A=" + describe(s2, a) +
                      ": intervene-then-transform gives " + fraction(a_tab, a) +
                      ", transform-then-intervene gives " + fraction(b_tab, a),
                  v.comparisons};
        }
      }
    }
  }
  return v;
}

Verdict independence_by_enumeration(const FiniteCausalSpace& c, CoordSet u, CoordSet v1, CoordSet v2) {
  const auto& space = c.space();
  const auto tables = row_tables(c.kernel(u));
  const auto e1 = sigma_algebra(space, v1);
  const auto e2 = sigma_algebra(space, v2);
  Verdict v;
  for (std::size_t r = 0; r < tables.size(); ++r) {
    const Table& t = tables[r];
    for (Mask a : e1) {
      for (Mask b : e2) {
        ++v.comparisons;
        if (static_cast<__int128>(t.val[a & b]) * t.den != static_cast<__int128>(t.val[a]) * t.val[b]) {
          return {false,
                  "omega_U=" + space.restrict(u).describe(r) + " A=" + describe(space, a) + " B=" +
                      describe(space, b) + ": K_U(omega, A & B) = " + fraction(t, a & b) +
                      ", K_U(omega, A) K_U(omega, B) = " + fraction(t, a) + " * " + fraction(t, b),
                  v.comparisons};
        }
      }
    }
  }
  return v;
}

Verdict source_by_enumeration(const FiniteCausalSpace& c, CoordSet u, CoordSet target) {
  const auto& space = c.space();
  const Table p = table_of(c.measure().weights());
  const auto tables = row_tables(c.kernel(u));
  const auto atoms = atom_masks(space, u);
  const auto events = sigma_algebra(space, target);
  Verdict v;
  for (std::size_t r = 0; r < tables.size(); ++r) {
    if (p.val[atoms[r]] == 0) continue;
    for (Mask a : events) {
      ++v.comparisons;
      const auto lhs = static_cast<__int128>(tables[r].val[a]) * p.val[atoms[r]];
      const auto rhs = static_cast<__int128>(p.val[a & atoms[r]]) * tables[r].den;
      if (lhs != rhs) {
        return {false,
                "omega_U=" + space.restrict(u).describe(r) + " A=" + describe(space, a) + ": K_U(omega, A) = " +
                    fraction(tables[r], a) + " but P(A | atom) = " + fraction(p, a & atoms[r]) + " / " +
                    fraction(p, atoms[r]),
                v.comparisons};
      }
    }
  }
  return v;
}

struct EffectVerdict {
  Effect tag = Effect::kNone;
  std::string detail;
  std::uint64_t comparisons = 0;
};

EffectVerdict effect_by_enumeration(const FiniteCausalSpace& c, CoordSet u, CoordSet target) {
  const auto& space = c.space();
  const auto events = sigma_algebra(space, target);
  const Table p = table_of(c.measure().weights());
  std::map<CoordSet, std::vector<Table>> cache;
  auto tables = [&](CoordSet s) -> const std::vector<Table>& {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, row_tables(c.kernel(s))).first;
    return it->second;
  };
  EffectVerdict out;
  const auto& ku = tables(u);
  for (std::size_t r = 0; r < ku.size(); ++r) {
    for (Mask a : events) {
      ++out.comparisons;
      if (!same(ku[r], a, p, a)) {
        out.tag = Effect::kActive;
        out.detail = "omega_U=" + space.restrict(u).describe(r) + " A=" + describe(space, a) + ": K_U = " +
                     fraction(ku[r], a) + ", P = " + fraction(p, a);
        return out;
      }
    }
  }
  for (CoordSet s : all_subsets(space.all())) {
    const CoordSet reduced = s - u;
    const auto& ks = tables(s);
    const auto& kr = tables(reduced);
    for (std::size_t w = 0; w < space.outcome_count(); ++w) {
      const auto rs = space.project(w, s);
      const auto rr = space.project(w, reduced);
      for (Mask a : events) {
        ++out.comparisons;
        if (!same(ks[rs], a, kr[rr], a)) {
          out.tag = Effect::kDormant;
          out.detail = "S=" + braces(space, s) + " omega=" + space.describe(w) + " A=" + describe(space, a) +
                       ": K_S = " + fraction(ks[rs], a) + ", K_{S\\U} = " + fraction(kr[rr], a);
          return out;
        }
      }
    }
  }
  return out;
}

CheckReport agreement(Predicate p, const std::string& generator, const std::string& enumeration,
                      const std::string& detail, std::uint64_t comparisons) {
  const std::string name = "oracle: " + to_string(p);
  CheckReport r = generator == enumeration
                      ? CheckReport::pass(name, "generator and enumeration agree: " + generator)
                      : CheckReport::fail(name, "generator says " + generator + ", enumeration says " + enumeration,
                                          Witness{{}, {}, {}, {}, generator, enumeration});
  r.notes.push_back(std::to_string(comparisons) + " event comparisons");
  if (!detail.empty()) r.notes.push_back("enumeration: " + detail);
  return r;
}

std::string holds(bool b) { return b ? "holds" : "fails"; }

}  // namespace

std::string to_string(Predicate predicate) {
  switch (predicate) {
    case Predicate::kAxioms: return "axioms";
    case Predicate::kAdmissible: return "admissible";
    case Predicate::kDistributional: return "distributional";
    case Predicate::kInterventional: return "interventional";
    case Predicate::kInterventionalAllEvents: return "interventional-all-events";
    case Predicate::kIndependence: return "independence";
    case Predicate::kSource: return "source";
    case Predicate::kEffect: return "effect";
  }
  return "?";
}

Predicate parse_predicate(const std::string& name) {
  for (Predicate p : {Predicate::kAxioms, Predicate::kAdmissible, Predicate::kDistributional,
                      Predicate::kInterventional, Predicate::kInterventionalAllEvents, Predicate::kIndependence,
                      Predicate::kSource, Predicate::kEffect}) {
    if (to_string(p) == name) return p;
  }
  throw InvalidArgument("unknown oracle predicate '" + name + "'");
}

CheckReport full_event_check(Predicate predicate, const FiniteCausalSpace& space, const SpaceQuery& query) {
  require_small(space.space(), "causal");
  space.space().require_subset(query.intervened | query.first | query.second);
  switch (predicate) {
    case Predicate::kAxioms: {
      const auto v = axioms_by_enumeration(space);
      return agreement(predicate, holds(validate_causal_space(space).passed), holds(v.holds), v.violation,
                       v.comparisons);
    }
    case Predicate::kIndependence: {
      const auto v = independence_by_enumeration(space, query.intervened, query.first, query.second);
      return agreement(predicate, holds(causally_independent(space, query.intervened, query.first, query.second)),
                       holds(v.holds), v.violation, v.comparisons);
    }
    case Predicate::kSource: {
      const auto v = source_by_enumeration(space, query.intervened, query.first);
      return agreement(predicate, holds(is_source(space, query.intervened, query.first).passed), holds(v.holds),
                       v.violation, v.comparisons);
    }
    case Predicate::kEffect: {
      const auto v = effect_by_enumeration(space, query.intervened, query.first);
      return agreement(predicate, causalkit::to_string(classify_effect(space, query.intervened, query.first).tag),
                       causalkit::to_string(v.tag), v.detail, v.comparisons);
    }
    default:
      throw InvalidArgument("oracle predicate '" + to_string(predicate) + "' applies to transformations");
  }
}

CheckReport full_event_check(Predicate predicate, const Transformation& t) {
  require_small(t.source().space(), "source");
  require_small(t.target().space(), "target");
  Verdict v;
  bool generator = false;
  switch (predicate) {
    case Predicate::kAdmissible:
      v = admissible_by_enumeration(t);
      generator = check_admissible(t).passed;
      break;
    case Predicate::kDistributional:
      v = distributional_by_enumeration(t);
      generator = check_distributional(t).passed;
      break;
    case Predicate::kInterventional:
      v = interventional_by_enumeration(t, false);
      generator = check_interventional(t, EventScope::kImage).passed;
      break;
    case Predicate::kInterventionalAllEvents:
      v = interventional_by_enumeration(t, true);
      generator = check_interventional(t, EventScope::kAllEvents).passed;
      break;
    default:
      throw InvalidArgument("oracle predicate '" + to_string(predicate) + "' applies to causal spaces");
  }
  return agreement(predicate, holds(generator), holds(v.holds), v.violation, v.comparisons);
}

// --- random instances ------------------------------------------------------

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) throw InvalidArgument("Rng::below(0)");
  return static_cast<std::size_t>(next() % n);
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t index) {
  Rng rng(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
  return rng.next();
}

namespace {

std::vector<Rational> random_weights(Rng& rng, std::size_t n, bool allow_zero) {
  std::vector<Rational> w(n);
  std::size_t total = 0;
  std::vector<std::size_t> raw(n);
  for (auto& r : raw) {
    r = rng.between(allow_zero ? 0 : 1, 4);
    total += r;
  }
  if (total == 0) {
    raw[rng.below(n)] = 1;
    total = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = Rational(static_cast<long>(raw[i]), static_cast<long>(total));
    w[i].canonicalize();
  }
  return w;
}

std::vector<std::size_t> shuffled(Rng& rng, std::vector<std::size_t> v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

// Random surjection [0, n) -> [0, k).
std::vector<std::size_t> random_surjection(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(i < k ? i : rng.below(k));
  return shuffled(rng, std::move(v));
}

std::size_t product_of(const std::vector<std::size_t>& v) {
  std::size_t p = 1;
  for (auto x : v) p *= x;
  return p;
}

}  // namespace

FiniteMeasure random_measure(Rng& rng, const CoordinateSpace& space) {
  return FiniteMeasure(space, random_weights(rng, space.outcome_count(), true));
}

FiniteSCM random_scm(std::uint64_t seed, const RandomShape& shape) {
  Rng rng(seed);
  const std::size_t wanted = rng.between(shape.min_variables, std::max(shape.min_variables, shape.max_variables));
  std::vector<ScmVariable> vars;
  std::size_t outcomes = 1;
  for (std::size_t i = 0; i < wanted; ++i) {
    const std::size_t room = shape.max_outcomes / outcomes;
    if (room < 2) break;
    const std::size_t card = rng.between(2, std::max<std::size_t>(2, std::min(shape.max_cardinality, room)));
    outcomes *= card;
    ScmVariable v;
    v.name = shape.prefix + std::to_string(i);
    v.cardinality = card;
    std::size_t configs = 1;
    for (const auto& earlier : vars) {
      if (rng.coin()) {
        v.parents.push_back(earlier.name);
        configs *= earlier.cardinality;
      }
    }
    const std::size_t k = shape.full_support ? card : rng.between(1, shape.max_noise);
    v.noise = random_weights(rng, k, false);
    for (std::size_t c = 0; c < configs; ++c) {
      if (shape.full_support) {
        std::vector<std::size_t> perm(card);
        for (std::size_t j = 0; j < card; ++j) perm[j] = j;
        for (auto x : shuffled(rng, perm)) v.mechanism.push_back(x);
      } else {
        for (std::size_t n = 0; n < k; ++n) v.mechanism.push_back(rng.below(card));
      }
    }
    vars.push_back(std::move(v));
  }
  if (vars.empty()) throw InvalidArgument("random_scm: max_outcomes leaves no room for a variable");
  return FiniteSCM(std::move(vars), std::max(shape.max_outcomes, outcomes));
}

FiniteCausalSpace random_space(std::uint64_t seed, const RandomShape& shape, Perturbation perturbation) {
  auto space = compile(random_scm(seed, shape));
  if (perturbation == Perturbation::kNone) return space;
  const auto& s = space.space();
  auto kernels = space.kernels();
  auto measure = space.measure();
  if (perturbation == Perturbation::kAxiomOne) {
    // Move all mass of K_empty to one outcome that P does not already
    // concentrate on.
    const std::size_t target = space.measure().weight(0) == 1 ? 1 : 0;
    kernels.insert_or_assign(CoordSet{}, StochKernel::constant(s.restrict(CoordSet{}), FiniteMeasure::dirac(s, target)));
  } else {
    // K_T(omega_T = 0) puts half its mass on outcome 1, off the fiber.
    const CoordSet all = s.all();
    auto rows = kernels.at(all).rows();
    rows[0] = {{0, Rational(1, 2)}, {1, Rational(1, 2)}};
    kernels.insert_or_assign(all, StochKernel(s.restrict(all), s, std::move(rows)));
  }
  return FiniteCausalSpace::tabulated(std::move(measure), std::move(kernels));
}

// --- hierarchies -------------------------------------------------------------

Transformation Hierarchy::first() const {
  auto mid = pushforward_space(fine, f1, rho1);
  return Transformation::deterministic(fine, std::move(mid), f1, rho1);
}

Transformation Hierarchy::second(const FiniteCausalSpace& mid) const {
  auto coarse = pushforward_space(mid, f2, rho2);
  return Transformation::deterministic(mid, std::move(coarse), f2, rho2);
}

Hierarchy random_hierarchy(std::uint64_t seed, std::size_t max_fine_outcomes) {
  Rng rng(seed);
  struct Mid {
    std::vector<std::size_t> fines;   // fine variable indices
    std::vector<std::size_t> g;       // block outcome -> mid value
    std::size_t card = 1;
  };
  struct Coarse {
    std::vector<std::size_t> mids;
    std::vector<std::size_t> g;       // mid-block outcome -> coarse value
    std::size_t card = 1;
    std::vector<std::size_t> parents; // earlier coarse blocks
  };
  std::vector<std::size_t> fine_card;
  std::vector<Mid> mids;
  std::vector<Coarse> coarse;
  for (int attempt = 0;; ++attempt) {
    fine_card.clear();
    mids.clear();
    coarse.clear();
    const std::size_t nc = rng.between(1, 3);
    for (std::size_t c = 0; c < nc; ++c) {
      Coarse block;
      const std::size_t nm = rng.between(1, 2);
      for (std::size_t m = 0; m < nm; ++m) {
        Mid mid;
        const std::size_t nf = rng.between(1, 2);
        for (std::size_t f = 0; f < nf; ++f) {
          mid.fines.push_back(fine_card.size());
          fine_card.push_back(rng.between(2, 3));
        }
        block.mids.push_back(mids.size());
        mids.push_back(std::move(mid));
      }
      coarse.push_back(std::move(block));
    }
    if (product_of(fine_card) <= max_fine_outcomes) break;
    if (attempt > 1000) throw InvalidArgument("random_hierarchy: outcome cap too small");
  }
  for (auto& mid : mids) {
    std::vector<std::size_t> cards;
    for (auto f : mid.fines) cards.push_back(fine_card[f]);
    const std::size_t n = product_of(cards);
    mid.card = rng.between(std::min<std::size_t>(2, n), std::min<std::size_t>(3, n));
    mid.g = random_surjection(rng, n, mid.card);
  }
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    auto& block = coarse[c];
    std::vector<std::size_t> cards;
    for (auto m : block.mids) cards.push_back(mids[m].card);
    const std::size_t n = product_of(cards);
    block.card = rng.between(std::min<std::size_t>(2, n), std::min<std::size_t>(3, n));
    block.g = random_surjection(rng, n, block.card);
    for (std::size_t p = 0; p < c; ++p) {
      if (rng.coin()) block.parents.push_back(p);
    }
  }

  std::vector<std::size_t> mid_of(fine_card.size());
  std::vector<std::size_t> coarse_of_mid(mids.size());
  for (std::size_t m = 0; m < mids.size(); ++m) {
    for (auto f : mids[m].fines) mid_of[f] = m;
  }
  for (std::size_t c = 0; c < coarse.size(); ++c) {
    for (auto m : coarse[c].mids) coarse_of_mid[m] = c;
  }
  // Values of blocks from raw fine values.
  auto mid_value = [&](std::size_t m, const std::vector<std::size_t>& raw) {
    std::size_t idx = 0;
    for (auto f : mids[m].fines) idx = idx * fine_card[f] + raw[f];
    return mids[m].g[idx];
  };
  auto coarse_value = [&](std::size_t c, const std::vector<std::size_t>& raw) {
    std::size_t idx = 0;
    for (auto m : coarse[c].mids) idx = idx * mids[m].card + mid_value(m, raw);
    return coarse[c].g[idx];
  };

  auto fine_name = [](std::size_t f) { return "V" + std::to_string(f); };
  std::vector<ScmVariable> vars;
  for (std::size_t f = 0; f < fine_card.size(); ++f) {
    const std::size_t m = mid_of[f];
    const std::size_t c = coarse_of_mid[m];
    // Parents: all fines of parent coarse blocks, of earlier mids of this
    // coarse block, and earlier fines of this mid block.
    std::vector<std::size_t> parents;
    for (auto pc : coarse[c].parents) {
      for (auto pm : coarse[pc].mids) {
        for (auto pf : mids[pm].fines) parents.push_back(pf);
      }
    }
    for (auto pm : coarse[c].mids) {
      if (pm == m) break;
      for (auto pf : mids[pm].fines) parents.push_back(pf);
    }
    for (auto pf : mids[m].fines) {
      if (pf == f) break;
      parents.push_back(pf);
    }
    ScmVariable v;
    v.name = fine_name(f);
    v.cardinality = fine_card[f];
    for (auto p : parents) v.parents.push_back(fine_name(p));
    const std::size_t k = rng.between(1, 3);
    v.noise = random_weights(rng, k, false);
    std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_key;
    std::vector<std::size_t> cards;
    for (auto p : parents) cards.push_back(fine_card[p]);
    const std::size_t configs = product_of(cards);
    std::vector<std::size_t> raw(fine_card.size(), 0);
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
      std::size_t rest = cfg;
      for (std::size_t i = parents.size(); i-- > 0;) {
        raw[parents[i]] = rest % cards[i];
        rest /= cards[i];
      }
      std::vector<std::size_t> key;
      for (auto pc : coarse[c].parents) key.push_back(coarse_value(pc, raw));
      for (auto pm : coarse[c].mids) {
        if (pm == m) break;
        key.push_back(mid_value(pm, raw));
      }
      for (auto pf : mids[m].fines) {
        if (pf == f) break;
        key.push_back(raw[pf]);
      }
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        std::vector<std::size_t> values;
        for (std::size_t n = 0; n < k; ++n) values.push_back(rng.below(fine_card[f]));
        it = by_key.emplace(std::move(key), std::move(values)).first;
      }
      for (auto x : it->second) v.mechanism.push_back(x);
    }
    vars.push_back(std::move(v));
  }
  FiniteSCM scm(std::move(vars), std::max<std::size_t>(max_fine_outcomes, kDefaultMaxOutcomes));
  const auto& fine_space = scm.space();

  std::vector<Coordinate> mid_coords;
  for (std::size_t m = 0; m < mids.size(); ++m) mid_coords.push_back({"M" + std::to_string(m), mids[m].card});
  const CoordinateSpace mid_space(mid_coords);
  std::vector<Coordinate> coarse_coords;
  for (std::size_t c = 0; c < coarse.size(); ++c) coarse_coords.push_back({"C" + std::to_string(c), coarse[c].card});
  const CoordinateSpace coarse_space(coarse_coords);

  std::vector<std::size_t> f1(fine_space.outcome_count());
  for (std::size_t o = 0; o < f1.size(); ++o) {
    const auto raw = fine_space.digits(o);
    std::vector<std::size_t> digits;
    for (std::size_t m = 0; m < mids.size(); ++m) digits.push_back(mid_value(m, raw));
    f1[o] = mid_space.encode(digits);
  }
  std::vector<std::size_t> f2(mid_space.outcome_count());
  for (std::size_t o = 0; o < f2.size(); ++o) {
    const auto md = mid_space.digits(o);
    std::vector<std::size_t> digits;
    for (const auto& block : coarse) {
      std::size_t idx = 0;
      for (auto m : block.mids) idx = idx * mids[m].card + md[m];
      digits.push_back(block.g[idx]);
    }
    f2[o] = coarse_space.encode(digits);
  }
  IndexMap rho1(fine_space, mid_space, mid_of);
  IndexMap rho2(mid_space, coarse_space, coarse_of_mid);
  auto fine = compile(scm);
  return {std::move(scm), std::move(fine), std::move(f1), std::move(rho1), std::move(f2), std::move(rho2)};
}

// --- lemma suites ----------------------------------------------------------

namespace {

enum class Status { kPass, kNotCovered, kFail };

struct Trial {
  Status status = Status::kPass;
  std::string detail;  // failure description or reason for not covering
  io::Json instance;   // replay data for failures
};

Trial pass() { return {}; }
Trial not_covered(std::string reason) { return {Status::kNotCovered, std::move(reason), nullptr}; }
Trial fail(std::string detail, io::Json instance) { return {Status::kFail, std::move(detail), std::move(instance)}; }

RandomShape factor_shape(const std::string& prefix) {
  RandomShape s;
  s.max_variables = 2;
  s.max_outcomes = 6;
  s.prefix = prefix;
  return s;
}

// A random subset of `within`; never empty when `nonempty` and within is not.
CoordSet random_subset(Rng& rng, CoordSet within, bool nonempty) {
  const auto pos = within.positions();
  if (pos.empty()) return CoordSet{};
  for (;;) {
    std::uint64_t bits = 0;
    for (auto p : pos) {
      if (rng.coin()) bits |= std::uint64_t{1} << p;
    }
    if (!nonempty || bits != 0) return CoordSet(bits);
  }
}

io::Json hierarchy_json(const Hierarchy& h, const Transformation& t) {
  return {{"scm", io::to_json(h.scm)}, {"transformation", io::to_json(t)}};
}

// Random (U2, V2) over the abstract space. With `later_first` the
// intervened coordinates come after the target ones in the mid order
// (which is topological), otherwise before.
std::pair<CoordSet, CoordSet> effect_pair(Rng& rng, std::size_t n, bool later_first) {
  const CoordSet all = CoordSet::first_n(n);
  if (n < 2 || rng.below(3) == 0) return {random_subset(rng, all, true), random_subset(rng, all, true)};
  const std::size_t k = rng.between(1, n - 1);
  const CoordSet head = CoordSet::first_n(k);
  const CoordSet tail = all - head;
  if (later_first) return {random_subset(rng, tail, true), random_subset(rng, head, true)};
  return {random_subset(rng, head, true), random_subset(rng, tail, true)};
}

Trial product_validity(std::uint64_t seed) {
  Rng rng(seed);
  const auto c1 = random_space(rng.next(), factor_shape("A"));
  const auto c2 = random_space(rng.next(), factor_shape("B"));
  const auto p = product(c1, c2);
  const auto r = validate_causal_space(p);
  if (!r.passed) return fail(render(r), {{"first", io::to_json(c1)}, {"second", io::to_json(c2)}});
  if (!(p.measure() == product_measure(c1.measure(), c2.measure()))) {
    return fail("product measure is not P1 x P2", {{"first", io::to_json(c1)}, {"second", io::to_json(c2)}});
  }
  return pass();
}

Trial product_effects(std::uint64_t seed) {
  Rng rng(seed);
  const auto c1 = random_space(rng.next(), factor_shape("A"));
  const auto c2 = random_space(rng.next(), factor_shape("B"));
  const auto p = product(c1, c2);
  const CoordSet t1 = CoordSet::first_n(c1.space().dimension());
  const CoordSet t2 = p.space().all() - t1;
  const io::Json instance{{"first", io::to_json(c1)}, {"second", io::to_json(c2)}};
  for (auto [u, v] : {std::pair{t1, t2}, std::pair{t2, t1}}) {
    const auto e = classify_effect(p, u, v);
    if (e.tag != Effect::kNone) return fail("cross-factor effect classified " + causalkit::to_string(e.tag), instance);
    const auto s = is_source(p, u, v);
    if (!s.passed) return fail("one factor is not a source of the other: " + render(s), instance);
  }
  return pass();
}

Trial composition(std::uint64_t seed) {
  Rng rng(seed);
  if (rng.below(4) == 0) {
    // The guarantee needs the first map to be an abstraction; an inclusion
    // is not one, so the instance is only logged.
    const auto c1 = random_space(rng.next(), factor_shape("A"));
    const auto c2 = random_space(rng.next(), factor_shape("B"));
    const auto t1 = inclusion_into_product(c1, c2);
    const auto composite = compose(t1, identity_transformation(t1.target()));
    return not_covered("first map is not an abstraction (composite " +
                       std::string(composite.report.passed ? "passes" : "fails") + ")");
  }
  const auto h = random_hierarchy(rng.next());
  const auto t1 = h.first();
  const auto t2 = h.second(t1.target());
  if (!check_transformation(t1).passed || !check_transformation(t2).passed) {
    return fail("generated abstraction fails its own checks", hierarchy_json(h, t1));
  }
  const auto composite = compose(t1, t2);
  const auto r = check_transformation(composite.transformation);
  if (!r.passed || !composite.report.passed) return fail(render(r), hierarchy_json(h, composite.transformation));
  return pass();
}

Trial scm_inclusion(std::uint64_t seed) {
  Rng rng(seed);
  RandomShape shape;
  shape.max_variables = 4;
  shape.max_outcomes = 24;
  shape.full_support = true;
  const auto scm = random_scm(rng.next(), shape);
  const auto all = scm.space().all();
  const CoordSet visible = random_subset(rng, all, true);
  const auto names = scm.space().names_of(visible);
  const io::Json instance{{"scm", io::to_json(scm)}, {"visible", names}};
  try {
    const auto t = inclusion_transform(scm, names);
    const auto r = check_transformation(t);
    if (!r.passed) return fail(render(r), instance);
  } catch (const NullAtom& e) {
    return not_covered(std::string("null atom: ") + e.what());
  }
  if (!same_causal_space(marginal_space(scm, names), marginalize(compile(scm), visible))) {
    return fail("marginal_space disagrees with marginalize(compile(scm))", instance);
  }
  return pass();
}

Trial rigidity(std::uint64_t seed) {
  Rng rng(seed);
  const auto c1 = random_space(rng.next(), factor_shape("A"));
  const auto c2 = random_space(rng.next(), factor_shape("B"));
  const auto alt = rng.coin() ? independent_mechanism(c2.measure()) : observational_mechanism(c2.measure());
  const auto t1 = inclusion_into_product(c1, c2);
  const auto t2 = inclusion_into_product(c1, alt);
  const io::Json instance{{"first", io::to_json(t1)}, {"second", io::to_json(t2)}};
  if (!check_transformation(t1).passed || !check_transformation(t2).passed) {
    return not_covered("one of the inclusions is not a causal transformation");
  }
  const auto r = rigidity_check(t1, t2);
  if (!r.passed) return fail(render(r), instance);
  return pass();
}

// A valid causal space over the same coordinates that differs from `c`
// in one kernel row, if one exists.
std::optional<FiniteCausalSpace> perturbed(Rng& rng, const FiniteCausalSpace& c) {
  const auto& s = c.space();
  std::vector<CoordSet> candidates;
  for (CoordSet sub : canonical_subsets(s)) {
    if (sub != s.all()) candidates.push_back(sub);
  }
  if (candidates.empty()) return std::nullopt;
  const CoordSet sub = candidates[rng.below(candidates.size())];
  auto kernels = c.kernels();
  auto rows = kernels.at(sub).rows();
  const std::size_t r = rng.below(rows.size());
  std::vector<std::size_t> fiber;
  for (std::size_t o = 0; o < s.outcome_count(); ++o) {
    if (s.project(o, sub) == r) fiber.push_back(o);
  }
  std::size_t target = fiber[rng.below(fiber.size())];
  if (rows[r].size() == 1 && rows[r][0].outcome == target) {
    // Mixing a Dirac with itself changes nothing; use another fiber point.
    target = fiber[0] == target ? fiber[1] : fiber[0];
  }
  std::vector<Rational> dense(s.outcome_count(), Rational(0));
  for (const auto& e : rows[r]) dense[e.outcome] += e.weight / 2;
  dense[target] += Rational(1, 2);
  rows[r] = sparse_row(dense);
  kernels.insert_or_assign(sub, StochKernel(s.restrict(sub), s, std::move(rows)));
  auto measure = c.measure();
  if (sub.empty()) measure = FiniteMeasure(s, dense);
  return FiniteCausalSpace::tabulated(std::move(measure), std::move(kernels));
}

Trial pushforward_uniqueness(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = random_hierarchy(rng.next());
  const auto t = h.first();
  const auto instance = hierarchy_json(h, t);
  const auto r = check_transformation(t);
  if (!r.passed) return fail("pushforward target fails the checks: " + render(r), instance);
  const auto& c2 = t.target();
  const auto again = pushforward_space(c2, [&] {
    std::vector<std::size_t> id(c2.space().outcome_count());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
    return id;
  }(), IndexMap::identity(c2.space()));
  if (!same_causal_space(again, c2)) return fail("pushforward along the identity is not a fixed point", instance);
  const auto other = perturbed(rng, c2);
  if (!other) return pass();
  if (!validate_causal_space(*other).passed) return fail("perturbed target is not a causal space", instance);
  if (same_causal_space(*other, c2)) return fail("perturbation left the target unchanged", instance);
  if (check_transformation(t.with_target(*other)).passed) {
    return fail("a second target space also makes (f, rho) a causal transformation", instance);
  }
  return pass();
}

Trial intervention_commutes(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = random_hierarchy(rng.next());
  const auto& c2 = h.first().target();
  const CoordSet u2 = random_subset(rng, c2.space().all(), false);
  const CoordSet u1 = h.rho1.preimage(u2);
  const auto q1 = random_measure(rng, h.fine.space().restrict(u1));
  const auto mechanism = independent_mechanism(q1);
  const auto result = pushforward_intervention(h.fine, h.f1, h.rho1, u2, mechanism);
  if (!result.report.passed) {
    return fail(render(result.report), {{"hierarchy", hierarchy_json(h, h.first())},
                                        {"intervened", c2.space().names_of(u2)},
                                        {"mechanism", io::to_json(mechanism)}});
  }
  return pass();
}

Trial noeffect_preserved(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = random_hierarchy(rng.next());
  const auto t = h.first();
  const auto [u2, v2] = effect_pair(rng, t.target().space().dimension(), true);
  const auto low = classify_effect(h.fine, h.rho1.preimage(u2), h.rho1.preimage(v2));
  if (low.tag != Effect::kNone) return not_covered("effect in the source space");
  const auto high = classify_effect(t.target(), u2, v2);
  if (high.tag != Effect::kNone) {
    return fail("NoEffect in the source but " + causalkit::to_string(high.tag) + " in the target for U=" +
                    braces(t.target().space(), u2) + " V=" + braces(t.target().space(), v2),
                hierarchy_json(h, t));
  }
  return pass();
}

Trial active_reflected(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = random_hierarchy(rng.next());
  const auto t = h.first();
  const auto [u2, v2] = effect_pair(rng, t.target().space().dimension(), false);
  const auto high = classify_effect(t.target(), u2, v2);
  if (high.tag != Effect::kActive) return not_covered("no active effect in the target space");
  const auto low = classify_effect(h.fine, h.rho1.preimage(u2), h.rho1.preimage(v2));
  if (low.tag != Effect::kActive) {
    return fail("Active in the target but " + causalkit::to_string(low.tag) + " in the source for U=" +
                    braces(t.target().space(), u2) + " V=" + braces(t.target().space(), v2),
                hierarchy_json(h, t));
  }
  return pass();
}

Trial sources_preserved(std::uint64_t seed) {
  Rng rng(seed);
  const auto h = random_hierarchy(rng.next());
  const auto t = h.first();
  const auto& c2 = t.target();
  const std::size_t n = c2.space().dimension();
  // Prefixes of the topological order are sources of everything.
  const CoordSet u2 = rng.coin() ? CoordSet::first_n(rng.between(1, n)) : random_subset(rng, c2.space().all(), true);
  const CoordSet v2 = random_subset(rng, c2.space().all(), true);
  bool covered = false;
  for (CoordSet target : {v2, c2.space().all()}) {
    if (!is_source(h.fine, h.rho1.preimage(u2), h.rho1.preimage(target)).passed) continue;
    covered = true;
    const auto r = is_source(c2, u2, target);
    if (!r.passed) {
      return fail("source in the fine space but not in the abstraction for U=" + braces(c2.space(), u2) +
                      " V=" + braces(c2.space(), target) + ": " + render(r),
                  hierarchy_json(h, t));
    }
  }
  return covered ? pass() : not_covered("not a source in the source space");
}

using Recipe = std::function<Trial(std::uint64_t)>;

const std::map<std::string, Recipe>& recipes() {
  static const std::map<std::string, Recipe> table{
      {"product-validity", product_validity},
      {"product-effects", product_effects},
      {"composition", composition},
      {"scm-inclusion", scm_inclusion},
      {"rigidity", rigidity},
      {"pushforward-uniqueness", pushforward_uniqueness},
      {"intervention-commutes", intervention_commutes},
      {"noeffect-preserved", noeffect_preserved},
      {"active-reflected", active_reflected},
      {"sources-preserved", sources_preserved},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& lemma_ids() {
  static const std::vector<std::string> ids{
      "product-validity", "product-effects",       "composition",        "scm-inclusion",    "rigidity",
      "pushforward-uniqueness", "intervention-commutes", "noeffect-preserved", "active-reflected",
      "sources-preserved"};
  return ids;
}

CheckReport lemma_suite(const std::string& id, std::size_t trials, std::uint64_t seed) {
  const auto it = recipes().find(id);
  if (it == recipes().end()) throw InvalidArgument("unknown lemma id '" + id + "'");
  std::size_t passed = 0;
  std::size_t uncovered = 0;
  std::map<std::string, std::size_t> reasons;
  std::vector<CheckReport> failures;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = trial_seed(seed, i);
    Trial trial;
    try {
      trial = it->second(s);
    } catch (const Error& e) {
      trial = fail(std::string("unexpected error: ") + e.what(), nullptr);
    }
    switch (trial.status) {
      case Status::kPass: ++passed; break;
      case Status::kNotCovered:
        ++uncovered;
        ++reasons[trial.detail];
        break;
      case Status::kFail: {
        auto r = CheckReport::fail("trial " + std::to_string(i), trial.detail,
                                   Witness{{}, {}, {}, {}, "conclusion fails", "conclusion holds"});
        r.notes.push_back("trial seed " + std::to_string(s));
        if (!trial.instance.is_null()) r.notes.push_back("replay: " + trial.instance.dump());
        failures.push_back(std::move(r));
        break;
      }
    }
  }
  const std::string summary = std::to_string(trials) + " trials: " + std::to_string(passed) + " passed, " +
                              std::to_string(uncovered) + " not covered by the hypotheses, " +
                              std::to_string(failures.size()) + " failed";
  CheckReport report;
  if (failures.empty()) {
    report = CheckReport::pass("lemma: " + id, summary);
  } else {
    report = CheckReport::all_of("lemma: " + id, std::move(failures));
    report.message = summary;
  }
  report.notes.push_back("seed " + std::to_string(seed));
  for (const auto& [reason, count] : reasons) {
    report.notes.push_back("not covered (" + reason + "): " + std::to_string(count));
  }
  return report;
}

}  // namespace causalkit::oracle
