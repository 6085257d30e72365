#pragma once

// Brute-force twins of the generator-level checks, seeded random
// instances, and randomized lemma suites.

#include <cstdint>
#include <string>
#include <vector>

#include "causalkit/causal_space.hpp"
#include "causalkit/check_report.hpp"
#include "causalkit/scm.hpp"
#include "causalkit/transform.hpp"

namespace causalkit::oracle {

/// Largest |Omega| the event enumeration accepts.
inline constexpr std::size_t kMaxOracleOutcomes = 12;

enum class Predicate {
  kAxioms,
  kAdmissible,
  kDistributional,
  kInterventional,           // events of H2_{rho(T1)}
  kInterventionalAllEvents,  // every event of Omega2
  kIndependence,
  kSource,
  kEffect,
};

std::string to_string(Predicate predicate);
/// Throws InvalidArgument for an unknown name.
Predicate parse_predicate(const std::string& name);

/// Coordinates a space predicate is asked about: the intervened set U and
/// the target sets (V for sources and effects, V1 and V2 for independence).
struct SpaceQuery {
  CoordSet intervened;
  CoordSet first;
  CoordSet second;
};

/// Decides the predicate by enumerating every event (and every event pair
/// for causal independence) straight from the definitions, and passes iff
/// that verdict agrees with the library's check. Throws CapExceeded when a
/// relevant space has more than kMaxOracleOutcomes outcomes.
CheckReport full_event_check(Predicate predicate, const FiniteCausalSpace& space, const SpaceQuery& query = {});
CheckReport full_event_check(Predicate predicate, const Transformation& t);

/// 64-bit splitmix generator; portable, so seeds reproduce everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, n).
  std::size_t below(std::size_t n);
  /// Uniform in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin() { return (next() & 1U) != 0; }

 private:
  std::uint64_t state_;
};

/// Seed of trial `index` of a run started from `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t index);

struct RandomShape {
  std::size_t min_variables = 1;
  std::size_t max_variables = 3;
  std::size_t max_cardinality = 3;
  std::size_t max_outcomes = kMaxOracleOutcomes;
  std::size_t max_noise = 3;
  /// Every value of every variable has positive probability under every
  /// parent configuration, so no atom is null.
  bool full_support = false;
  std::string prefix = "V";
};

enum class Perturbation {
  kNone,
  kAxiomOne,  // K_empty no longer equals P
  kAxiomTwo,  // K_T puts mass off its fiber
};

FiniteSCM random_scm(std::uint64_t seed, const RandomShape& shape = {});
/// compile(random_scm(seed, shape)), optionally broken on purpose.
FiniteCausalSpace random_space(std::uint64_t seed, const RandomShape& shape = {},
                               Perturbation perturbation = Perturbation::kNone);
/// A random probability measure on `space` (some weights may be zero).
FiniteMeasure random_measure(Rng& rng, const CoordinateSpace& space);

/// Three nested levels built so that both coarsenings are perfect
/// abstractions: fine variables V*, grouped into mid coordinates M*,
/// grouped into coarse coordinates C*. A fine variable reads its parents
/// only through the coarse values of other coarse blocks and the mid
/// values of earlier mid blocks of its own coarse block.
struct Hierarchy {
  FiniteSCM scm;
  FiniteCausalSpace fine;
  std::vector<std::size_t> f1;  // fine outcome -> mid outcome
  IndexMap rho1;
  std::vector<std::size_t> f2;  // mid outcome -> coarse outcome
  IndexMap rho2;

  /// fine -> pushforward_space(fine, f1, rho1).
  Transformation first() const;
  /// mid -> coarse over the given mid space.
  Transformation second(const FiniteCausalSpace& mid) const;
};
Hierarchy random_hierarchy(std::uint64_t seed, std::size_t max_fine_outcomes = 64);

const std::vector<std::string>& lemma_ids();
/// Runs `trials` randomized instances of the lemma's hypotheses and checks
/// its conclusion. Trials whose instance misses the hypotheses are counted
/// as not covered and never asserted. Failing trials carry the instance as
/// JSON in their notes. Throws InvalidArgument for an unknown id.
CheckReport lemma_suite(const std::string& id, std::size_t trials, std::uint64_t seed);

}  // namespace causalkit::oracle
