#pragma once

// Finite causal spaces: a probability measure on a finite product space plus
// one causal kernel K_S per coordinate subset S. Kernels are stored in the
// Omega_S-indexed form; K_S(omega, A) for a full outcome omega is read from
// the row of omega_S.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "causalkit/check_report.hpp"
#include "causalkit/measurable.hpp"

namespace causalkit {

/// Upper bound on the number of coordinates of a causal space; the
/// mechanism has one kernel per subset.
inline constexpr std::size_t kMaxCausalCoordinates = 24;

class FiniteCausalSpace {
 public:
  using Generator = std::function<StochKernel(CoordSet)>;

  /// Explicit mechanism: one kernel per subset, keyed by subset.
  /// Throws InvalidArgument if a subset is missing or a kernel has the
  /// wrong domain (Omega_S) or codomain (Omega).
  static FiniteCausalSpace tabulated(FiniteMeasure measure, std::map<CoordSet, StochKernel> kernels);
  /// Mechanism computed on first use of each subset and cached.
  static FiniteCausalSpace lazy(FiniteMeasure measure, Generator generator);

  const CoordinateSpace& space() const;
  const FiniteMeasure& measure() const;
  /// K_S, with domain space().restrict(S). Thread-safe.
  const StochKernel& kernel(CoordSet subset) const;
  /// Materializes every kernel.
  std::map<CoordSet, StochKernel> kernels() const;

  /// K_S(omega, A) for a full outcome omega.
  Rational evaluate(CoordSet subset, std::size_t outcome, const Event& event) const;

 private:
  struct Family;
  explicit FiniteCausalSpace(std::shared_ptr<const Family> family);
  std::shared_ptr<const Family> family_;
};

/// Subsets of `within` ordered by size, then lexicographically by their
/// sorted coordinate names. Every report that picks a "first" witness uses
/// this order.
std::vector<CoordSet> canonical_subsets(const CoordinateSpace& space, CoordSet within);
inline std::vector<CoordSet> canonical_subsets(const CoordinateSpace& space) {
  return canonical_subsets(space, space.all());
}

/// Both axioms for every subset and atom.
CheckReport validate_causal_space(const FiniteCausalSpace& space);

/// Exact equality of measures and of every kernel.
bool same_causal_space(const FiniteCausalSpace& a, const FiniteCausalSpace& b);

/// Mechanism with K_V(v, .) = delta_v x (marginal of `measure` on the other
/// coordinates). Valid for any measure.
FiniteCausalSpace independent_mechanism(const FiniteMeasure& measure);

/// Mechanism whose kernels are the conditional laws of `measure`;
/// P-null atoms fall back to the independent mechanism row.
FiniteCausalSpace observational_mechanism(const FiniteMeasure& measure);

/// Causal space on Omega_S with the S-marginal of P and the marginalized
/// kernels K'_{S'}(w, B) = K_{S'}(w, B x Omega_{S^c}) for S' within S.
FiniteCausalSpace marginalize(const FiniteCausalSpace& space, CoordSet subset);

/// Intervention on H_U via (Q, L): `mechanism` is a causal space on
/// space.restrict(U) whose measure is Q. Throws InvalidArgument when L is
/// not a valid causal mechanism or lives on the wrong space.
FiniteCausalSpace intervene(const FiniteCausalSpace& space, CoordSet intervened,
                            const FiniteCausalSpace& mechanism);
/// Same, with Q passed separately; it must equal mechanism.measure().
FiniteCausalSpace intervene(const FiniteCausalSpace& space, CoordSet intervened,
                            const FiniteMeasure& q, const FiniteCausalSpace& mechanism);

enum class Effect { kNone, kActive, kDormant };
std::string to_string(Effect effect);

struct EffectClass {
  Effect tag = Effect::kNone;
  std::optional<Witness> witness;  // present iff tag != kNone
};

/// Causal effect of H_U on the event A.
EffectClass classify_effect(const FiniteCausalSpace& space, CoordSet intervened, const Event& event);
/// Causal effect of H_U on the sigma-algebra H_V.
EffectClass classify_effect(const FiniteCausalSpace& space, CoordSet intervened, CoordSet target);

/// Whether H_U is a (local) source of H_V; P-null U-atoms are exempt and
/// listed in the report notes. target = all() asks for a global source.
CheckReport is_source(const FiniteCausalSpace& space, CoordSet conditioning, CoordSet target);
CheckReport is_source(const FiniteCausalSpace& space, CoordSet conditioning, const Event& event);

/// K_U(w, A n B) = K_U(w, A) K_U(w, B) for every w.
CheckReport check_causal_independence(const FiniteCausalSpace& space, CoordSet intervened,
                                      const Event& a, const Event& b);
/// Causal independence of H_V1 and H_V2 on H_U.
CheckReport check_causal_independence(const FiniteCausalSpace& space, CoordSet intervened,
                                      CoordSet first, CoordSet second);
bool causally_independent(const FiniteCausalSpace& space, CoordSet intervened, const Event& a,
                          const Event& b);
bool causally_independent(const FiniteCausalSpace& space, CoordSet intervened, CoordSet first,
                          CoordSet second);

/// Product causal space; coordinates of `first` come first.
FiniteCausalSpace product(const FiniteCausalSpace& first, const FiniteCausalSpace& second,
                          std::size_t max_outcomes = kDefaultMaxOutcomes);

/// Renames coordinates (names absent from `renames` are kept).
FiniteCausalSpace rename(const FiniteCausalSpace& space,
                         const std::map<std::string, std::string>& renames);

/// The causal space with no coordinates.
FiniteCausalSpace one_point_space();

}  // namespace causalkit
