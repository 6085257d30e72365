#pragma once

// Transformations (kappa, rho) between finite causal spaces and the checks
// that make them causal transformations. Checks never gate construction, so
// invalid transformations are ordinary values that can be reported on.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalkit/causal_space.hpp"
#include "causalkit/check_report.hpp"

namespace causalkit {

/// rho : T1 -> T2, stored by coordinate position.
class IndexMap {
 public:
  IndexMap(const CoordinateSpace& source, const CoordinateSpace& target,
           const std::map<std::string, std::string>& rho);
  IndexMap(const CoordinateSpace& source, const CoordinateSpace& target,
           std::vector<std::size_t> positions);
  static IndexMap identity(const CoordinateSpace& space);

  const CoordinateSpace& source() const { return source_; }
  const CoordinateSpace& target() const { return target_; }
  std::size_t operator()(std::size_t source_position) const { return positions_[source_position]; }
  const std::vector<std::size_t>& positions() const { return positions_; }

  /// rho(T1).
  CoordSet image() const { return image_; }
  bool surjective() const { return image_ == target_.all(); }
  /// rho(S) for S within T1.
  CoordSet apply(CoordSet source_subset) const;
  /// rho^-1(S) for S within T2.
  CoordSet preimage(CoordSet target_subset) const;
  /// The map t -> next(this(t)).
  IndexMap then(const IndexMap& next) const;
  /// Restriction to the source coordinates `subset`, landing in rho(subset);
  /// positions refer to the restricted spaces.
  IndexMap restrict(CoordSet subset) const;

  std::map<std::string, std::string> names() const;
  bool operator==(const IndexMap& other) const;

 private:
  CoordinateSpace source_;
  CoordinateSpace target_;
  std::vector<std::size_t> positions_;
  CoordSet image_;
};

class Transformation {
 public:
  /// kappa : Omega1 x H2 -> [0,1] given with domain Omega1 (full coordinates).
  static Transformation stochastic(FiniteCausalSpace source, FiniteCausalSpace target,
                                   StochKernel kappa, IndexMap rho);
  /// Deterministic map f, given by the image of every outcome of Omega1.
  static Transformation deterministic(FiniteCausalSpace source, FiniteCausalSpace target,
                                      std::vector<std::size_t> f, IndexMap rho);

  const FiniteCausalSpace& source() const { return source_; }
  const FiniteCausalSpace& target() const { return target_; }
  const IndexMap& rho() const { return rho_; }
  /// kappa, or the lifted kernel 1_A(f(omega)) of a deterministic map.
  const StochKernel& kernel() const { return kappa_; }
  bool is_deterministic() const { return f_.has_value(); }
  /// The map f; only for deterministic transformations.
  const std::vector<std::size_t>& map() const;

  /// Same (kappa, rho), different target space (same outcome space).
  Transformation with_target(FiniteCausalSpace target) const;

 private:
  Transformation(FiniteCausalSpace source, FiniteCausalSpace target, StochKernel kappa,
                 std::optional<std::vector<std::size_t>> f, IndexMap rho);

  FiniteCausalSpace source_;
  FiniteCausalSpace target_;
  StochKernel kappa_;
  std::optional<std::vector<std::size_t>> f_;
  IndexMap rho_;
};

/// For every S within rho(T1) and every atom A of H2_S, kappa(., A) is
/// H1_{rho^-1(S)}-measurable.
CheckReport check_admissible(const Transformation& t);

/// P1 kappa = P2, checked on singletons.
CheckReport check_distributional(const Transformation& t);

enum class EventScope {
  kImage,      // atoms of H2_{rho(T1)}, which is what the definition requires
  kAllEvents,  // every event of Omega2
};

/// K1_{rho^-1(S)} kappa = kappa K2_S for every S within rho(T1).
CheckReport check_interventional(const Transformation& t, EventScope scope = EventScope::kImage);

/// Admissibility, distributional and interventional consistency.
CheckReport check_transformation(const Transformation& t);

bool is_abstraction(const Transformation& t);
bool is_perfect_abstraction(const Transformation& t);

struct Composition {
  Transformation transformation;
  CheckReport report;
};

/// (kappa1 kappa2, rho2 o rho1) together with the three checks on the result.
/// The report notes whether the composition guarantee applies (first map an
/// abstraction, both inputs causal transformations).
Composition compose(const Transformation& first, const Transformation& second);

/// The unique causal space on Omega2 that makes (f, rho) a causal
/// transformation. Throws NotSurjective, InvalidArgument (pair not
/// admissible) or WellDefinednessViolation (kernel not constant on a cell of
/// f^-1(H2_S)).
FiniteCausalSpace pushforward_space(const FiniteCausalSpace& source, std::span<const std::size_t> f,
                                    const IndexMap& rho);

/// Image of each outcome of Omega1_{rho^-1(U2)} in Omega2_{U2} under an
/// admissible f.
std::vector<std::size_t> restricted_map(const CoordinateSpace& source, const CoordinateSpace& target,
                                        std::span<const std::size_t> f, const IndexMap& rho,
                                        CoordSet target_subset);

struct IntervenedPair {
  FiniteCausalSpace source;
  FiniteCausalSpace target;
  CheckReport report;
};

/// Intervenes on H1_{rho^-1(U2)} with the mechanism L1 (measure Q1) and on
/// H2_{U2} with its pushforward, then checks (f, rho) between the two
/// intervened spaces.
IntervenedPair pushforward_intervention(const FiniteCausalSpace& source, std::span<const std::size_t> f,
                                        const IndexMap& rho, CoordSet intervened_target,
                                        const FiniteCausalSpace& mechanism);

/// Whether two causal transformations with the same (kappa, rho) have targets
/// that agree where the targets are constrained: the measure, and K_S on
/// H2_{rho(T1)} at P2-positive atoms.
CheckReport rigidity_check(const Transformation& first, const Transformation& second);

/// kappa(omega, .) = delta_omega x P2 into product(C1, C2), rho the inclusion.
Transformation inclusion_into_product(const FiniteCausalSpace& first, const FiniteCausalSpace& second,
                                      std::size_t max_outcomes = kDefaultMaxOutcomes);

/// Table of a deterministic map given digit-wise.
std::vector<std::size_t> tabulate_map(
    const CoordinateSpace& source, const CoordinateSpace& target,
    const std::function<std::vector<std::size_t>(const std::vector<std::size_t>&)>& f);

/// Identity transformation of a space.
Transformation identity_transformation(const FiniteCausalSpace& space);

}  // namespace causalkit
