#pragma once

// Finite acyclic structural causal models with one private noise per
// variable, and their compilation to causal spaces.

#include <map>
#include <string>
#include <vector>

#include "causalkit/causal_space.hpp"
#include "causalkit/transform.hpp"

namespace causalkit {

struct ScmVariable {
  std::string name;
  std::size_t cardinality = 2;
  std::vector<std::string> parents;
  /// Law of the private noise; its length is the noise cardinality.
  std::vector<Rational> noise;
  /// Value for every (parent assignment, noise value): entry
  /// parent_index * noise.size() + noise_value, where parent_index is the
  /// mixed-radix index of the parent values in `parents` order (last fastest).
  std::vector<std::size_t> mechanism;

  bool operator==(const ScmVariable&) const = default;
};

class FiniteSCM {
 public:
  /// Throws InvalidArgument for malformed tables, CyclicGraph for cycles and
  /// CapExceeded when the outcome space is too large.
  explicit FiniteSCM(std::vector<ScmVariable> variables, std::size_t max_outcomes = kDefaultMaxOutcomes);

  const std::vector<ScmVariable>& variables() const { return variables_; }
  const CoordinateSpace& space() const { return space_; }
  const std::vector<std::size_t>& topological_order() const { return order_; }

  /// Law of the system with the variables in `pinned` held at their values
  /// in `outcome` and every other noise drawn afresh.
  SparseRow law(CoordSet pinned, std::size_t outcome) const;
  FiniteMeasure observational() const;

  /// Hard intervention: pinned variables become constants.
  FiniteSCM pinned(const std::map<std::string, std::size_t>& values) const;

 private:
  std::vector<ScmVariable> variables_;
  CoordinateSpace space_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> parent_positions_;
};

/// P is the observational law; K_S(omega_S, .) is the law of the SCM with
/// the variables in S pinned to omega_S.
FiniteCausalSpace compile(const FiniteSCM& scm);

/// The causal space on the variables `names` with the marginalized
/// mechanism. Throws InvalidArgument for an empty selection.
FiniteCausalSpace marginal_space(const FiniteSCM& scm, const std::vector<std::string>& names);

/// (kappa, rho) from marginal_space(scm, names) into compile(scm), with
/// kappa(omega_S, .) = P(. | X_S = omega_S). Throws NullAtom when some
/// conditioning atom has probability zero.
Transformation inclusion_transform(const FiniteSCM& scm, const std::vector<std::string>& names);

}  // namespace causalkit
