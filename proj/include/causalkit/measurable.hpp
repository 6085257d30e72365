#pragma once

// Finite product measurable spaces: coordinates, events, exact measures and
// stochastic kernels. Every sub-sigma-algebra handled here is generated by a
// set of coordinates, so it is described by a CoordSet.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "causalkit/rational.hpp"

namespace causalkit {

inline constexpr std::size_t kDefaultMaxOutcomes = 4096;
inline constexpr std::size_t kMaxCoordinates = 64;

/// Set of coordinate positions of one CoordinateSpace, as a bit mask.
class CoordSet {
 public:
  constexpr CoordSet() = default;
  constexpr explicit CoordSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr CoordSet first_n(std::size_t n) {
    return CoordSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static constexpr CoordSet single(std::size_t position) {
    return CoordSet(std::uint64_t{1} << position);
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t position) const {
    return position < 64 && ((bits_ >> position) & 1U) != 0;
  }
  constexpr bool is_subset_of(CoordSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  std::size_t size() const;
  std::vector<std::size_t> positions() const;

  constexpr CoordSet operator|(CoordSet o) const { return CoordSet(bits_ | o.bits_); }
  constexpr CoordSet operator&(CoordSet o) const { return CoordSet(bits_ & o.bits_); }
  /// Set difference.
  constexpr CoordSet operator-(CoordSet o) const { return CoordSet(bits_ & ~o.bits_); }
  constexpr bool operator==(const CoordSet&) const = default;
  constexpr auto operator<=>(const CoordSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// Re-expresses `subset` (a subset of `frame`) in the positions of the
/// restricted space over `frame`.
CoordSet compress(CoordSet subset, CoordSet frame);
/// Inverse of compress.
CoordSet expand(CoordSet local, CoordSet frame);

struct Coordinate {
  std::string name;
  std::size_t cardinality = 1;

  bool operator==(const Coordinate&) const = default;
};

/// Outcome set of a finite product space. Outcomes are addressed by a
/// mixed-radix index in which the last coordinate varies fastest.
/// Cheap to copy: the coordinate table is shared and immutable.
class CoordinateSpace {
 public:
  /// The one-point space with no coordinates.
  CoordinateSpace();
  explicit CoordinateSpace(std::vector<Coordinate> coords,
                           std::size_t max_outcomes = kDefaultMaxOutcomes);

  std::size_t dimension() const;
  std::size_t outcome_count() const;
  const std::vector<Coordinate>& coordinates() const;
  const Coordinate& coordinate(std::size_t position) const;
  std::vector<std::string> names() const;

  CoordSet all() const { return CoordSet::first_n(dimension()); }
  /// Position of a named coordinate; throws InvalidArgument if unknown.
  std::size_t position_of(const std::string& name) const;
  bool has_coordinate(const std::string& name) const;
  CoordSet subset(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(CoordSet subset) const;
  /// Throws InvalidArgument if `subset` names positions outside the space.
  void require_subset(CoordSet subset) const;

  std::size_t digit(std::size_t outcome, std::size_t position) const;
  std::vector<std::size_t> digits(std::size_t outcome) const;
  std::size_t encode(std::span<const std::size_t> digits) const;

  /// The space Omega_S over the coordinates in `subset`, in space order.
  CoordinateSpace restrict(CoordSet subset) const;
  /// Index of omega_S inside restrict(subset).
  std::size_t project(std::size_t outcome, CoordSet subset) const;
  /// Replaces the `subset` coordinates of `outcome` by the assignment
  /// `sub_index` of restrict(subset).
  std::size_t assign(std::size_t outcome, CoordSet subset, std::size_t sub_index) const;
  /// Outcome equal to `sub_index` on `subset` and 0 elsewhere.
  std::size_t lift(std::size_t sub_index, CoordSet subset) const {
    return assign(0, subset, sub_index);
  }

  /// "(X=0, Y=1)"; "()" for the one-point space.
  std::string describe(std::size_t outcome) const;

  bool operator==(const CoordinateSpace& other) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// A subset of the outcomes of a CoordinateSpace.
class Event {
 public:
  Event(CoordinateSpace space, std::vector<bool> members);
  static Event empty(const CoordinateSpace& space);
  static Event full(const CoordinateSpace& space);
  static Event singleton(const CoordinateSpace& space, std::size_t outcome);
  /// The atom {omega : omega_S = sub_index} of H_S.
  static Event cylinder(const CoordinateSpace& space, CoordSet subset, std::size_t sub_index);

  const CoordinateSpace& space() const { return space_; }
  const std::vector<bool>& members() const { return members_; }
  bool contains(std::size_t outcome) const { return members_[outcome]; }
  std::size_t count() const;
  std::vector<std::size_t> outcomes() const;

  Event operator&(const Event& other) const;
  Event operator|(const Event& other) const;
  Event complement() const;
  bool operator==(const Event& other) const;

  /// Compact description: "Y=1" for atoms of a coordinate set,
  /// otherwise the list of member outcomes.
  std::string describe() const;

 private:
  CoordinateSpace space_;
  std::vector<bool> members_;
};

/// Exact probability measure on a finite product space.
class FiniteMeasure {
 public:
  /// Throws InvalidArgument unless the weights are non-negative and sum to 1.
  FiniteMeasure(CoordinateSpace space, std::vector<Rational> weights);
  static FiniteMeasure dirac(const CoordinateSpace& space, std::size_t outcome);
  static FiniteMeasure uniform(const CoordinateSpace& space);

  const CoordinateSpace& space() const { return space_; }
  const std::vector<Rational>& weights() const { return weights_; }
  const Rational& weight(std::size_t outcome) const { return weights_[outcome]; }
  Rational probability(const Event& event) const;

  bool operator==(const FiniteMeasure& other) const;

 private:
  CoordinateSpace space_;
  std::vector<Rational> weights_;
};

struct KernelEntry {
  std::size_t outcome;
  Rational weight;

  bool operator==(const KernelEntry&) const = default;
};

/// Probability measure stored sparsely: strictly increasing outcomes,
/// no zero weights.
using SparseRow = std::vector<KernelEntry>;

/// Builds a sparse row from a dense weight vector.
SparseRow sparse_row(const std::vector<Rational>& dense);

/// Stochastic kernel from the atoms of `domain` to measures on `codomain`.
/// A causal kernel K_S is stored with domain Omega_S.
class StochKernel {
 public:
  /// Validates every row (sorted, in range, positive, sums to 1).
  StochKernel(CoordinateSpace domain, CoordinateSpace codomain, std::vector<SparseRow> rows);

  static StochKernel identity(const CoordinateSpace& space);
  static StochKernel constant(const CoordinateSpace& domain, const FiniteMeasure& measure);
  /// Kernel of a deterministic map: row i is the Dirac at image[i].
  static StochKernel deterministic(const CoordinateSpace& domain, const CoordinateSpace& codomain,
                                   std::span<const std::size_t> image);

  const CoordinateSpace& domain() const { return domain_; }
  const CoordinateSpace& codomain() const { return codomain_; }
  std::size_t row_count() const { return rows_.size(); }
  const SparseRow& row(std::size_t index) const { return rows_[index]; }
  const std::vector<SparseRow>& rows() const { return rows_; }

  Rational evaluate(std::size_t index, const Event& event) const;
  Rational evaluate(std::size_t index, std::size_t outcome) const;
  FiniteMeasure row_measure(std::size_t index) const;

  bool operator==(const StochKernel& other) const;

 private:
  CoordinateSpace domain_;
  CoordinateSpace codomain_;
  std::vector<SparseRow> rows_;
};

/// Sum of the row weights over the members of `event`.
Rational row_mass(const SparseRow& row, const Event& event);
/// Image of a row under a deterministic outcome map.
SparseRow push_row(const SparseRow& row, std::span<const std::size_t> image);
/// sum_i row(i) * kernel.row(i).
SparseRow mix_rows(const SparseRow& row, const StochKernel& kernel);
/// Marginal of a row on `subset`, as a dense vector over Omega_subset.
std::vector<Rational> marginal_of_row(const SparseRow& row, const CoordinateSpace& space,
                                      CoordSet subset);

/// True iff membership in `event` depends only on the coordinates in `subset`.
bool is_measurable(const Event& event, CoordSet subset);
/// Same, but first checks that `event` lives on `space`.
bool is_measurable(const CoordinateSpace& space, const Event& event, CoordSet subset);

/// The |Omega_S| cylinder events {omega : omega_S = s}, ordered by s.
std::vector<Event> atoms(const CoordinateSpace& space, CoordSet subset);

/// Marginal of `measure` on Omega_S.
FiniteMeasure project(const FiniteMeasure& measure, CoordSet subset);

/// (k1 o k2)(w, A) = sum_w' k1(w, {w'}) k2(w', A). Requires
/// k1.codomain() == k2.domain().
StochKernel kernel_compose(const StochKernel& k1, const StochKernel& k2);

/// Row (w1, w2) is k1(w1, .) x k2(w2, .). Domains and codomains are the
/// concatenated spaces; coordinate names must not collide.
StochKernel kernel_product(const StochKernel& k1, const StochKernel& k2);

/// Concatenation of two coordinate spaces (names must be distinct).
CoordinateSpace product_space(const CoordinateSpace& first, const CoordinateSpace& second,
                              std::size_t max_outcomes = kDefaultMaxOutcomes);

/// Product measure on product_space(p1.space(), p2.space()).
FiniteMeasure product_measure(const FiniteMeasure& p1, const FiniteMeasure& p2,
                              std::size_t max_outcomes = kDefaultMaxOutcomes);

}  // namespace causalkit
