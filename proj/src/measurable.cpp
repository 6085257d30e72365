#include "causalkit/measurable.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <sstream>

#include "causalkit/error.hpp"

namespace causalkit {

std::size_t CoordSet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<std::size_t> CoordSet::positions() const {
  std::vector<std::size_t> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
  }
  return out;
}

CoordSet compress(CoordSet subset, CoordSet frame) {
  std::uint64_t out = 0;
  std::size_t local = 0;
  for (std::size_t p : frame.positions()) {
    if (subset.contains(p)) {
      out |= std::uint64_t{1} << local;
    }
    ++local;
  }
  return CoordSet(out);
}

CoordSet expand(CoordSet local, CoordSet frame) {
  std::uint64_t out = 0;
  std::size_t index = 0;
  for (std::size_t p : frame.positions()) {
    if (local.contains(index)) {
      out |= std::uint64_t{1} << p;
    }
    ++index;
  }
  return CoordSet(out);
}

struct CoordinateSpace::Data {
  std::vector<Coordinate> coords;
  std::vector<std::size_t> strides;
  std::size_t outcome_count = 1;
};

CoordinateSpace::CoordinateSpace() : data_(std::make_shared<const Data>()) {}

CoordinateSpace::CoordinateSpace(std::vector<Coordinate> coords, std::size_t max_outcomes) {
  if (coords.size() > kMaxCoordinates) {
    throw InvalidArgument("too many coordinates (" + std::to_string(coords.size()) + ")");
  }
  std::set<std::string> seen;
  std::size_t total = 1;
  for (const auto& c : coords) {
    if (c.name.empty()) {
      throw InvalidArgument("coordinate names must be non-empty");
    }
    if (!seen.insert(c.name).second) {
      throw InvalidArgument("duplicate coordinate name '" + c.name + "'");
    }
    if (c.cardinality < 1) {
      throw InvalidArgument("coordinate '" + c.name + "' has cardinality 0");
    }
    if (total > max_outcomes / c.cardinality) {
      throw CapExceeded("outcome count exceeds the cap of " + std::to_string(max_outcomes));
    }
    total *= c.cardinality;
  }
  auto data = std::make_shared<Data>();
  data->strides.assign(coords.size(), 1);
  for (std::size_t i = coords.size(); i-- > 1;) {
    data->strides[i - 1] = data->strides[i] * coords[i].cardinality;
  }
  data->outcome_count = total;
  data->coords = std::move(coords);
  data_ = std::move(data);
}

std::size_t CoordinateSpace::dimension() const { return data_->coords.size(); }
std::size_t CoordinateSpace::outcome_count() const { return data_->outcome_count; }
const std::vector<Coordinate>& CoordinateSpace::coordinates() const { return data_->coords; }
const Coordinate& CoordinateSpace::coordinate(std::size_t position) const {
  return data_->coords.at(position);
}

std::vector<std::string> CoordinateSpace::names() const {
  std::vector<std::string> out;
  out.reserve(dimension());
  for (const auto& c : data_->coords) {
    out.push_back(c.name);
  }
  return out;
}

std::size_t CoordinateSpace::position_of(const std::string& name) const {
  for (std::size_t i = 0; i < data_->coords.size(); ++i) {
    if (data_->coords[i].name == name) {
      return i;
    }
  }
  throw InvalidArgument("unknown coordinate '" + name + "'");
}

bool CoordinateSpace::has_coordinate(const std::string& name) const {
  return std::any_of(data_->coords.begin(), data_->coords.end(),
                     [&](const Coordinate& c) { return c.name == name; });
}

CoordSet CoordinateSpace::subset(const std::vector<std::string>& names) const {
  CoordSet out;
  for (const auto& n : names) {
    out = out | CoordSet::single(position_of(n));
  }
  return out;
}

std::vector<std::string> CoordinateSpace::names_of(CoordSet subset) const {
  require_subset(subset);
  std::vector<std::string> out;
  for (std::size_t p : subset.positions()) {
    out.push_back(data_->coords[p].name);
  }
  return out;
}

void CoordinateSpace::require_subset(CoordSet subset) const {
  if (!subset.is_subset_of(all())) {
    throw InvalidArgument("coordinate subset is not contained in the space");
  }
}

std::size_t CoordinateSpace::digit(std::size_t outcome, std::size_t position) const {
  return (outcome / data_->strides[position]) % data_->coords[position].cardinality;
}

std::vector<std::size_t> CoordinateSpace::digits(std::size_t outcome) const {
  std::vector<std::size_t> out(dimension());
  for (std::size_t i = 0; i < dimension(); ++i) {
    out[i] = digit(outcome, i);
  }
  return out;
}

std::size_t CoordinateSpace::encode(std::span<const std::size_t> digits) const {
  if (digits.size() != dimension()) {
    throw InvalidArgument("digit vector has the wrong length");
  }
  std::size_t out = 0;
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (digits[i] >= data_->coords[i].cardinality) {
      throw InvalidArgument("value out of range for coordinate '" + data_->coords[i].name + "'");
    }
    out += digits[i] * data_->strides[i];
  }
  return out;
}

CoordinateSpace CoordinateSpace::restrict(CoordSet subset) const {
  require_subset(subset);
  if (subset == all()) {
    return *this;
  }
  std::vector<Coordinate> coords;
  for (std::size_t p : subset.positions()) {
    coords.push_back(data_->coords[p]);
  }
  return CoordinateSpace(std::move(coords), outcome_count());
}

std::size_t CoordinateSpace::project(std::size_t outcome, CoordSet subset) const {
  std::size_t out = 0;
  for (std::size_t p : subset.positions()) {
    out = out * data_->coords[p].cardinality + digit(outcome, p);
  }
  return out;
}

std::size_t CoordinateSpace::assign(std::size_t outcome, CoordSet subset,
                                    std::size_t sub_index) const {
  const auto positions = subset.positions();
  for (std::size_t k = positions.size(); k-- > 0;) {
    const std::size_t p = positions[k];
    const std::size_t card = data_->coords[p].cardinality;
    const std::size_t value = sub_index % card;
    sub_index /= card;
    outcome = outcome - digit(outcome, p) * data_->strides[p] + value * data_->strides[p];
  }
  return outcome;
}

std::string CoordinateSpace::describe(std::size_t outcome) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < dimension(); ++i) {
    if (i != 0) {
      os << ", ";
    }
    os << data_->coords[i].name << '=' << digit(outcome, i);
  }
  os << ')';
  return os.str();
}

bool CoordinateSpace::operator==(const CoordinateSpace& other) const {
  return data_ == other.data_ || data_->coords == other.data_->coords;
}

// ---------------------------------------------------------------------------

Event::Event(CoordinateSpace space, std::vector<bool> members)
    : space_(std::move(space)), members_(std::move(members)) {
  if (members_.size() != space_.outcome_count()) {
    throw SpaceMismatch("event bitset length does not match the outcome count");
  }
}

Event Event::empty(const CoordinateSpace& space) {
  return Event(space, std::vector<bool>(space.outcome_count(), false));
}

Event Event::full(const CoordinateSpace& space) {
  return Event(space, std::vector<bool>(space.outcome_count(), true));
}

Event Event::singleton(const CoordinateSpace& space, std::size_t outcome) {
  std::vector<bool> m(space.outcome_count(), false);
  m.at(outcome) = true;
  return Event(space, std::move(m));
}

Event Event::cylinder(const CoordinateSpace& space, CoordSet subset, std::size_t sub_index) {
  space.require_subset(subset);
  std::vector<bool> m(space.outcome_count(), false);
  for (std::size_t o = 0; o < m.size(); ++o) {
    m[o] = space.project(o, subset) == sub_index;
  }
  return Event(space, std::move(m));
}

std::size_t Event::count() const {
  return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

std::vector<std::size_t> Event::outcomes() const {
  std::vector<std::size_t> out;
  for (std::size_t o = 0; o < members_.size(); ++o) {
    if (members_[o]) {
      out.push_back(o);
    }
  }
  return out;
}

Event Event::operator&(const Event& other) const {
  if (!(space_ == other.space_)) {
    throw SpaceMismatch("intersection of events on different spaces");
  }
  std::vector<bool> m(members_.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = members_[i] && other.members_[i];
  }
  return Event(space_, std::move(m));
}

Event Event::operator|(const Event& other) const {
  if (!(space_ == other.space_)) {
    throw SpaceMismatch("union of events on different spaces");
  }
  std::vector<bool> m(members_.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = members_[i] || other.members_[i];
  }
  return Event(space_, std::move(m));
}

Event Event::complement() const {
  std::vector<bool> m(members_.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] = !members_[i];
  }
  return Event(space_, std::move(m));
}

bool Event::operator==(const Event& other) const {
  return space_ == other.space_ && members_ == other.members_;
}

std::string Event::describe() const {
  const std::size_t n = count();
  if (n == members_.size()) {
    return "Omega";
  }
  if (n == 0) {
    return "{}";
  }
  // Smallest coordinate set for which the event is an atom.
  const std::size_t d = space_.dimension();
  for (std::uint64_t mask = 1; d < 20 && mask < (std::uint64_t{1} << d); ++mask) {
    const CoordSet s(mask);
    if (!is_measurable(*this, s)) {
      continue;
    }
    const auto first = outcomes().front();
    if (*this == cylinder(space_, s, space_.project(first, s))) {
      std::ostringstream os;
      bool sep = false;
      for (std::size_t p : s.positions()) {
        os << (sep ? "," : "") << space_.coordinate(p).name << '=' << space_.digit(first, p);
        sep = true;
      }
      return os.str();
    }
  }
  std::ostringstream os;
  os << '{';
  bool sep = false;
  for (std::size_t o : outcomes()) {
    os << (sep ? ", " : "") << space_.describe(o);
    sep = true;
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------------------

FiniteMeasure::FiniteMeasure(CoordinateSpace space, std::vector<Rational> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (weights_.size() != space_.outcome_count()) {
    throw InvalidArgument("measure has " + std::to_string(weights_.size()) + " weights, expected " +
                          std::to_string(space_.outcome_count()));
  }
  Rational total = 0;
  for (const auto& w : weights_) {
    if (w < 0) {
      throw InvalidArgument("negative weight " + to_string(w));
    }
    total += w;
  }
  if (total != 1) {
    throw InvalidArgument("weights sum to " + to_string(total) + ", not 1");
  }
}

FiniteMeasure FiniteMeasure::dirac(const CoordinateSpace& space, std::size_t outcome) {
  std::vector<Rational> w(space.outcome_count(), Rational(0));
  w.at(outcome) = 1;
  return FiniteMeasure(space, std::move(w));
}

FiniteMeasure FiniteMeasure::uniform(const CoordinateSpace& space) {
  const Rational each(1, space.outcome_count());
  return FiniteMeasure(space, std::vector<Rational>(space.outcome_count(), each));
}

Rational FiniteMeasure::probability(const Event& event) const {
  if (!(event.space() == space_)) {
    throw SpaceMismatch("event and measure live on different spaces");
  }
  Rational total = 0;
  for (std::size_t o = 0; o < weights_.size(); ++o) {
    if (event.contains(o)) {
      total += weights_[o];
    }
  }
  return total;
}

bool FiniteMeasure::operator==(const FiniteMeasure& other) const {
  return space_ == other.space_ && weights_ == other.weights_;
}

// ---------------------------------------------------------------------------

SparseRow sparse_row(const std::vector<Rational>& dense) {
  SparseRow row;
  for (std::size_t o = 0; o < dense.size(); ++o) {
    if (dense[o] != 0) {
      row.push_back({o, dense[o]});
    }
  }
  return row;
}

StochKernel::StochKernel(CoordinateSpace domain, CoordinateSpace codomain,
                         std::vector<SparseRow> rows)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), rows_(std::move(rows)) {
  if (rows_.size() != domain_.outcome_count()) {
    throw InvalidArgument("kernel has " + std::to_string(rows_.size()) + " rows, expected " +
                          std::to_string(domain_.outcome_count()));
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Rational total = 0;
    std::size_t previous = 0;
    for (std::size_t k = 0; k < rows_[r].size(); ++k) {
      const auto& e = rows_[r][k];
      if (e.outcome >= codomain_.outcome_count() || (k > 0 && e.outcome <= previous)) {
        throw InvalidArgument("kernel row " + std::to_string(r) + " is not a sorted sparse row");
      }
      if (e.weight <= 0) {
        throw InvalidArgument("kernel row " + std::to_string(r) + " has a non-positive entry");
      }
      previous = e.outcome;
      total += e.weight;
    }
    if (total != 1) {
      throw InvalidArgument("kernel row " + std::to_string(r) + " sums to " + to_string(total));
    }
  }
}

StochKernel StochKernel::identity(const CoordinateSpace& space) {
  std::vector<SparseRow> rows(space.outcome_count());
  for (std::size_t o = 0; o < rows.size(); ++o) {
    rows[o] = {{o, Rational(1)}};
  }
  return StochKernel(space, space, std::move(rows));
}

StochKernel StochKernel::constant(const CoordinateSpace& domain, const FiniteMeasure& measure) {
  return StochKernel(domain, measure.space(),
                     std::vector<SparseRow>(domain.outcome_count(), sparse_row(measure.weights())));
}

StochKernel StochKernel::deterministic(const CoordinateSpace& domain,
                                       const CoordinateSpace& codomain,
                                       std::span<const std::size_t> image) {
  if (image.size() != domain.outcome_count()) {
    throw InvalidArgument("deterministic map is not total on its domain");
  }
  std::vector<SparseRow> rows(image.size());
  for (std::size_t o = 0; o < image.size(); ++o) {
    rows[o] = {{image[o], Rational(1)}};
  }
  return StochKernel(domain, codomain, std::move(rows));
}

Rational StochKernel::evaluate(std::size_t index, const Event& event) const {
  if (!(event.space() == codomain_)) {
    throw SpaceMismatch("event does not live on the kernel codomain");
  }
  return row_mass(rows_.at(index), event);
}

Rational StochKernel::evaluate(std::size_t index, std::size_t outcome) const {
  for (const auto& e : rows_.at(index)) {
    if (e.outcome == outcome) {
      return e.weight;
    }
  }
  return 0;
}

FiniteMeasure StochKernel::row_measure(std::size_t index) const {
  std::vector<Rational> w(codomain_.outcome_count(), Rational(0));
  for (const auto& e : rows_.at(index)) {
    w[e.outcome] = e.weight;
  }
  return FiniteMeasure(codomain_, std::move(w));
}

bool StochKernel::operator==(const StochKernel& other) const {
  return domain_ == other.domain_ && codomain_ == other.codomain_ && rows_ == other.rows_;
}

Rational row_mass(const SparseRow& row, const Event& event) {
  Rational total = 0;
  for (const auto& e : row) {
    if (event.contains(e.outcome)) {
      total += e.weight;
    }
  }
  return total;
}

namespace {

SparseRow collect(std::vector<Rational>& dense, std::vector<std::size_t>& touched) {
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  SparseRow out;
  out.reserve(touched.size());
  for (std::size_t o : touched) {
    if (dense[o] != 0) {
      out.push_back({o, dense[o]});
    }
    dense[o] = 0;
  }
  touched.clear();
  return out;
}

}  // namespace

SparseRow push_row(const SparseRow& row, std::span<const std::size_t> image) {
  std::vector<std::pair<std::size_t, Rational>> pairs;
  pairs.reserve(row.size());
  for (const auto& e : row) {
    pairs.emplace_back(image[e.outcome], e.weight);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseRow out;
  for (auto& [o, w] : pairs) {
    if (!out.empty() && out.back().outcome == o) {
      out.back().weight += w;
    } else {
      out.push_back({o, std::move(w)});
    }
  }
  return out;
}

SparseRow mix_rows(const SparseRow& row, const StochKernel& kernel) {
  std::vector<Rational> dense(kernel.codomain().outcome_count(), Rational(0));
  std::vector<std::size_t> touched;
  for (const auto& e : row) {
    for (const auto& f : kernel.row(e.outcome)) {
      dense[f.outcome] += e.weight * f.weight;
      touched.push_back(f.outcome);
    }
  }
  return collect(dense, touched);
}

std::vector<Rational> marginal_of_row(const SparseRow& row, const CoordinateSpace& space,
                                      CoordSet subset) {
  std::vector<Rational> out(space.restrict(subset).outcome_count(), Rational(0));
  for (const auto& e : row) {
    out[space.project(e.outcome, subset)] += e.weight;
  }
  return out;
}

bool is_measurable(const Event& event, CoordSet subset) {
  const auto& space = event.space();
  space.require_subset(subset);
  const std::size_t cells = space.restrict(subset).outcome_count();
  // 0 = unseen, 1 = out, 2 = in
  std::vector<unsigned char> state(cells, 0);
  for (std::size_t o = 0; o < space.outcome_count(); ++o) {
    const std::size_t key = space.project(o, subset);
    const unsigned char v = event.contains(o) ? 2 : 1;
    if (state[key] == 0) {
      state[key] = v;
    } else if (state[key] != v) {
      return false;
    }
  }
  return true;
}

bool is_measurable(const CoordinateSpace& space, const Event& event, CoordSet subset) {
  if (!(event.space() == space)) {
    throw SpaceMismatch("event does not belong to the given space");
  }
  return is_measurable(event, subset);
}

std::vector<Event> atoms(const CoordinateSpace& space, CoordSet subset) {
  space.require_subset(subset);
  const std::size_t cells = space.restrict(subset).outcome_count();
  std::vector<std::vector<bool>> members(cells, std::vector<bool>(space.outcome_count(), false));
  for (std::size_t o = 0; o < space.outcome_count(); ++o) {
    members[space.project(o, subset)][o] = true;
  }
  std::vector<Event> out;
  out.reserve(cells);
  for (auto& m : members) {
    out.emplace_back(space, std::move(m));
  }
  return out;
}

FiniteMeasure project(const FiniteMeasure& measure, CoordSet subset) {
  const auto& space = measure.space();
  const CoordinateSpace sub = space.restrict(subset);
  std::vector<Rational> w(sub.outcome_count(), Rational(0));
  for (std::size_t o = 0; o < space.outcome_count(); ++o) {
    w[space.project(o, subset)] += measure.weight(o);
  }
  return FiniteMeasure(sub, std::move(w));
}

StochKernel kernel_compose(const StochKernel& k1, const StochKernel& k2) {
  if (!(k1.codomain() == k2.domain())) {
    throw SpaceMismatch("kernel_compose: codomain of the first kernel is not the domain of the second");
  }
  std::vector<SparseRow> rows;
  rows.reserve(k1.row_count());
  for (const auto& row : k1.rows()) {
    rows.push_back(mix_rows(row, k2));
  }
  return StochKernel(k1.domain(), k2.codomain(), std::move(rows));
}

CoordinateSpace product_space(const CoordinateSpace& first, const CoordinateSpace& second,
                              std::size_t max_outcomes) {
  std::vector<Coordinate> coords = first.coordinates();
  for (const auto& c : second.coordinates()) {
    if (first.has_coordinate(c.name)) {
      throw InvalidArgument("coordinate name '" + c.name + "' occurs in both factors");
    }
    coords.push_back(c);
  }
  return CoordinateSpace(std::move(coords), max_outcomes);
}

StochKernel kernel_product(const StochKernel& k1, const StochKernel& k2) {
  const std::size_t big = std::max<std::size_t>(
      k1.domain().outcome_count() * k2.domain().outcome_count(),
      k1.codomain().outcome_count() * k2.codomain().outcome_count());
  const CoordinateSpace domain = product_space(k1.domain(), k2.domain(), big);
  const CoordinateSpace codomain = product_space(k1.codomain(), k2.codomain(), big);
  const std::size_t width = k2.codomain().outcome_count();
  std::vector<SparseRow> rows;
  rows.reserve(domain.outcome_count());
  for (const auto& r1 : k1.rows()) {
    for (const auto& r2 : k2.rows()) {
      SparseRow row;
      row.reserve(r1.size() * r2.size());
      for (const auto& a : r1) {
        for (const auto& b : r2) {
          row.push_back({a.outcome * width + b.outcome, a.weight * b.weight});
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return StochKernel(domain, codomain, std::move(rows));
}

FiniteMeasure product_measure(const FiniteMeasure& p1, const FiniteMeasure& p2,
                              std::size_t max_outcomes) {
  const CoordinateSpace space = product_space(p1.space(), p2.space(), max_outcomes);
  std::vector<Rational> w;
  w.reserve(space.outcome_count());
  for (const auto& a : p1.weights()) {
    for (const auto& b : p2.weights()) {
      w.push_back(a * b);
    }
  }
  return FiniteMeasure(space, std::move(w));
}

}  // namespace causalkit
