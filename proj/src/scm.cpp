#include "causalkit/scm.hpp"

#include <algorithm>
#include <set>

#include "causalkit/error.hpp"

namespace causalkit {

namespace {

CoordinateSpace space_of(const std::vector<ScmVariable>& variables, std::size_t max_outcomes) {
  std::vector<Coordinate> coords;
  coords.reserve(variables.size());
  for (const auto& v : variables) coords.push_back({v.name, v.cardinality});
  return CoordinateSpace(std::move(coords), max_outcomes);
}

}  // namespace

FiniteSCM::FiniteSCM(std::vector<ScmVariable> variables, std::size_t max_outcomes)
    : variables_(std::move(variables)), space_(space_of(variables_, max_outcomes)) {
  const std::size_t n = variables_.size();
  if (n > kMaxCausalCoordinates) {
    throw CapExceeded("an SCM supports at most " + std::to_string(kMaxCausalCoordinates) + " variables");
  }
  parent_positions_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = variables_[i];
    std::set<std::string> seen;
    std::size_t parent_cells = 1;
    for (const auto& p : v.parents) {
      if (!space_.has_coordinate(p)) {
        throw InvalidArgument("variable '" + v.name + "' has unknown parent '" + p + "'");
      }
      if (p == v.name) {
        throw CyclicGraph("variable '" + v.name + "' is its own parent");
      }
      if (!seen.insert(p).second) {
        throw InvalidArgument("variable '" + v.name + "' lists parent '" + p + "' twice");
      }
      const std::size_t pos = space_.position_of(p);
      parent_positions_[i].push_back(pos);
      parent_cells *= space_.coordinate(pos).cardinality;
    }
    if (v.noise.empty()) {
      throw InvalidArgument("variable '" + v.name + "' has an empty noise law");
    }
    Rational total = 0;
    for (const auto& w : v.noise) {
      if (w < 0) throw InvalidArgument("variable '" + v.name + "' has a negative noise weight");
      total += w;
    }
    if (total != 1) {
      throw InvalidArgument("noise law of '" + v.name + "' sums to " + to_string(total));
    }
    if (v.mechanism.size() != parent_cells * v.noise.size()) {
      throw InvalidArgument("mechanism table of '" + v.name + "' has " +
                            std::to_string(v.mechanism.size()) + " entries, expected " +
                            std::to_string(parent_cells * v.noise.size()));
    }
    for (std::size_t value : v.mechanism) {
      if (value >= v.cardinality) {
        throw InvalidArgument("mechanism of '" + v.name + "' produces value " + std::to_string(value) +
                              " outside its domain");
      }
    }
  }

  // Kahn's algorithm, taking the earliest declared ready variable first.
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    indegree[i] = parent_positions_[i].size();
    for (std::size_t p : parent_positions_[i]) children[p].push_back(i);
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  while (!ready.empty()) {
    const std::size_t i = *ready.begin();
    ready.erase(ready.begin());
    order_.push_back(i);
    for (std::size_t c : children[i]) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  if (order_.size() != n) {
    std::string cyclic;
    for (std::size_t i = 0; i < n; ++i) {
      if (indegree[i] > 0) cyclic += (cyclic.empty() ? "" : ", ") + variables_[i].name;
    }
    throw CyclicGraph("the parent graph has a cycle through " + cyclic);
  }
}

SparseRow FiniteSCM::law(CoordSet pinned, std::size_t outcome) const {
  // Partial assignments are outcome indices with unassigned digits at 0.
  std::vector<std::pair<std::size_t, Rational>> states{{space_.assign(0, pinned, space_.project(outcome, pinned)), Rational(1)}};
  for (std::size_t i : order_) {
    if (pinned.contains(i)) continue;
    const auto& v = variables_[i];
    const std::size_t stride = space_.assign(0, CoordSet::single(i), 1);
    std::vector<std::pair<std::size_t, Rational>> next;
    next.reserve(states.size() * v.noise.size());
    for (const auto& [state, weight] : states) {
      std::size_t parent_index = 0;
      for (std::size_t p : parent_positions_[i]) {
        parent_index = parent_index * space_.coordinate(p).cardinality + space_.digit(state, p);
      }
      for (std::size_t e = 0; e < v.noise.size(); ++e) {
        if (v.noise[e] == 0) continue;
        const std::size_t value = v.mechanism[parent_index * v.noise.size() + e];
        next.emplace_back(state + value * stride, weight * v.noise[e]);
      }
    }
    std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    states.clear();
    for (auto& [s, w] : next) {
      if (!states.empty() && states.back().first == s) {
        states.back().second += w;
      } else {
        states.emplace_back(s, std::move(w));
      }
    }
  }
  std::sort(states.begin(), states.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseRow row;
  row.reserve(states.size());
  for (auto& [s, w] : states) row.push_back({s, std::move(w)});
  return row;
}

FiniteMeasure FiniteSCM::observational() const {
  std::vector<Rational> weights(space_.outcome_count(), Rational(0));
  for (const auto& e : law(CoordSet{}, 0)) weights[e.outcome] = e.weight;
  return FiniteMeasure(space_, std::move(weights));
}

FiniteSCM FiniteSCM::pinned(const std::map<std::string, std::size_t>& values) const {
  std::vector<ScmVariable> vars = variables_;
  for (const auto& [name, value] : values) {
    auto& v = vars[space_.position_of(name)];
    if (value >= v.cardinality) {
      throw InvalidArgument("value " + std::to_string(value) + " outside the domain of '" + name + "'");
    }
    v.parents.clear();
    v.noise = {Rational(1)};
    v.mechanism = {value};
  }
  return FiniteSCM(std::move(vars), space_.outcome_count());
}

FiniteCausalSpace compile(const FiniteSCM& scm) {
  return FiniteCausalSpace::lazy(scm.observational(), [scm](CoordSet s) {
    const auto& space = scm.space();
    const CoordinateSpace sub = space.restrict(s);
    std::vector<SparseRow> rows;
    rows.reserve(sub.outcome_count());
    for (std::size_t r = 0; r < sub.outcome_count(); ++r) rows.push_back(scm.law(s, space.lift(r, s)));
    return StochKernel(sub, space, std::move(rows));
  });
}

FiniteCausalSpace marginal_space(const FiniteSCM& scm, const std::vector<std::string>& names) {
  if (names.empty()) {
    throw InvalidArgument("marginal_space needs at least one variable");
  }
  return marginalize(compile(scm), scm.space().subset(names));
}

Transformation inclusion_transform(const FiniteSCM& scm, const std::vector<std::string>& names) {
  const FiniteCausalSpace full = compile(scm);
  const FiniteCausalSpace part = marginal_space(scm, names);
  const auto& space = scm.space();
  const CoordSet s = space.subset(names);
  const auto& p = full.measure();
  const CoordinateSpace sub = space.restrict(s);

  std::vector<Rational> mass(sub.outcome_count(), Rational(0));
  for (std::size_t o = 0; o < space.outcome_count(); ++o) mass[space.project(o, s)] += p.weight(o);
  for (std::size_t r = 0; r < mass.size(); ++r) {
    if (mass[r] == 0) {
      throw NullAtom("cannot condition on the null atom " + sub.describe(r));
    }
  }
  std::vector<SparseRow> rows(sub.outcome_count());
  for (std::size_t o = 0; o < space.outcome_count(); ++o) {
    if (p.weight(o) != 0) {
      const std::size_t r = space.project(o, s);
      rows[r].push_back({o, p.weight(o) / mass[r]});
    }
  }
  StochKernel kappa(part.space(), space, std::move(rows));
  std::map<std::string, std::string> rho;
  for (const auto& n : part.space().names()) rho.emplace(n, n);
  IndexMap index(part.space(), space, rho);
  return Transformation::stochastic(part, full, std::move(kappa), std::move(index));
}

}  // namespace causalkit
