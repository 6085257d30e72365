#pragma once

// Reference semantics of a finite SCM by literal enumeration of every noise
// configuration. Deliberately shares no code with FiniteSCM::law.

#include <map>
#include <string>
#include <vector>

#include "causalkit/scm.hpp"

namespace oracle_support {

using causalkit::Rational;

/// Dense law over the SCM's outcome space; `pinned` maps variable names to
/// forced values (their noise is still enumerated, but ignored).
inline std::vector<Rational> enumerate_law(const causalkit::FiniteSCM& scm,
                                           const std::map<std::string, std::size_t>& pinned = {}) {
  const auto& vars = scm.variables();
  const auto& space = scm.space();
  const std::size_t n = vars.size();
  std::vector<Rational> law(space.outcome_count(), Rational(0));
  std::vector<std::size_t> noise(n, 0);
  while (true) {
    Rational weight = 1;
    for (std::size_t i = 0; i < n; ++i) weight *= vars[i].noise[noise[i]];
    if (weight != 0) {
      std::vector<long> value(n, -1);
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t i = 0; i < n; ++i) {
          if (value[i] >= 0) continue;
          if (auto it = pinned.find(vars[i].name); it != pinned.end()) {
            value[i] = static_cast<long>(it->second);
            progress = true;
            continue;
          }
          std::size_t parent_index = 0;
          bool ready = true;
          for (const auto& p : vars[i].parents) {
            const std::size_t pos = space.position_of(p);
            if (value[pos] < 0) {
              ready = false;
              break;
            }
            parent_index = parent_index * vars[pos].cardinality + static_cast<std::size_t>(value[pos]);
          }
          if (!ready) continue;
          value[i] = static_cast<long>(vars[i].mechanism[parent_index * vars[i].noise.size() + noise[i]]);
          progress = true;
        }
      }
      std::vector<std::size_t> digits(value.begin(), value.end());
      law[space.encode(digits)] += weight;
    }
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++noise[k] < vars[k].noise.size()) break;
      noise[k] = 0;
      if (k == 0) return law;
    }
    if (n == 0) return law;
  }
}

}  // namespace oracle_support
