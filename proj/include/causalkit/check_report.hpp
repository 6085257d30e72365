#pragma once

#include <optional>
#include <string>
#include <vector>

namespace causalkit {

/// First violating instance of a check. Outcomes and events are rendered
/// with coordinate names so reports are readable without the input files.
struct Witness {
  std::vector<std::string> subset;  // S
  std::string omega;
  std::string omega_other;  // second outcome of a fiber, when relevant
  std::string event;        // A
  std::string lhs;
  std::string rhs;

  bool operator==(const Witness&) const = default;
};

struct CheckReport {
  std::string check;
  bool passed = true;
  std::string message;
  std::optional<Witness> witness;
  std::vector<std::string> notes;
  std::vector<CheckReport> children;

  static CheckReport pass(std::string check, std::string message = {});
  static CheckReport fail(std::string check, std::string message, Witness witness);
  /// Passes iff every child passes; the message names the first failing child.
  static CheckReport all_of(std::string check, std::vector<CheckReport> children);

  /// First failing report in depth-first order (this one if it has no
  /// children), or nullptr when everything passed.
  const CheckReport* first_failure() const;

  bool operator==(const CheckReport&) const = default;
};

/// Human-readable multi-line rendering.
std::string render(const CheckReport& report);

}  // namespace causalkit
