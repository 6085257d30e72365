#include "causalkit/check_report.hpp"

#include <sstream>

namespace causalkit {

CheckReport CheckReport::pass(std::string check, std::string message) {
  CheckReport r;
  r.check = std::move(check);
  r.passed = true;
  r.message = std::move(message);
  return r;
}

CheckReport CheckReport::fail(std::string check, std::string message, Witness witness) {
  CheckReport r;
  r.check = std::move(check);
  r.passed = false;
  r.message = std::move(message);
  r.witness = std::move(witness);
  return r;
}

CheckReport CheckReport::all_of(std::string check, std::vector<CheckReport> children) {
  CheckReport r;
  r.check = std::move(check);
  r.children = std::move(children);
  r.passed = true;
  for (const auto& c : r.children) {
    if (!c.passed) {
      r.passed = false;
      r.message = "failed: " + c.check;
      break;
    }
  }
  if (r.passed) {
    r.message = "all checks passed";
  }
  return r;
}

const CheckReport* CheckReport::first_failure() const {
  if (passed) {
    return nullptr;
  }
  for (const auto& c : children) {
    if (const auto* f = c.first_failure()) {
      return f;
    }
  }
  return this;
}

namespace {

void render_into(std::ostringstream& os, const CheckReport& r, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  os << indent << (r.passed ? "[PASS] " : "[FAIL] ") << r.check;
  if (!r.message.empty()) {
    os << ": " << r.message;
  }
  os << '\n';
  if (r.witness) {
    const auto& w = *r.witness;
    os << indent << "  witness:";
    if (!w.subset.empty() || !w.omega.empty()) {
      os << " S={";
      for (std::size_t i = 0; i < w.subset.size(); ++i) {
        os << (i ? "," : "") << w.subset[i];
      }
      os << '}';
    }
    if (!w.omega.empty()) os << " omega=" << w.omega;
    if (!w.omega_other.empty()) os << " omega'=" << w.omega_other;
    if (!w.event.empty()) os << " A=" << w.event;
    if (!w.lhs.empty() || !w.rhs.empty()) os << " lhs=" << w.lhs << " rhs=" << w.rhs;
    os << '\n';
  }
  for (const auto& n : r.notes) {
    os << indent << "  note: " << n << '\n';
  }
  for (const auto& c : r.children) {
    render_into(os, c, depth + 1);
  }
}

}  // namespace

std::string render(const CheckReport& report) {
  std::ostringstream os;
  render_into(os, report, 0);
  return os.str();
}

}  // namespace causalkit
