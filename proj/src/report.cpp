#include "gabden/report.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gabden {

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::hypothesis_failure: return "hypothesis_failure";
  }
  return "unknown";
}

bool Check::ok() const { return std::isfinite(measured) && slack() >= -tolerance; }

void VerificationReport::add_check(std::string name, double measured, double bound, Relation relation,
                                   double tolerance) {
  checks_.push_back(Check{std::move(name), measured, bound, relation, tolerance});
}

void VerificationReport::fail_hypothesis(std::string reason) {
  if (hypothesis_failure_.empty()) hypothesis_failure_ = std::move(reason);
}

double VerificationReport::measurement(const std::string& name) const {
  for (const auto& [k, v] : measurements_) {
    if (k == name) return v;
  }
  throw std::out_of_range("no measurement '" + name + "' in report " + name_);
}

double VerificationReport::constant(const std::string& name) const {
  for (const auto& [k, v] : constants_) {
    if (k == name) return v;
  }
  throw std::out_of_range("no constant '" + name + "' in report " + name_);
}

const Check& VerificationReport::check(const std::string& name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no check '" + name + "' in report " + name_);
}

bool VerificationReport::pass() const {
  if (hypothesis_failed()) return false;
  for (const auto& c : checks_) {
    if (!c.ok()) return false;
  }
  return true;
}

double VerificationReport::margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : checks_) m = std::min(m, c.slack());
  return m;
}

Verdict VerificationReport::verdict() const {
  if (hypothesis_failed()) return Verdict::hypothesis_failure;
  return pass() ? Verdict::pass : Verdict::fail;
}

Json VerificationReport::to_json() const {
  Json out;
  out["name"] = name_;
  out["verdict"] = to_string(verdict());
  out["pass"] = pass();
  out["margin"] = number(margin());
  if (hypothesis_failed()) out["hypothesis_failure"] = hypothesis_failure_;
  out["inputs"] = inputs_;

  Json measured = Json::object();
  Json bound = Json::object();
  Json checks = Json::array();
  for (const auto& c : checks_) {
    measured[c.name] = number(c.measured);
    bound[c.name] = number(c.bound);
    checks.push_back({{"name", c.name},
                      {"measured", number(c.measured)},
                      {"bound", number(c.bound)},
                      {"relation", c.relation == Relation::at_most ? "<=" : ">="},
                      {"tolerance", c.tolerance},
                      {"slack", number(c.slack())},
                      {"ok", c.ok()}});
  }
  for (const auto& [k, v] : measurements_) measured[k] = number(v);
  out["measured"] = measured;
  out["bound"] = bound;
  out["checks"] = checks;

  Json constants = Json::object();
  for (const auto& [k, v] : constants_) constants[k] = number(v);
  out["constants"] = constants;
  out["warnings"] = warnings_;
  return out;
}

}  // namespace gabden
