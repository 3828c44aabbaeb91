#ifndef GABDEN_REPORT_HPP
#define GABDEN_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gabden {

using Json = nlohmann::ordered_json;

enum class Relation { at_most, at_least };
enum class Verdict { pass, fail, hypothesis_failure };

std::string to_string(Verdict v);

/// One inequality "measured <= bound" (or >=), accepted with slack >= -tolerance.
struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::at_most;
  double tolerance = 0.0;

  double slack() const { return relation == Relation::at_most ? bound - measured : measured - bound; }
  bool ok() const;
};

/// Outcome of a lemma/theorem check with everything needed to reproduce it.
class VerificationReport {
 public:
  explicit VerificationReport(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }

  void set_input(const std::string& key, Json value) { inputs_[key] = std::move(value); }
  void add_check(std::string name, double measured, double bound, Relation relation, double tolerance = 0.0);
  void add_measurement(std::string name, double value) { measurements_.emplace_back(std::move(name), value); }
  void add_constant(std::string name, double value) { constants_.emplace_back(std::move(name), value); }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  /// Marks the case as not meeting its hypothesis; checks are no longer meaningful.
  void fail_hypothesis(std::string reason);

  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<std::pair<std::string, double>>& measurements() const { return measurements_; }
  const std::vector<std::pair<std::string, double>>& constants() const { return constants_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const Json& inputs() const { return inputs_; }

  /// Measurement or constant by name; throws std::out_of_range.
  double measurement(const std::string& name) const;
  double constant(const std::string& name) const;
  const Check& check(const std::string& name) const;

  bool hypothesis_failed() const { return !hypothesis_failure_.empty(); }
  const std::string& hypothesis_failure() const { return hypothesis_failure_; }
  bool pass() const;
  /// Smallest slack over all checks (+inf when there are none).
  double margin() const;
  Verdict verdict() const;

  Json to_json() const;

 private:
  std::string name_;
  Json inputs_ = Json::object();
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, double>> measurements_;
  std::vector<std::pair<std::string, double>> constants_;
  std::vector<std::string> warnings_;
  std::string hypothesis_failure_;
};

}  // namespace gabden

#endif  // GABDEN_REPORT_HPP
