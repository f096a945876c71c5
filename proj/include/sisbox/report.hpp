#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectral_core.hpp"

namespace sisbox {

/// A computed value together with the tolerance it was judged against.
struct Quantity {
  double value = 0;
  double tolerance = 0;
  friend bool operator==(const Quantity&, const Quantity&) = default;
};

struct Condition {
  std::string name;
  Verdict verdict = Verdict::indeterminate;
  std::map<std::string, Quantity> constants;
  std::string note;
  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Verdicts and constants of one condition suite. Overall passes iff every condition passes.
struct ConditionReport {
  std::string title;
  std::string normalization;
  std::vector<Condition> conditions;
  std::map<std::string, double> tails;
  Verdict overall = Verdict::indeterminate;

  void finalize() {
    overall = Verdict::pass;
    for (const auto& c : conditions)
      if (c.verdict != Verdict::pass) overall = Verdict::fail;
  }
  bool passed() const { return overall == Verdict::pass; }

  const Condition* find(const std::string& name) const {
    for (const auto& c : conditions)
      if (c.name == name) return &c;
    return nullptr;
  }
  double constant(const std::string& cond, const std::string& key) const {
    const auto* c = find(cond);
    if (!c) return std::numeric_limits<double>::quiet_NaN();
    auto it = c->constants.find(key);
    return it == c->constants.end() ? std::numeric_limits<double>::quiet_NaN() : it->second.value;
  }

  friend bool operator==(const ConditionReport&, const ConditionReport&) = default;
};

class ReportError : public Error {
 public:
  ReportError(const std::string& what, ConditionReport report) : Error(what), report_(std::move(report)) {}
  const ConditionReport& report() const { return report_; }

 private:
  ConditionReport report_;
};

// JSON has no inf/nan; those travel as strings.
inline nlohmann::json number_to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  return Verdict::indeterminate;
}

inline void to_json(nlohmann::json& j, const Quantity& q) {
  j = {{"value", number_to_json(q.value)}, {"tol", number_to_json(q.tolerance)}};
}
inline void from_json(const nlohmann::json& j, Quantity& q) {
  q.value = number_from_json(j.at("value"));
  q.tolerance = number_from_json(j.at("tol"));
}

inline void to_json(nlohmann::json& j, const Condition& c) {
  j = {{"name", c.name}, {"verdict", to_string(c.verdict)}, {"constants", c.constants}, {"note", c.note}};
}
inline void from_json(const nlohmann::json& j, Condition& c) {
  c.name = j.at("name").get<std::string>();
  c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  c.constants = j.at("constants").get<std::map<std::string, Quantity>>();
  c.note = j.value("note", "");
}

inline void to_json(nlohmann::json& j, const ConditionReport& r) {
  nlohmann::json tails = nlohmann::json::object();
  for (const auto& [k, v] : r.tails) tails[k] = number_to_json(v);
  j = {{"title", r.title}, {"normalization", r.normalization}, {"conditions", r.conditions},
       {"tails", tails}, {"overall", to_string(r.overall)}};
}
inline void from_json(const nlohmann::json& j, ConditionReport& r) {
  r.title = j.at("title").get<std::string>();
  r.normalization = j.value("normalization", "");
  r.conditions = j.at("conditions").get<std::vector<Condition>>();
  r.tails.clear();
  for (const auto& [k, v] : j.at("tails").items()) r.tails[k] = number_from_json(v);
  r.overall = verdict_from_string(j.at("overall").get<std::string>());
}

inline Verdict verdict_of(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

}  // namespace sisbox
