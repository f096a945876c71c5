#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "report.hpp"

namespace sisbox {

inline constexpr int kReportSchema = 1;

/// Everything one CLI command reports.
struct ReportDocument {
  std::vector<std::string> command;
  Settings settings;
  int n_max = 60;
  std::vector<ConditionReport> reports;
  std::map<std::string, Quantity> values;
  std::map<std::string, double> tails;
  std::vector<std::string> outputs;
  Quantity timing{0.0, std::numeric_limits<double>::infinity()};
  Verdict overall = Verdict::indeterminate;

  void finalize() {
    overall = reports.empty() ? Verdict::indeterminate : Verdict::pass;
    for (const auto& r : reports) {
      if (r.overall != Verdict::pass) overall = Verdict::fail;
      for (const auto& [k, v] : r.tails) tails[r.title + "." + k] = v;
    }
  }

  friend bool operator==(const ReportDocument& a, const ReportDocument& b) {
    return a.command == b.command && a.settings.grid == b.settings.grid && a.settings.eps == b.settings.eps &&
           a.settings.k_max == b.settings.k_max && a.settings.quad_order == b.settings.quad_order &&
           a.settings.seed == b.settings.seed && a.n_max == b.n_max && a.reports == b.reports && a.values == b.values &&
           a.tails == b.tails && a.outputs == b.outputs && a.timing == b.timing && a.overall == b.overall;
  }
};

inline void to_json(nlohmann::json& j, const ReportDocument& d) {
  nlohmann::json tails = nlohmann::json::object();
  for (const auto& [k, v] : d.tails) tails[k] = number_to_json(v);
  j = {{"schema", kReportSchema},
       {"command", d.command},
       {"grid",
        {{"K", d.settings.grid.K},
         {"N", d.settings.grid.N},
         {"eps", d.settings.eps},
         {"k_max", d.settings.k_max},
         {"quad_order", d.settings.quad_order},
         {"seed", d.settings.seed},
         {"n_max", d.n_max}}},
       {"reports", d.reports},
       {"values", d.values},
       {"tails", tails},
       {"outputs", d.outputs},
       {"timing_s", d.timing},
       {"overall", to_string(d.overall)}};
}

inline void from_json(const nlohmann::json& j, ReportDocument& d) {
  if (j.at("schema").get<int>() != kReportSchema) throw ParseError("unsupported report schema", 0);
  d.command = j.at("command").get<std::vector<std::string>>();
  const auto& g = j.at("grid");
  d.settings.grid = {g.at("K").get<int>(), g.at("N").get<int>()};
  d.settings.eps = g.at("eps").get<double>();
  d.settings.k_max = g.at("k_max").get<int>();
  d.settings.quad_order = g.at("quad_order").get<int>();
  d.settings.seed = g.at("seed").get<std::uint64_t>();
  d.n_max = g.at("n_max").get<int>();
  d.reports = j.at("reports").get<std::vector<ConditionReport>>();
  d.values = j.at("values").get<std::map<std::string, Quantity>>();
  d.tails.clear();
  for (const auto& [k, v] : j.at("tails").items()) d.tails[k] = number_from_json(v);
  d.outputs = j.at("outputs").get<std::vector<std::string>>();
  d.timing = j.at("timing_s").get<Quantity>();
  d.overall = verdict_from_string(j.at("overall").get<std::string>());
}

}  // namespace sisbox
