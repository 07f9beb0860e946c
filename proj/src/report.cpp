#include "ghzsim/report.hpp"

#include <cmath>
#include <limits>

namespace ghzsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

nlohmann::ordered_json state_report_to_json(const StateReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["P"] = report.populations.value;
  j["P_err"] = report.populations.std_error;
  j["C"] = report.coherence.value;
  j["C_err"] = report.coherence.std_error;
  j["F"] = report.fidelity.value;
  j["F_err"] = report.fidelity.std_error;
  j["criteria"] = nlohmann::ordered_json::array();
  for (const auto& c : report.criteria) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["statistic"] = c.statistic;
    jc["threshold"] = c.threshold;
    jc["margin"] = c.margin;
    if (std::isfinite(c.sigma_confidence)) {
      jc["sigma"] = c.sigma_confidence;
    } else {
      jc["sigma"] = nullptr;  // exact statistic, infinite confidence
    }
    jc["passed"] = c.passed;
    j["criteria"].push_back(std::move(jc));
  }
  return j;
}

StateReport state_report_from_json(const nlohmann::json& j) {
  StateReport report;
  report.n = j.at("n").get<int>();
  report.populations = Estimate{j.at("P").get<double>(), j.at("P_err").get<double>(), 0};
  report.coherence = Estimate{j.at("C").get<double>(), j.at("C_err").get<double>(), 0};
  report.fidelity = Estimate{j.at("F").get<double>(), j.at("F_err").get<double>(), 0};
  for (const auto& jc : j.at("criteria")) {
    CriterionResult c;
    c.name = jc.at("name").get<std::string>();
    c.statistic = jc.at("statistic").get<double>();
    c.threshold = jc.at("threshold").get<double>();
    c.margin = jc.at("margin").get<double>();
    if (jc.at("sigma").is_null()) {
      c.exact = true;
      c.sigma_confidence = c.margin > 0.0 ? kInf : -kInf;
    } else {
      c.sigma_confidence = jc.at("sigma").get<double>();
    }
    c.passed = jc.at("passed").get<bool>();
    report.criteria.push_back(std::move(c));
  }
  return report;
}

namespace {

bool estimates_equal(const Estimate& a, const Estimate& b) {
  return a.value == b.value && a.std_error == b.std_error;
}

}  // namespace

bool operator==(const StateReport& a, const StateReport& b) {
  if (a.n != b.n || !estimates_equal(a.populations, b.populations) ||
      !estimates_equal(a.coherence, b.coherence) || !estimates_equal(a.fidelity, b.fidelity) ||
      a.criteria.size() != b.criteria.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.criteria.size(); ++i) {
    const auto& ca = a.criteria[i];
    const auto& cb = b.criteria[i];
    const bool sigma_equal = (ca.sigma_confidence == cb.sigma_confidence) ||
                             (std::isinf(ca.sigma_confidence) && std::isinf(cb.sigma_confidence) &&
                              std::signbit(ca.sigma_confidence) == std::signbit(cb.sigma_confidence));
    if (ca.name != cb.name || ca.statistic != cb.statistic || ca.threshold != cb.threshold ||
        ca.margin != cb.margin || !sigma_equal || ca.passed != cb.passed ||
        ca.exact != cb.exact) {
      return false;
    }
  }
  return true;
}

}  // namespace ghzsim
