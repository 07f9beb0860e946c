#pragma once

// Machine-readable per-state report: the JSON object emitted for every
// analyzed state, plus lossless (de)serialization. Exact criteria carry a
// null sigma in JSON and round-trip back to the infinite sigma_confidence.

#include <string>
#include <vector>

#include "json.hpp"

#include "ghzsim/estimation.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct StateReport {
  int n = 0;
  Estimate populations;
  Estimate coherence;
  Estimate fidelity;
  std::vector<CriterionResult> criteria;
};

nlohmann::ordered_json state_report_to_json(const StateReport& report);
StateReport state_report_from_json(const nlohmann::json& j);

bool operator==(const StateReport& a, const StateReport& b);

}  // namespace ghzsim
