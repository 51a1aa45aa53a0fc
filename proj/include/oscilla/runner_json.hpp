#pragma once

// Criteria report serialization. Non-finite numbers become null per the
// serializer's JSON-conformant handling.

#include "common.hpp"
#include "criteria.hpp"

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace oscilla {

inline void write_criteria_json(const std::string& path,
                                const std::vector<CriterionReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json j;
    j["id"] = r.id;
    j["verdict"] = to_string(r.verdict);
    j["left"] = r.left;
    j["right"] = r.right;
    j["error_bar"] = r.error_bar;
    j["T"] = r.T;
    j["t"] = r.t;
    j["R_bar"] = r.R_bar;
    j["horizon"] = r.horizon;
    j["reciprocal_integrable"] = r.reciprocal_integrable;
    j["borderline"] = r.borderline;
    j["detail"] = r.detail;
    arr.push_back(j);
  }
  std::ofstream out(path);
  if (!out) throw error("cannot open output file " + path);
  out << arr.dump(2) << "\n";
}

}  // namespace oscilla
