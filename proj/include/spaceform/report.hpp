#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace spaceform {

/// Structured pass/fail outcome of one verification check.
struct VerificationReport {
  std::string check;
  bool pass = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::map<std::string, double> values;
  std::vector<std::string> notes;
};

inline void to_json(nlohmann::json& j, const VerificationReport& r) {
  j = nlohmann::json{{"check", r.check},
                     {"pass", r.pass},
                     {"max_residual", r.max_residual},
                     {"tolerance", r.tolerance},
                     {"values", r.values},
                     {"notes", r.notes}};
}

}  // namespace spaceform
