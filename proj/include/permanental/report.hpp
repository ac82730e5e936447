#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace permanental {

// Outcome of a deterministic inequality check.
struct BoundReport {
  std::string name;
  bool pass = true;
  double worst = 0.0;      // the extreme statistic the verdict is based on
  double tolerance = 0.0;  // threshold applied to `worst`
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> failures;

  void fail(std::string why) {
    pass = false;
    failures.push_back(std::move(why));
  }

  nlohmann::json to_json() const {
    nlohmann::json v = nlohmann::json::object();
    for (const auto& [k, x] : values) v[k] = x;
    return {{"name", name}, {"pass", pass}, {"worst", worst}, {"tolerance", tolerance},
            {"values", v}, {"failures", failures}};
  }
};

}  // namespace permanental
