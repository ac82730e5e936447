#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permanental/errors.hpp"

namespace permanental {

struct CalibrationEntry {
  double alpha;
  double c_alpha;
  double max_ratio;  // sup of empirical tail / shape before the safety factor
};

struct CalibrationTable {
  std::string version;
  std::uint64_t seed = 0;
  std::size_t n_rep = 0;
  double safety = 1.5;
  std::vector<double> ratio_grid;  // gamma / sqrt(ab)
  std::vector<double> a_grid;      // a with b = 1
  std::vector<double> lambda_grid;
  std::string generated_at;
  std::vector<CalibrationEntry> entries;

  nlohmann::json to_json() const {
    nlohmann::json e = nlohmann::json::array();
    for (const auto& x : entries) e.push_back({{"alpha", x.alpha}, {"C_alpha", x.c_alpha}, {"max_ratio", x.max_ratio}});
    return {{"version", version},
            {"seed", seed},
            {"n_rep", n_rep},
            {"safety", safety},
            {"family_grid", {{"gamma_over_sqrt_ab", ratio_grid}, {"a_over_b", a_grid}, {"lambda", lambda_grid}}},
            {"generated_at", generated_at},
            {"entries", e}};
  }
};

inline std::vector<double> calibration_lambda_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i) g.push_back((10.0 + i) / 10.0);
  return g;
}

// Generated by `permanental calibrate --preset calibrate-table`; mirrored in
// data/calibration_table.json.
inline const CalibrationTable& shipped_calibration() {
  static const CalibrationTable t = [] {
    CalibrationTable c;
    c.version = "1";
    c.seed = 0x5eedca1bULL;
    c.n_rep = 1000000;
    c.safety = 1.5;
    c.ratio_grid = {0.0, 0.25, 0.5, 0.9, 0.99};
    c.a_grid = {1.0, 4.0, 100.0};
    c.lambda_grid = calibration_lambda_grid();
    c.generated_at = "2026-10-15";
    c.entries = {
        {0.5, 0.6429769471400456, 0.4286512980933637},
        {0.7, 0.9748261518992403, 0.6498841012661601},
        {1.0, 1.4991990262999604, 0.999466017533307},
        {1.3, 2.012526162490738, 1.3416841083271587},
    };
    return c;
  }();
  return t;
}

inline double calibrated_c_alpha(double alpha) {
  for (const auto& e : shipped_calibration().entries)
    if (std::fabs(e.alpha - alpha) < 1e-12) {
      if (!std::isfinite(e.c_alpha)) throw capability_error("calibration table entry is not populated");
      return e.c_alpha;
    }
  throw capability_error("no calibrated C_alpha for alpha=" + std::to_string(alpha) +
                         "; pass the constant explicitly or run `permanental calibrate`");
}

}  // namespace permanental
