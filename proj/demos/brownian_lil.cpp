// Squared Brownian motion near 0: sup_{t<=h} X(t) / (h loglog 1/h) along a
// dyadic ladder, averaged over a handful of paths.
#include <cstdio>

#include "permanental/run.hpp"

using namespace permanental;

int main() {
  auto cfg = preset("lil-bm");
  cfg["n_rep"] = 50;
  const auto out = run_config(cfg);
  const auto& r = out.report;
  for (const auto& c : r.columns) std::printf("%22s", c.c_str());
  std::printf("\n");
  for (const auto& row : r.rows) {
    for (double x : row) std::printf("%22.6g", x);
    std::printf("\n");
  }
  for (const auto& v : r.verdicts) std::printf("%s %s %.4g\n", v.pass ? "PASS" : "FAIL", v.criterion.c_str(), v.observed);
}
