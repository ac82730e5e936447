// A two-state killed chain, reborn from a revival point: print the potential
// of the reborn chain and the simulated occupation times next to it.
#include <cstdio>

#include "permanental/experiments.hpp"

using namespace permanental;

int main() {
  Matrix u(2, 2);
  u << 2, 1, 1, 2;
  const std::vector<double> mu = {0.5, 0.0};
  const auto rk = rebirth_kernel(u, mu);
  const auto r = rebirth_green_experiment(u, mu, 50000, std::numeric_limits<double>::infinity(), default_seed);
  std::printf("from to  simulated    exact\n");
  for (const auto& row : r.rows) std::printf("%4.0f %2.0f %10.4f %8.4f\n", row[0], row[1], row[2], row[4]);
  std::printf("rebirth mass %.3g, u_tilde(star, star) = %.3g\n", rk.rebirth_mass, rk.u_tilde(0, 0));
}
