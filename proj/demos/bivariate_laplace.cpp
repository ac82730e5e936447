// Draw a bivariate permanental pair and compare its empirical Laplace
// transform with the determinant formula on a few probes.
#include <cstdio>

#include "permanental/experiments.hpp"

using namespace permanental;

int main() {
  const auto k = PairKernel::from_values(1.0, 4.0, 1.5);
  const double alpha = 0.7;
  const auto b = sample_bivariate(k, alpha, 100000, default_seed);
  std::printf("%8s %8s %12s %12s %10s\n", "s1", "s2", "empirical", "exact", "z");
  for (double s1 : {0.1, 1.0, 10.0})
    for (double s2 : {0.1, 1.0, 10.0}) {
      const auto m = empirical_laplace(b, {s1, s2});
      const double exact = laplace_transform(k.matrix(), alpha, {s1, s2});
      std::printf("%8.2f %8.2f %12.6f %12.6f %10.3f\n", s1, s2, m.mean, exact, (m.mean - exact) / m.se);
    }
}
