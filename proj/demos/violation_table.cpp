// Prints the XOR-selection CHSH bound and post-selection success probability
// for n = 1..5 pairs at a few singlet fractions. At x = 0.5 the single-pair
// bound is classical while n = 5 already violates; the price is the shrinking
// success probability.

#include <cstdio>

#include "collchsh/collchsh.hpp"

int main() {
  using namespace collchsh;

  std::printf("%3s %6s %12s %12s %10s\n", "n", "x", "bound", "success", "violates");
  for (double xv : {0.4, 0.5, 0.6, 0.8}) {
    const SingletFraction x(xv);
    for (int n = 1; n <= 5; ++n) {
      const double bound = xor_bound_closed_form(n, x);
      const double success = xor_reduced_closed_form(n, x).success_probability;
      std::printf("%3d %6.2f %12.7f %12.7f %10s\n", n, xv, bound, success,
                  bound > 2.0 ? "yes" : "no");
    }
    std::printf("\n");
  }
  return 0;
}
