// Inflation curve of the default anchoring balloon with its pressure cap, then
// the symmetric/asymmetric branches of a pair of balloons sharing one supply.

#include <mscr/balloon.hpp>

#include <cstdio>

int main() {
  using namespace mscr::balloon;

  BalloonSpec spec;
  spec.burst = BurstStats{80e3, 2e3};
  const SafeRange safe = safe_range(spec, 1.5);
  std::printf("safe pressure %.1f kPa (reached at lambda_in %.3f)\n", safe.p_max_safe / 1e3, safe.lambda_at_p_max);
  std::printf("model cap %.1f kPa at lambda_in %.3f, limit point %s\n\n", safe.limit_pressure / 1e3,
              safe.limit_lambda, safe.has_limit_point ? "yes" : "no");

  std::printf("%9s %9s %10s %12s\n", "lambda_in", "lambda_ex", "dp kPa", "f_ex mN");
  for (double l = 1.0; l <= 3.0 + 1e-9; l += 0.25) {
    const InflationState s = inflate(spec, l);
    std::printf("%9.2f %9.3f %10.2f %12.4f\n", l, s.lambda_ex, s.delta_p / 1e3, s.f_ex * 1e3);
  }

  for (double k : {20.0, 60.0}) {
    const PairEquilibria eq = two_balloon_equilibria(k);
    std::printf("\nK = %.0f: ", k);
    if (!eq.has_bifurcation) {
      std::printf("pressure rises monotonically, both balloons inflate together\n");
      continue;
    }
    std::printf("peak at lambda %.3f (p %.3f), valley at %.3f, %zu asymmetric states\n", eq.lambda_star, eq.p_cr,
                eq.lambda_valley, eq.asymmetric.size());
  }
  return 0;
}
