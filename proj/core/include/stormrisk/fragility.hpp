// Lognormal wind fragility of a distribution feeder, and the inverse-CDF
// resistance sampler that turns a failure probability into a wind threshold.
#pragma once

#include <string>

namespace stormrisk {

// Fragility parameters are fitted against gust winds in mph; the engine
// converts from the m/s wind fields exactly once, with this factor.
inline constexpr double kMphPerMs = 2.236936;

struct FragilityParams {
  double lambda = 0.0;  // mean of log gust stress, log-mph
  double beta = 0.0;    // std of log gust stress, > 0

  // exp(lambda) outside [10, 500] mph almost certainly means a unit mixup;
  // parsers reject it unless the caller opts out.
  static constexpr double kMedianSanityLoMph = 10.0;
  static constexpr double kMedianSanityHiMph = 500.0;
};

// P(feeder fails | gust wind w, in mph) = Phi[(ln w - lambda)/beta].
// Returns 0 at w = 0.
double fragility_prob(double w_mph, const FragilityParams& params);

// Inverse-transform sample of the feeder's wind resistance, in mph:
// exp(lambda + beta * Phi^-1(r)). Strictly increasing in r.
// Throws InputError(degenerate_uniform) if r is 0 or 1.
double sample_resistance(double r, const FragilityParams& params);

// One sampled resistance with its provenance, for traces and tests.
struct ResistanceSample {
  std::string feeder_id;
  double r = 0.0;               // uniform draw in (0,1)
  double resistance_mph = 0.0;  // exp(lambda + beta * Phi^-1(r))
};

ResistanceSample make_resistance_sample(std::string feeder_id, double r,
                                        const FragilityParams& params);

}  // namespace stormrisk
