#include "stormrisk/fragility.hpp"

#include <cmath>

#include "stormrisk/errors.hpp"
#include "stormrisk/mathstat.hpp"

namespace stormrisk {

double fragility_prob(double w_mph, const FragilityParams& params) {
  if (w_mph <= 0.0) return 0.0;
  return norm_cdf((std::log(w_mph) - params.lambda) / params.beta);
}

double sample_resistance(double r, const FragilityParams& params) {
  if (!(r > 0.0 && r < 1.0))
    throw InputError(Errc::degenerate_uniform, "uniform draw must lie strictly in (0,1)");
  return std::exp(params.lambda + params.beta * norm_ppf(r));
}

ResistanceSample make_resistance_sample(std::string feeder_id, double r,
                                        const FragilityParams& params) {
  return {std::move(feeder_id), r, sample_resistance(r, params)};
}

}  // namespace stormrisk
