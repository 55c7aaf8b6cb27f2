// Counter-based random streams (Philox4x32-10, Salmon et al. SC'11).
//
// Every uniform draw in the simulator is a pure function of
// (master_seed, run, feeder, step), so results are independent of thread
// count and of how many draws other feeders consumed. Resistance draws use a
// reserved step tag, which makes them invariant under time-axis refinement.
#pragma once

#include <array>
#include <cstdint>

namespace stormrisk {

namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t ctr_lo,
                                          std::uint64_t ctr_hi) {
  std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
  std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
  std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c0, hi0, lo0);
    mulhilo(kM1, c2, hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    if (round < 9) {
      k0 += kW0;
      k1 += kW1;
    }
  }
  return {c0, c1, c2, c3};
}

inline std::uint64_t u64(std::uint64_t key, std::uint64_t ctr_lo, std::uint64_t ctr_hi) {
  const auto b = block(key, ctr_lo, ctr_hi);
  return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

// Uniform on the open interval (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t key, std::uint64_t ctr_lo, std::uint64_t ctr_hi) {
  return (static_cast<double>(u64(key, ctr_lo, ctr_hi) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace philox

// Step tags partition the counter space so draw domains never collide.
// SMC step draws occupy [0, 2^31); everything else uses reserved tags.
inline constexpr std::uint32_t kStepTagResistance = 0xFFFFFFFFu;
inline constexpr std::uint32_t kStepTagSynth = 0xFFFFFFFEu;

// SMC status draw for feeder `feeder` at simulation step `step` of run `run`.
inline double uniform_step_draw(std::uint64_t seed, std::uint64_t run, std::uint32_t feeder,
                                std::uint32_t step) {
  const std::uint64_t ctr_hi = (static_cast<std::uint64_t>(feeder) << 32) | step;
  return philox::uniform01(seed, run, ctr_hi);
}

// Per-run resistance draw for feeder `feeder`; independent of the time axis.
inline double uniform_resistance_draw(std::uint64_t seed, std::uint64_t run,
                                      std::uint32_t feeder) {
  return uniform_step_draw(seed, run, feeder, kStepTagResistance);
}

// Stateful convenience stream for fixture synthesis. Draw k of stream s under
// seed is philox(seed, k, (s << 32) | kStepTagSynth): reproducible and
// disjoint from all simulation draws.
class SynthRng {
public:
  SynthRng(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() {
    const std::uint64_t ctr_hi = (static_cast<std::uint64_t>(stream_) << 32) | kStepTagSynth;
    return philox::u64(seed_, counter_++, ctr_hi);
  }
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::uint64_t uniform_int(std::uint64_t n) { return next_u64() % n; }

private:
  std::uint64_t seed_;
  std::uint32_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace stormrisk
