#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "liqflow/errors.hpp"
#include "liqflow/tick_stream.hpp"

// Seed-deterministic synthetic tick scenarios for tests, the acceptance
// suite and the CLI. Prices live on the tick grid; volumes are integral.
//
//   ConstantRate  fixed price, fixed volume per tick
//   RegimeSwitch  alternating low/high trade rate with matching price drift
//                 (liquidity deficit and excess in every cycle)
//   TrendBurst    steady bear leg, then a volatile bull leg with volume
//                 bursts
//   PriceOnly     unit volume, symmetric tick-grid random walk

namespace liqflow {

enum class Scenario { ConstantRate, RegimeSwitch, TrendBurst, PriceOnly };

struct SynthConfig {
  Scenario scenario = Scenario::ConstantRate;
  std::uint64_t seed = 1;
  double duration_s = 3600.0;
  double tick_dt_s = 0.25;
  double price0 = 100.0;
  double tick_size = 0.01;
  double rate = 200.0;            // shares per second, base / low regime
  double rate_high = 1600.0;      // high regime and burst rate
  double regime_period_s = 512.0; // full low+high cycle
  std::int64_t t0_ns = 0;
};

namespace detail {

// Uniform [0, 1) from the raw engine stream; independent of the standard
// library's distribution implementations so files are reproducible.
inline double next_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline std::vector<Tick> synthesize(const SynthConfig& config) {
  if (!(config.tick_dt_s > 0.0)) throw error("synthesize: tick_dt_s must be positive");
  std::vector<Tick> ticks;
  if (config.duration_s <= 0.0) return ticks;
  std::mt19937_64 gen(config.seed);
  const auto count = static_cast<std::size_t>(config.duration_s / config.tick_dt_s);
  ticks.reserve(count);

  std::int64_t price_ticks =
      std::max<std::int64_t>(1, std::llround(config.price0 / config.tick_size));
  const auto base_volume = static_cast<std::uint64_t>(
      std::max(1.0, std::round(config.rate * config.tick_dt_s)));
  const auto high_volume = static_cast<std::uint64_t>(
      std::max(1.0, std::round(config.rate_high * config.tick_dt_s)));

  // One ±step tick-grid walk with per-leg drift probabilities.
  auto walk = [&](double p_up, double p_down, std::int64_t max_step) {
    const double u = detail::next_uniform(gen);
    std::int64_t step = 0;
    if (u < p_up)
      step = 1;
    else if (u < p_up + p_down)
      step = -1;
    if (step != 0 && max_step > 1)
      step *= 1 + static_cast<std::int64_t>(detail::next_uniform(gen) *
                                            static_cast<double>(max_step));
    price_ticks = std::max<std::int64_t>(1, price_ticks + step);
  };

  for (std::size_t i = 0; i < count; ++i) {
    const double t_s = static_cast<double>(i) * config.tick_dt_s;
    std::uint64_t volume = base_volume;
    switch (config.scenario) {
      case Scenario::ConstantRate:
        break;
      case Scenario::RegimeSwitch: {
        const double phase = std::fmod(t_s, config.regime_period_s);
        const bool high = phase >= 0.5 * config.regime_period_s;
        volume = high ? high_volume : base_volume;
        if (high)
          walk(0.34, 0.26, 1);
        else
          walk(0.26, 0.34, 1);
        break;
      }
      case Scenario::TrendBurst: {
        const bool bull = t_s >= 0.5 * config.duration_s;
        if (bull) {
          walk(0.42, 0.28, 3);
          if (detail::next_uniform(gen) < 0.05)
            volume = high_volume +
                     static_cast<std::uint64_t>(detail::next_uniform(gen) *
                                                static_cast<double>(3 * high_volume));
        } else {
          walk(0.25, 0.40, 1);
        }
        break;
      }
      case Scenario::PriceOnly:
        volume = 1;
        walk(0.30, 0.30, 1);
        break;
    }
    ticks.push_back(Tick{
        config.t0_ns + static_cast<std::int64_t>(std::llround(t_s * 1e9)),
        static_cast<double>(price_ticks) * config.tick_size, volume});
  }
  return ticks;
}

}  // namespace liqflow
