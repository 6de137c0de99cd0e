#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "nisim/table.hpp"
#include "nisim/witness.hpp"

namespace nisim {

/// Single scalar fringe-contrast factor (the polarizer/analyzer product).
struct VisibilityModel {
    double v = 1.0;

    static VisibilityModel of(double v);
};

enum class SamplerKind { poisson, deterministic_rounding };

struct ShotConfig {
    /// Expected counts at the fringe maximum.
    double n0 = 1e6;
    std::uint64_t seed = 0;
    SamplerKind sampler = SamplerKind::poisson;
};

/// Contrast reduction of an ideal relative rate: v*rate + (1-v)/2.
double apply_visibility(double rate, double v);

/// splitmix64 step, used to derive independent per-row / per-repetition
/// seeds from one recorded master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Poisson draw from the named portable generator (mt19937_64): Knuth's
/// direct product method for small means, a rounded normal approximation
/// via Box-Muller above mean 16. Deterministic across platforms.
std::uint64_t sample_poisson(double mean, std::mt19937_64& rng);

/// Independent draws with mean n0*rate per row, deterministic per
/// (seed, row index). `visibility` is recorded in the output metadata and
/// is NOT applied here; scale the rates first.
CountTable sample_counts(const CountTable& rates, const ShotConfig& cfg,
                         double visibility = 1.0);

/// Shot-noise-sampled counts as a count function: each angle tuple gets a
/// Poisson draw with mean n0 * rate, deterministic per (seed, angles).
CountFn sampled_count_fn(CountFn rate_fn, const ShotConfig& cfg);

/// Empirical (mean, std) of a witness over independent resamples. The
/// factory must hand out an independently seeded count function per
/// repetition index. Needs repetitions >= 10.
std::pair<double, double> witness_uncertainty(
    const std::function<CountFn(std::uint32_t)>& resample, WitnessKind kind,
    int repetitions);

}  // namespace nisim
