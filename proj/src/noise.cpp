#include "nisim/noise.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace nisim {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double uniform_open01(std::mt19937_64& rng) {
    // 53-bit mantissa in (0, 1]; safe under log().
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

double standard_normal(std::mt19937_64& rng) {
    const double u1 = uniform_open01(rng);
    const double u2 = uniform_open01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace

VisibilityModel VisibilityModel::of(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("visibility must lie in [0, 1]");
    }
    return VisibilityModel{v};
}

double apply_visibility(double rate, double v) {
    VisibilityModel::of(v);
    if (!(rate >= -1e-12 && rate <= 1.0 + 1e-12)) {
        throw std::invalid_argument("rate must lie in [0, 1]");
    }
    return v * rate + (1.0 - v) / 2.0;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t sample_poisson(double mean, std::mt19937_64& rng) {
    if (!(mean >= 0.0)) {
        throw std::invalid_argument("poisson mean must be nonnegative");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean <= 16.0) {
        const double target = std::exp(-mean);
        std::uint64_t k = 0;
        double product = uniform_open01(rng);
        while (product > target) {
            product *= uniform_open01(rng);
            ++k;
        }
        return k;
    }
    const double draw = mean + std::sqrt(mean) * standard_normal(rng);
    return draw <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(draw));
}

CountTable sample_counts(const CountTable& rates, const ShotConfig& cfg, double visibility) {
    if (!(cfg.n0 > 0.0)) {
        throw std::invalid_argument("shot config needs n0 > 0");
    }
    CountTable sampled = rates;
    sampled.meta = TableMeta{cfg.seed, cfg.n0, visibility};
    for (std::size_t i = 0; i < sampled.rows.size(); ++i) {
        auto& row = sampled.rows[i];
        const double mean = std::max(0.0, cfg.n0 * row.rate);
        if (cfg.sampler == SamplerKind::deterministic_rounding) {
            row.counts = static_cast<std::uint64_t>(std::llround(mean));
        } else {
            std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(i)));
            row.counts = sample_poisson(mean, rng);
        }
    }
    return sampled;
}

CountFn sampled_count_fn(CountFn rate_fn, const ShotConfig& cfg) {
    if (!(cfg.n0 > 0.0)) {
        throw std::invalid_argument("shot config needs n0 > 0");
    }
    return [rate_fn = std::move(rate_fn), cfg](const std::vector<double>& angles) {
        const double mean = std::max(0.0, cfg.n0 * rate_fn(angles));
        if (cfg.sampler == SamplerKind::deterministic_rounding) {
            return static_cast<double>(std::llround(mean));
        }
        std::uint64_t salt = 0x6a09e667f3bcc909ull;
        for (double angle : angles) {
            salt = mix_seed(salt, std::bit_cast<std::uint64_t>(angle));
        }
        std::mt19937_64 rng(mix_seed(cfg.seed, salt));
        return static_cast<double>(sample_poisson(mean, rng));
    };
}

std::pair<double, double> witness_uncertainty(
    const std::function<CountFn(std::uint32_t)>& resample, WitnessKind kind,
    int repetitions) {
    if (repetitions < 10) {
        throw std::invalid_argument("witness uncertainty needs at least 10 repetitions");
    }
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(repetitions));
    const auto [a1, a2, c1, c2] = optimal_chsh_angles();
    for (int rep = 0; rep < repetitions; ++rep) {
        const CountFn counts = resample(static_cast<std::uint32_t>(rep));
        switch (kind) {
            case WitnessKind::chsh:
                values.push_back(chsh(counts, a1, a2, c1, c2).value);
                break;
            case WitnessKind::mermin:
                values.push_back(mermin(counts).value);
                break;
            case WitnessKind::custom:
                throw std::invalid_argument("witness uncertainty needs chsh or mermin");
        }
    }
    double mean = 0.0;
    for (double value : values) {
        mean += value;
    }
    mean /= static_cast<double>(values.size());
    double variance = 0.0;
    for (double value : values) {
        variance += (value - mean) * (value - mean);
    }
    variance /= static_cast<double>(values.size() - 1);
    return {mean, std::sqrt(variance)};
}

}  // namespace nisim
