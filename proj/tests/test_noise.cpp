#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nisim/interferometer.hpp"
#include "nisim/noise.hpp"
#include "nisim/witness.hpp"

using namespace nisim;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

CountTable flat_table(const std::vector<double>& rates) {
    CountTable table;
    table.columns = {"alpha"};
    for (std::size_t i = 0; i < rates.size(); ++i) {
        table.rows.push_back({{static_cast<double>(i)}, rates[i], std::nullopt});
    }
    return table;
}

}  // namespace

TEST_CASE("visibility is an affine contrast reduction") {
    CHECK(apply_visibility(0.37, 1.0) == doctest::Approx(0.37));
    CHECK(apply_visibility(1.0, 0.78) == doctest::Approx(0.89));
    CHECK(apply_visibility(0.2, 0.0) == doctest::Approx(0.5));
    CHECK(apply_visibility(0.9, 0.0) == doctest::Approx(0.5));
    CHECK(apply_visibility(0.5, 0.63) == doctest::Approx(0.5));  // fixed point

    // order preserving
    CHECK(apply_visibility(0.2, 0.7) < apply_visibility(0.8, 0.7));

    CHECK_THROWS(apply_visibility(0.5, 1.2));
    CHECK_THROWS(apply_visibility(-0.2, 0.9));
    CHECK_THROWS(VisibilityModel::of(-0.1));
}

TEST_CASE("witnesses scale exactly with visibility") {
    const auto [a1, a2, c1, c2] = optimal_chsh_angles();
    const CountFn mwp = rate_fn(preset_mwp());
    const CountFn rf3 = rate_fn(preset_rf3());
    for (double v : {1.0, 0.78, 0.31}) {
        const CountFn mwp_v = [mwp, v](const std::vector<double>& a) {
            return apply_visibility(mwp(a), v);
        };
        const CountFn rf3_v = [rf3, v](const std::vector<double>& a) {
            return apply_visibility(rf3(a), v);
        };
        CHECK(std::abs(chsh(mwp_v, a1, a2, c1, c2).value - v * 2.0 * kSqrt2) < 1e-10);
        CHECK(std::abs(mermin(rf3_v).value - v * 4.0) < 1e-10);
    }
}

TEST_CASE("poisson sampling basics") {
    std::mt19937_64 rng(99);
    CHECK(sample_poisson(0.0, rng) == 0);
    CHECK_THROWS(sample_poisson(-1.0, rng));

    // Small-mean direct method: empirical mean close to lambda.
    double mean = 0.0;
    constexpr int kDraws = 20000;
    for (int i = 0; i < kDraws; ++i) {
        mean += static_cast<double>(sample_poisson(3.0, rng));
    }
    mean /= kDraws;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.05));

    // Large-mean path: mean and spread of the approximating normal.
    double large_mean = 0.0;
    double large_sq = 0.0;
    constexpr int kLargeDraws = 4000;
    for (int i = 0; i < kLargeDraws; ++i) {
        const double draw = static_cast<double>(sample_poisson(1e4, rng));
        large_mean += draw;
        large_sq += draw * draw;
    }
    large_mean /= kLargeDraws;
    const double variance = large_sq / kLargeDraws - large_mean * large_mean;
    CHECK(large_mean == doctest::Approx(1e4).epsilon(0.01));
    CHECK(std::sqrt(variance) == doctest::Approx(100.0).epsilon(0.2));
}

TEST_CASE("sample_counts is deterministic and respects zero rates") {
    const CountTable rates = flat_table({1.0, 0.0, 0.25});
    const ShotConfig cfg{1e6, 1234, SamplerKind::poisson};
    const CountTable a = sample_counts(rates, cfg, 0.9);
    const CountTable b = sample_counts(rates, cfg, 0.9);

    REQUIRE(a.rows.size() == 3);
    CHECK(*a.rows[1].counts == 0);
    // within 5 sigma of the 1e6-mean row
    CHECK(std::abs(static_cast<double>(*a.rows[0].counts) - 1e6) < 5e3);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(*a.rows[i].counts == *b.rows[i].counts);
    }
    CHECK(a.meta->seed == 1234);
    CHECK(a.meta->n0 == doctest::Approx(1e6));
    CHECK(a.meta->v == doctest::Approx(0.9));

    const CountTable other = sample_counts(rates, ShotConfig{1e6, 77}, 0.9);
    CHECK(*other.rows[0].counts != *a.rows[0].counts);

    const CountTable rounded =
        sample_counts(rates, ShotConfig{100.0, 0, SamplerKind::deterministic_rounding});
    CHECK(*rounded.rows[0].counts == 100);
    CHECK(*rounded.rows[2].counts == 25);

    CHECK_THROWS(sample_counts(rates, ShotConfig{0.0, 0}));
}

TEST_CASE("sampled count functions are deterministic per seed and settings") {
    const CountFn rates = rate_fn(preset_mwp());
    const CountFn sampled = sampled_count_fn(rates, ShotConfig{1e5, 5});
    const double first = sampled({0.3, 0.4});
    CHECK(sampled({0.3, 0.4}) == first);
    CHECK(sampled_count_fn(rates, ShotConfig{1e5, 5})({0.3, 0.4}) == first);
    CHECK(sampled_count_fn(rates, ShotConfig{1e5, 6})({0.3, 0.4}) != first);
    // near-dark fringe still nonnegative
    CHECK(sampled({kPi, 0.0}) >= 0.0);
}

TEST_CASE("sampled witness converges to the visibility-scaled ideal") {
    const double v = 0.78;
    const CountFn rf3 = rate_fn(preset_rf3());
    const CountFn scaled = [rf3, v](const std::vector<double>& a) {
        return apply_visibility(rf3(a), v);
    };

    const auto factory = [&](std::uint32_t rep) {
        return sampled_count_fn(scaled, ShotConfig{1e6, mix_seed(2024, rep)});
    };
    const auto [mean, std_dev] = witness_uncertainty(factory, WitnessKind::mermin, 30);
    CHECK(std_dev < 0.02);
    CHECK(std::abs(mean - 3.12) < 5.0 * std_dev);

    CHECK_THROWS(witness_uncertainty(factory, WitnessKind::mermin, 5));
}

TEST_CASE("witness spread shrinks like the square root of the exposure") {
    const double v = 0.78;
    const CountFn mwp = rate_fn(preset_mwp());
    const CountFn scaled = [mwp, v](const std::vector<double>& a) {
        return apply_visibility(mwp(a), v);
    };
    const auto spread = [&](double n0) {
        const auto factory = [&, n0](std::uint32_t rep) {
            return sampled_count_fn(scaled, ShotConfig{n0, mix_seed(31337, rep)});
        };
        return witness_uncertainty(factory, WitnessKind::chsh, 60).second;
    };
    const double ratio = spread(1e4) / spread(4e4);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("sampled tables serialize with the metadata header") {
    CountTable table = flat_table({0.5});
    const CountTable sampled = sample_counts(table, ShotConfig{1000.0, 7}, 0.78);
    std::ostringstream csv;
    write_csv(sampled, csv);
    CHECK(csv.str().rfind("# seed=7 n0=1000 v=0.78\n", 0) == 0);
    CHECK(csv.str().find("alpha,rate,counts\n") != std::string::npos);
}
