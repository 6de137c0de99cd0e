#include "nisim/witness.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "nisim/interferometer.hpp"
#include "nisim/table.hpp"

namespace nisim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace

std::string to_string(WitnessKind kind) {
    switch (kind) {
        case WitnessKind::chsh: return "chsh";
        case WitnessKind::mermin: return "mermin";
        case WitnessKind::custom: return "custom";
    }
    return "custom";
}

std::string to_string(BoundClass classification) {
    switch (classification) {
        case BoundClass::within_classical: return "within-classical";
        case BoundClass::violates_classical: return "violates-classical";
        case BoundClass::violates_quantum: return "violates-quantum(error)";
    }
    return "within-classical";
}

std::string witness_record_header() {
    return "kind,value,uncertainty,classical_bound,quantum_bound,classification";
}

std::string witness_record_row(const WitnessResult& result) {
    std::string row = to_string(result.kind);
    row += ',' + format_number(result.value);
    row += ',';
    if (result.uncertainty) {
        row += format_number(*result.uncertainty);
    }
    row += ',' + format_number(result.classical_bound);
    row += ',' + format_number(result.quantum_bound);
    row += ',' + to_string(result.classification);
    return row;
}

double context_expectation(const CountFn& counts, const std::vector<double>& base_angles) {
    const std::size_t n = base_angles.size();
    if (n < 2) {
        throw std::invalid_argument("context expectation needs at least two angles");
    }
    double signed_sum = 0.0;
    double total = 0.0;
    double scale = 0.0;
    std::vector<double> angles(n);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        for (std::size_t l = 0; l < n; ++l) {
            angles[l] = base_angles[l] + ((mask >> l) & 1u ? kPi : 0.0);
        }
        const double count = counts(angles);
        const bool odd = (std::popcount(mask) & 1) != 0;
        signed_sum += odd ? -count : count;
        total += count;
        scale += std::abs(count);
    }
    if (total < 1e-12 * std::max(scale, 1.0)) {
        throw std::runtime_error("context expectation denominator vanished");
    }
    return signed_sum / total;
}

BoundClass classify(double value, double classical_bound, double quantum_bound,
                    std::optional<double> uncertainty) {
    const double slack = uncertainty.value_or(0.0);
    if (std::abs(value) > quantum_bound + std::max(slack, 1e-9)) {
        return BoundClass::violates_quantum;
    }
    if (std::abs(value) > classical_bound + slack) {
        return BoundClass::violates_classical;
    }
    return BoundClass::within_classical;
}

WitnessResult chsh(const CountFn& counts, double alpha1, double alpha2, double chi1,
                   double chi2, double visibility, std::optional<double> uncertainty) {
    const double value = context_expectation(counts, {alpha1, chi1}) +
                         context_expectation(counts, {alpha1, chi2}) +
                         context_expectation(counts, {alpha2, chi1}) -
                         context_expectation(counts, {alpha2, chi2});
    WitnessResult result;
    result.kind = WitnessKind::chsh;
    result.value = value;
    result.classical_bound = 2.0 * visibility;
    result.quantum_bound = 2.0 * kSqrt2 * visibility;
    result.uncertainty = uncertainty;
    result.classification =
        classify(value, result.classical_bound, result.quantum_bound, uncertainty);
    return result;
}

std::array<double, 4> optimal_chsh_angles() {
    return {0.0, kPi / 2.0, -kPi / 4.0, kPi / 4.0};
}

WitnessResult mermin(const CountFn& counts, double visibility,
                     std::optional<double> uncertainty) {
    const double x = kMerminAngleX;
    const double y = kMerminAngleY;
    const double value = context_expectation(counts, {x, x, x}) -
                         context_expectation(counts, {x, y, y}) -
                         context_expectation(counts, {y, x, y}) -
                         context_expectation(counts, {y, y, x});
    WitnessResult result;
    result.kind = WitnessKind::mermin;
    result.value = value;
    result.classical_bound = 2.0 * visibility;
    result.quantum_bound = 4.0 * visibility;
    result.uncertainty = uncertainty;
    result.classification =
        classify(value, result.classical_bound, result.quantum_bound, uncertainty);
    return result;
}

PlaneAngle calibrate_phase_offset(const std::function<double(double)>& fringe) {
    // First-harmonic regression on a uniform grid: exact for pure cosine
    // interferograms.
    constexpr int kSamples = 16;
    double mean = 0.0;
    double cos_weight = 0.0;
    double sin_weight = 0.0;
    for (int k = 0; k < kSamples; ++k) {
        const double phi = 2.0 * kPi * k / kSamples;
        const double count = fringe(phi);
        mean += count;
        cos_weight += count * std::cos(phi);
        sin_weight += count * std::sin(phi);
    }
    mean /= kSamples;
    cos_weight *= 2.0 / kSamples;
    sin_weight *= 2.0 / kSamples;
    if (!(mean > 0.0)) {
        throw std::runtime_error("interferogram has no positive mean count");
    }
    const double contrast = std::hypot(cos_weight, sin_weight) / mean;
    if (contrast < 0.05) {
        throw std::runtime_error("no fringe: fitted contrast " + format_number(contrast) +
                                 " below 0.05");
    }
    return PlaneAngle::of(std::atan2(-sin_weight, cos_weight));
}

PlaneAngle calibrate_phase_offset(const CountFn& counts, std::size_t n_axes,
                                  std::size_t scan_axis) {
    if (scan_axis >= n_axes) {
        throw std::invalid_argument("scan axis out of range");
    }
    return calibrate_phase_offset([&](double phi) {
        std::vector<double> angles(n_axes, 0.0);
        angles[scan_axis] = phi;
        return counts(angles);
    });
}

CountFn with_axis_offset(CountFn counts, std::size_t axis, double delta) {
    return [counts = std::move(counts), axis, delta](const std::vector<double>& angles) {
        std::vector<double> shifted = angles;
        if (axis >= shifted.size()) {
            throw std::invalid_argument("offset axis out of range");
        }
        shifted[axis] += delta;
        return counts(shifted);
    };
}

ReductionReport mermin_reduction_check(const std::vector<double>& deltas) {
    if (deltas.empty() || deltas.back() != 0.0) {
        throw std::invalid_argument("delta sequence must end at 0");
    }
    const auto [a1, a2, c1, c2] = optimal_chsh_angles();
    const std::vector<std::pair<double, double>> marginal_settings = {
        {0.0, 0.0}, {a1, c1}, {0.7, -1.3}};
    ReductionReport report;
    std::optional<double> reference;
    std::vector<double> reference_marginals;
    std::vector<std::vector<double>> marginals_by_delta;

    for (double delta : deltas) {
        const Beamline beamline = rf_preset_with_delta(delta);
        const auto rates = rate_fn(beamline);
        CountFn two_axis;
        if (beamline.axis_names.size() == 3) {
            // Energy phase frozen at zero; the witness only drives spin/path.
            two_axis = [rates](const std::vector<double>& angles) {
                return rates({angles[0], angles[1], 0.0});
            };
        } else {
            two_axis = rates;
        }
        const double value = chsh(two_axis, a1, a2, c1, c2).value;
        report.chsh_by_delta.emplace_back(delta, value);
        std::vector<double> marginals;
        for (const auto& [alpha, chi] : marginal_settings) {
            marginals.push_back(context_expectation(two_axis, {alpha, chi}));
        }
        if (delta == 0.0) {
            reference = value;
            reference_marginals = marginals;
        }
        marginals_by_delta.push_back(std::move(marginals));
    }

    for (const auto& [delta, value] : report.chsh_by_delta) {
        report.max_difference = std::max(report.max_difference, std::abs(value - *reference));
    }
    for (const auto& marginals : marginals_by_delta) {
        for (std::size_t i = 0; i < marginals.size(); ++i) {
            report.max_marginal_difference = std::max(
                report.max_marginal_difference, std::abs(marginals[i] - reference_marginals[i]));
        }
    }
    report.exact_match =
        report.max_difference < 1e-12 && report.max_marginal_difference < 1e-12;
    return report;
}

}  // namespace nisim
