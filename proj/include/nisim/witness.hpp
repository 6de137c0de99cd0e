#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nisim/elements.hpp"

namespace nisim {

/// Counts for one tuple of axis angles. Any nonnegative scale (relative
/// rates, scaled rates, or sampled counts) works: the estimators are ratio
/// estimators and cancel the scale. Witness code invokes count functions
/// serially, so they need not be safe for concurrent use.
using CountFn = std::function<double(const std::vector<double>&)>;

enum class WitnessKind { chsh, mermin, custom };
enum class BoundClass { within_classical, violates_classical, violates_quantum };

std::string to_string(WitnessKind kind);
std::string to_string(BoundClass classification);

struct WitnessResult {
    WitnessKind kind = WitnessKind::custom;
    double value = 0.0;
    double classical_bound = 0.0;
    double quantum_bound = 0.0;
    BoundClass classification = BoundClass::within_classical;
    std::optional<double> uncertainty;
};

/// Flat record serialization:
/// kind,value,uncertainty,classical_bound,quantum_bound,classification
std::string witness_record_header();
std::string witness_record_row(const WitnessResult& result);

/// Expectation of the n-observable context at the given base angles from
/// the 2^n count settings {angles + mu*pi}: the signed-over-total ratio.
/// Throws when the denominator falls below 1e-12 of the total count scale.
double context_expectation(const CountFn& counts, const std::vector<double>& base_angles);

/// CHSH witness from four context expectations over a 2-axis count
/// function: S = E(a1,c1) + E(a1,c2) + E(a2,c1) - E(a2,c2). Bounds scale
/// with the configured visibility.
WitnessResult chsh(const CountFn& counts, double alpha1, double alpha2, double chi1,
                   double chi2, double visibility = 1.0,
                   std::optional<double> uncertainty = std::nullopt);

/// Maximal-violation angles {alpha1, alpha2, chi1, chi2}.
std::array<double, 4> optimal_chsh_angles();

/// The fixed x/y plane angles of the Mermin contexts.
inline constexpr double kMerminAngleX = 0.0;
inline constexpr double kMerminAngleY = 1.57079632679489661923;

/// Mermin witness over a 3-axis count function:
/// M = E[xxx] - E[xyy] - E[yxy] - E[yyx].
WitnessResult mermin(const CountFn& counts, double visibility = 1.0,
                     std::optional<double> uncertainty = std::nullopt);

BoundClass classify(double value, double classical_bound, double quantum_bound,
                    std::optional<double> uncertainty);

/// Least-squares fit of a one-parameter interferogram N = A[1 + v cos(phi +
/// offset)], returning the offset in (-pi, pi]. Throws when the fitted
/// contrast v drops below 0.05 (no fringe to calibrate on).
PlaneAngle calibrate_phase_offset(const std::function<double(double)>& fringe);

/// Same fit along one axis of a multi-axis count function, the other axes
/// held at zero.
PlaneAngle calibrate_phase_offset(const CountFn& counts, std::size_t n_axes,
                                  std::size_t scan_axis);

/// Count function with a constant shift added to one axis (used to take
/// context angles relative to a calibrated offset).
CountFn with_axis_offset(CountFn counts, std::size_t axis, double delta);

/// Comparison of the split-energy pipeline against its merged-energy limit:
/// CHSH values with the energy phase frozen at zero, per requested energy
/// splitting, against the two-axis pipeline at splitting zero; likewise the
/// marginal spin/path context expectations at sample settings.
struct ReductionReport {
    std::vector<std::pair<double, double>> chsh_by_delta;
    double max_difference = 0.0;
    double max_marginal_difference = 0.0;
    bool exact_match = false;
};

/// `deltas` must end at 0 (the merged-energy reference).
ReductionReport mermin_reduction_check(const std::vector<double>& deltas);

}  // namespace nisim
