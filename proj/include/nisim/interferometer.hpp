#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "nisim/elements.hpp"
#include "nisim/qstate.hpp"
#include "nisim/table.hpp"

namespace nisim {

/// Named angle bindings for the parametric slots of a beamline, radians.
struct PhaseSettings {
    std::vector<std::pair<std::string, double>> values;

    PhaseSettings& set(const std::string& name, double angle);
    /// Throws "unbound slot <name>" when the binding is missing.
    double get(const std::string& name) const;
    bool has(const std::string& name) const;
};

/// A parametric phase-shifter position in the pipeline.
struct PhaseSlot {
    std::string name;
    std::string subsystem;
    std::optional<BasisPair> pair;
};

/// A post-selecting stage: the state is projected, renormalized, and the
/// branch probability recorded.
struct ProjectionStage {
    ElementOperator op;
    std::string name;
};

using BeamStage = std::variant<ElementOperator, PhaseSlot, ProjectionStage>;

/// Final spin (or generic two-level) projection feeding the detector.
struct AnalyzerSpec {
    std::string subsystem = "spin";
    double angle = 0.0;
};

/// An ordered element pipeline with its input state and analyzer: the
/// simulable interferometer. `axis_names` fixes the canonical angle order
/// used by count tables and witness estimators. `measurement_pair_phase`
/// records, per axis, any extra pair phase the detection optics impose on
/// the effective plus-projector of that axis (zero for the inline presets;
/// pi on the energy axis of the perfect-crystal preset, whose recombining
/// blade reads the energy pair out through a conjugating branch).
struct Beamline {
    ProductSpace space;
    StateVector input;
    std::vector<BeamStage> stages;
    AnalyzerSpec analyzer;
    std::vector<std::string> axis_names;
    std::vector<double> measurement_pair_phase;

    const PhaseSlot& slot(const std::string& axis) const;
};

struct RateResult {
    /// N / N_max with the analytic maximum of 1 at vanishing total phase.
    double relative_rate = 0.0;
    /// State entering the analyzer (after all stages).
    StateVector final_state;
    /// Product of projection-stage branch probabilities (1 when none).
    double post_selection_prob = 1.0;
};

RateResult run(const Beamline& beamline, const PhaseSettings& settings);

CountTable scan(const Beamline& beamline, const std::vector<PhaseSettings>& grid);

/// The entangled state produced by the stages ahead of the first phase slot.
StateVector prepared_state(const Beamline& beamline);

/// Product of per-axis plus-projectors realized by the detector-side optics
/// at the given settings (per-axis pair phases included). Commuting factors
/// on distinct subsystems, so the product is itself a projector.
ElementOperator measurement_projector(const Beamline& beamline, const PhaseSettings& settings);

PhaseSettings settings_from_axes(const Beamline& beamline, const std::vector<double>& angles);

/// Relative count rate as a function of the canonical axis angles.
std::function<double(const std::vector<double>&)> rate_fn(const Beamline& beamline);

/// The four device presets: entangler, phase slots, disentangler, analyzer
/// (the perfect-crystal preset adds the blade projection, recombiner and DC
/// flipper in its published order).
Beamline preset_mwp(double larmor_phi = 0.0);
Beamline preset_rf3(double larmor_phi = 0.0);
Beamline preset_rf2(double larmor_phi = 0.0);
Beamline preset_hasegawa();
Beamline preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

/// RF entangler preset at the given energy splitting: any nonzero delta
/// keeps the split energy labels (three axes); delta = 0 merges them and
/// drops the gamma axis.
Beamline rf_preset_with_delta(double delta, double larmor_phi = 0.0);

/// Abstract n-mode interferometer (2 <= n <= 6): GHZ preparation, one phase
/// slot per mode, adjoint disentangler, analyzer on mode 0.
Beamline generalized_ghz_beamline(int n);

}  // namespace nisim
