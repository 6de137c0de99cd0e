#include "nisim/interferometer.hpp"

#include <cmath>
#include <stdexcept>

namespace nisim {

namespace {

constexpr double kPi = 3.14159265358979323846;

ElementOperator analyzer_projector(const Beamline& beamline) {
    return projector_plus(beamline.space, beamline.analyzer.subsystem,
                          PlaneAngle::of(beamline.analyzer.angle));
}

}  // namespace

PhaseSettings& PhaseSettings::set(const std::string& name, double angle) {
    for (auto& [key, value] : values) {
        if (key == name) {
            value = angle;
            return *this;
        }
    }
    values.emplace_back(name, angle);
    return *this;
}

double PhaseSettings::get(const std::string& name) const {
    for (const auto& [key, value] : values) {
        if (key == name) {
            return value;
        }
    }
    throw std::runtime_error("unbound slot " + name);
}

bool PhaseSettings::has(const std::string& name) const {
    for (const auto& [key, value] : values) {
        if (key == name) {
            return true;
        }
    }
    return false;
}

const PhaseSlot& Beamline::slot(const std::string& axis) const {
    for (const auto& stage : stages) {
        if (const auto* slot = std::get_if<PhaseSlot>(&stage)) {
            if (slot->name == axis) {
                return *slot;
            }
        }
    }
    throw std::invalid_argument("beamline has no slot named '" + axis + "'");
}

RateResult run(const Beamline& beamline, const PhaseSettings& settings) {
    StateVector psi = beamline.input;
    double post_selection = 1.0;
    for (const auto& stage : beamline.stages) {
        if (const auto* op = std::get_if<ElementOperator>(&stage)) {
            psi = apply(*op, psi);
        } else if (const auto* slot = std::get_if<PhaseSlot>(&stage)) {
            psi = apply(phase_shifter(beamline.space, slot->subsystem, settings.get(slot->name),
                                      slot->pair),
                        psi);
        } else {
            const auto& projection = std::get<ProjectionStage>(stage);
            const double prob = projection_probability(projection.op, psi);
            if (prob < kZeroNormTol) {
                throw std::runtime_error("projection stage '" + projection.name +
                                         "' removed the whole beam (zero probability)");
            }
            psi = StateVector(beamline.space, projection.op.matrix * psi.amplitudes /
                                                  std::sqrt(prob));
            post_selection *= prob;
        }
    }
    const double rate = expectation_real(analyzer_projector(beamline), psi);
    return RateResult{rate, std::move(psi), post_selection};
}

CountTable scan(const Beamline& beamline, const std::vector<PhaseSettings>& grid) {
    if (grid.empty()) {
        throw std::invalid_argument("scan needs a non-empty settings grid");
    }
    CountTable table;
    table.columns = beamline.axis_names;
    table.rows.reserve(grid.size());
    for (const auto& settings : grid) {
        CountRow row;
        row.angles.reserve(beamline.axis_names.size());
        for (const auto& axis : beamline.axis_names) {
            row.angles.push_back(settings.get(axis));
        }
        row.rate = run(beamline, settings).relative_rate;
        table.rows.push_back(std::move(row));
    }
    return table;
}

StateVector prepared_state(const Beamline& beamline) {
    StateVector psi = beamline.input;
    for (const auto& stage : beamline.stages) {
        if (std::holds_alternative<PhaseSlot>(stage)) {
            break;
        }
        if (const auto* op = std::get_if<ElementOperator>(&stage)) {
            psi = apply(*op, psi);
        } else {
            const auto& projection = std::get<ProjectionStage>(stage);
            const double prob = projection_probability(projection.op, psi);
            if (prob < kZeroNormTol) {
                throw std::runtime_error("projection stage '" + projection.name +
                                         "' removed the whole beam (zero probability)");
            }
            psi = StateVector(beamline.space, projection.op.matrix * psi.amplitudes /
                                                  std::sqrt(prob));
        }
    }
    return psi;
}

ElementOperator measurement_projector(const Beamline& beamline, const PhaseSettings& settings) {
    Matrix product = Matrix::Identity(beamline.space.total_dim, beamline.space.total_dim);
    for (std::size_t i = 0; i < beamline.axis_names.size(); ++i) {
        const PhaseSlot& slot = beamline.slot(beamline.axis_names[i]);
        const double pair_phase =
            i < beamline.measurement_pair_phase.size() ? beamline.measurement_pair_phase[i] : 0.0;
        const ElementOperator p =
            projector_plus(beamline.space, slot.subsystem,
                           PlaneAngle::of(settings.get(slot.name) + pair_phase), slot.pair);
        product = product * p.matrix;
    }
    return ElementOperator(beamline.space, std::move(product),
                           OpTag::projector | OpTag::hermitian);
}

PhaseSettings settings_from_axes(const Beamline& beamline, const std::vector<double>& angles) {
    if (angles.size() != beamline.axis_names.size()) {
        throw std::invalid_argument("angle count does not match beamline axes");
    }
    PhaseSettings settings;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        settings.set(beamline.axis_names[i], angles[i]);
    }
    return settings;
}

std::function<double(const std::vector<double>&)> rate_fn(const Beamline& beamline) {
    return [beamline](const std::vector<double>& angles) {
        return run(beamline, settings_from_axes(beamline, angles)).relative_rate;
    };
}

Beamline preset_mwp(double larmor_phi) {
    ProductSpace space = mwp_space();
    EntanglerConfig config{EntanglerKind::mwp, LarmorPhase::of(larmor_phi), 1.0, true};
    const ElementOperator entangler = mwp_entangler(space, config);
    StateVector input = superpose({{1.0, basis_state(space, {"up", "a"})},
                                   {1.0, basis_state(space, {"dn", "a"})}});
    Beamline beamline{std::move(space),
                      std::move(input),
                      {entangler, PhaseSlot{"alpha", "spin", BasisPair{"up", "dn"}},
                       PhaseSlot{"chi", "path", BasisPair{"c", "d"}}, entangler.adjoint()},
                      AnalyzerSpec{"spin", 0.0},
                      {"alpha", "chi"},
                      {0.0, 0.0}};
    return beamline;
}

Beamline preset_rf3(double larmor_phi) {
    ProductSpace space = rf3_space();
    EntanglerConfig config{EntanglerKind::rf3, LarmorPhase::of(larmor_phi), 1.0, true};
    const ElementOperator entangler = rf3_entangler(space, config);
    StateVector input = superpose({{1.0, basis_state(space, {"up", "0", "E0"})},
                                   {1.0, basis_state(space, {"dn", "0", "E0"})}});
    Beamline beamline{std::move(space),
                      std::move(input),
                      {entangler, PhaseSlot{"alpha", "spin", BasisPair{"up", "dn"}},
                       PhaseSlot{"chi", "path", BasisPair{"1", "2"}},
                       PhaseSlot{"gamma", "energy", BasisPair{"E-", "E+"}},
                       entangler.adjoint()},
                      AnalyzerSpec{"spin", 0.0},
                      {"alpha", "chi", "gamma"},
                      {0.0, 0.0, 0.0}};
    return beamline;
}

Beamline preset_rf2(double larmor_phi) {
    ProductSpace space = rf2_space();
    EntanglerConfig config{EntanglerKind::rf2, LarmorPhase::of(larmor_phi), 0.0, true};
    const ElementOperator entangler = rf2_entangler(space, config);
    StateVector input = superpose({{1.0, basis_state(space, {"up", "0"})},
                                   {1.0, basis_state(space, {"dn", "0"})}});
    Beamline beamline{std::move(space),
                      std::move(input),
                      {entangler, PhaseSlot{"alpha", "spin", BasisPair{"up", "dn"}},
                       PhaseSlot{"chi", "path", BasisPair{"1", "2"}}, entangler.adjoint()},
                      AnalyzerSpec{"spin", 0.0},
                      {"alpha", "chi"},
                      {0.0, 0.0}};
    return beamline;
}

Beamline preset_hasegawa() {
    ProductSpace space = hasegawa_space();
    StateVector input = basis_state(space, {"up", "II", "E0"});
    Beamline beamline{std::move(space),
                      std::move(input),
                      {},
                      AnalyzerSpec{"spin", 0.0},
                      {"alpha", "chi", "gamma"},
                      {0.0, 0.0, kPi}};
    beamline.stages = {crystal_beamsplitter(beamline.space),
                       crystal_rf_entangler(beamline.space),
                       PhaseSlot{"chi", "path", BasisPair{"I", "II"}},
                       ProjectionStage{blade_projection(beamline.space), "blade"},
                       PhaseSlot{"gamma", "energy", BasisPair{"E0", "E2"}},
                       energy_recombiner(beamline.space),
                       dc_flipper(beamline.space),
                       PhaseSlot{"alpha", "spin", BasisPair{"up", "dn"}}};
    return beamline;
}

Beamline preset_by_name(const std::string& name) {
    if (name == "mwp") {
        return preset_mwp();
    }
    if (name == "rf3") {
        return preset_rf3();
    }
    if (name == "rf2") {
        return preset_rf2();
    }
    if (name == "hasegawa") {
        return preset_hasegawa();
    }
    throw std::invalid_argument("unknown preset '" + name +
                                "' (known: mwp, rf3, rf2, hasegawa)");
}

std::vector<std::string> preset_names() {
    return {"mwp", "rf3", "rf2", "hasegawa"};
}

Beamline rf_preset_with_delta(double delta, double larmor_phi) {
    return delta == 0.0 ? preset_rf2(larmor_phi) : preset_rf3(larmor_phi);
}

Beamline generalized_ghz_beamline(int n) {
    if (n < 2 || n > 6) {
        throw std::invalid_argument("generalized beamline needs 2 <= n <= 6");
    }
    std::vector<SubsystemSpec> subsystems;
    subsystems.reserve(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        subsystems.push_back(SubsystemSpec::make("m" + std::to_string(l), {"up", "dn"}));
    }
    ProductSpace space = make_space(std::move(subsystems));

    // Fan-out permutation: mode 0 in |dn> flips every other mode. Sends the
    // product input to the GHZ state and is its own inverse.
    Matrix fanout = Matrix::Zero(space.total_dim, space.total_dim);
    for (int c = 0; c < space.total_dim; ++c) {
        std::vector<int> digits = space.digits_of(c);
        if (digits[0] == 1) {
            for (std::size_t k = 1; k < digits.size(); ++k) {
                digits[k] = 1 - digits[k];
            }
        }
        fanout(space.flat_index(digits), c) = 1.0;
    }
    ElementOperator entangler(space, std::move(fanout),
                              OpTag::unitary | OpTag::hermitian);

    std::vector<std::string> all_up(static_cast<std::size_t>(n), "up");
    std::vector<std::string> dn_first = all_up;
    dn_first[0] = "dn";
    StateVector input = superpose({{1.0, basis_state(space, all_up)},
                                   {1.0, basis_state(space, dn_first)}});

    std::vector<BeamStage> stages;
    std::vector<std::string> axes;
    stages.push_back(entangler);
    for (int l = 0; l < n; ++l) {
        const std::string axis = "phi" + std::to_string(l);
        stages.push_back(PhaseSlot{axis, "m" + std::to_string(l), BasisPair{"up", "dn"}});
        axes.push_back(axis);
    }
    stages.push_back(entangler.adjoint());

    return Beamline{std::move(space),       std::move(input),
                    std::move(stages),      AnalyzerSpec{"m0", 0.0},
                    std::move(axes),        std::vector<double>(static_cast<std::size_t>(n), 0.0)};
}

}  // namespace nisim
