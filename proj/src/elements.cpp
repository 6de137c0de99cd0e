#include "nisim/elements.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace nisim {

namespace {

constexpr double kPi = 3.14159265358979323846;

Complex phase(double theta) {
    return Complex(std::cos(theta), std::sin(theta));
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

void require_shape(const ProductSpace& space,
                   const std::vector<std::pair<std::string, int>>& shape, const char* who) {
    bool ok = space.subsystems.size() == shape.size();
    if (ok) {
        for (std::size_t i = 0; i < shape.size(); ++i) {
            if (space.subsystems[i].label != shape[i].first ||
                space.subsystems[i].dim != shape[i].second) {
                ok = false;
                break;
            }
        }
    }
    if (!ok) {
        std::string expected;
        for (const auto& [label, dim] : shape) {
            if (!expected.empty()) {
                expected += ", ";
            }
            expected += label + ":" + std::to_string(dim);
        }
        throw std::invalid_argument(std::string(who) + " needs space [" + expected + "]");
    }
}

void add_transition(Matrix& m, const ProductSpace& space, const std::vector<int>& to,
                    const std::vector<int>& from, Complex amp = Complex(1.0, 0.0)) {
    m(space.flat_index(to), space.flat_index(from)) += amp;
}

/// Resolves the effective pair to subsystem-local indices; defaults to the
/// full basis of a two-dimensional subsystem.
std::pair<int, int> resolve_pair(const SubsystemSpec& sub, const std::optional<BasisPair>& pair,
                                 const char* who) {
    if (!pair) {
        if (sub.dim != 2) {
            throw std::invalid_argument(std::string(who) + " on subsystem '" + sub.label +
                                        "' needs an explicit basis pair");
        }
        return {0, 1};
    }
    const int i = sub.basis_index(pair->first);
    const int j = sub.basis_index(pair->second);
    if (i == j) {
        throw std::invalid_argument(std::string(who) + " pair names the same basis state twice");
    }
    return {i, j};
}

ElementOperator path_redefinition(const ProductSpace& space, const std::vector<Complex>& diag) {
    const SubsystemSpec& path = space.subsystem("path");
    Matrix local = Matrix::Identity(path.dim, path.dim);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
    }
    return embed_op(space, "path", local, OpTag::unitary);
}

ElementOperator redefine(const ElementOperator& op, const ElementOperator& v) {
    return compose(compose(v.adjoint(), op), v);
}

}  // namespace

PlaneAngle PlaneAngle::of(double radians) {
    require_finite(radians, "plane angle");
    double r = std::remainder(radians, 2.0 * kPi);
    if (r <= -kPi) {
        r += 2.0 * kPi;
    }
    return PlaneAngle{r};
}

LarmorPhase LarmorPhase::of(double phi) {
    require_finite(phi, "Larmor phase");
    return LarmorPhase{phi};
}

ProductSpace mwp_space() {
    return make_space({SubsystemSpec::spin(),
                       SubsystemSpec::make("path", {"a", "b"}, {{"c", 0}, {"d", 1}})});
}

ProductSpace rf3_space() {
    return make_space({SubsystemSpec::spin(), SubsystemSpec::make("path", {"0", "1", "2"}),
                       SubsystemSpec::make("energy", {"E-", "E0", "E+"})});
}

ProductSpace rf2_space() {
    return make_space({SubsystemSpec::spin(), SubsystemSpec::make("path", {"0", "1", "2"})});
}

ProductSpace hasegawa_space() {
    return make_space({SubsystemSpec::spin(), SubsystemSpec::make("path", {"I", "II"}),
                       SubsystemSpec::make("energy", {"E0", "E1", "E2"})});
}

ElementOperator sigma_plane(const ProductSpace& space, const std::string& subsystem,
                            PlaneAngle angle, std::optional<BasisPair> pair) {
    const SubsystemSpec& sub = space.subsystem(subsystem);
    const auto [i, j] = resolve_pair(sub, pair, "sigma_plane");
    Matrix local = Matrix::Zero(sub.dim, sub.dim);
    local(i, j) = phase(-angle.radians);
    local(j, i) = phase(angle.radians);
    // On a wider subsystem the operator vanishes outside the pair and gains
    // a zero eigenvalue, so the unitary tag only applies to the 2-dim case.
    const OpTag tags =
        sub.dim == 2 ? (OpTag::hermitian | OpTag::unitary) : OpTag::hermitian;
    return embed_op(space, subsystem, local, tags);
}

ElementOperator projector_plus(const ProductSpace& space, const std::string& subsystem,
                               PlaneAngle angle, std::optional<BasisPair> pair) {
    const SubsystemSpec& sub = space.subsystem(subsystem);
    const auto [i, j] = resolve_pair(sub, pair, "projector_plus");
    Matrix local = Matrix::Zero(sub.dim, sub.dim);
    local(i, i) = 0.5;
    local(j, j) = 0.5;
    local(i, j) = 0.5 * phase(-angle.radians);
    local(j, i) = 0.5 * phase(angle.radians);
    return embed_op(space, subsystem, local, OpTag::hermitian | OpTag::projector);
}

ElementOperator mwp_beamsplitter(const ProductSpace& space, double t_up, double r_up,
                                 double t_dn, double r_dn) {
    require_shape(space, {{"spin", 2}, {"path", 2}}, "mwp_beamsplitter");
    if (std::abs(t_up * t_up + r_up * r_up - 1.0) >= kAlgebraTol ||
        std::abs(t_dn * t_dn + r_dn * r_dn - 1.0) >= kAlgebraTol) {
        throw std::invalid_argument("mwp_beamsplitter amplitudes need t² + r² = 1");
    }
    Matrix m = Matrix::Zero(4, 4);
    const double t[2] = {t_up, t_dn};
    const double r[2] = {r_up, r_dn};
    for (int s = 0; s < 2; ++s) {
        m(2 * s + 0, 2 * s + 0) = t[s];
        m(2 * s + 1, 2 * s + 1) = t[s];
        m(2 * s + 0, 2 * s + 1) = Complex(0.0, r[s]);
        m(2 * s + 1, 2 * s + 0) = Complex(0.0, r[s]);
    }
    return ElementOperator(space, std::move(m), OpTag::unitary);
}

ElementOperator larmor(const ProductSpace& space, LarmorPhase phi) {
    Matrix local(2, 2);
    local << phase(phi.phi), 0.0, 0.0, phase(-phi.phi);
    return embed_op(space, "spin", local, OpTag::unitary);
}

ElementOperator mwp_entangler(const ProductSpace& space, const EntanglerConfig& config) {
    require_shape(space, {{"spin", 2}, {"path", 2}}, "mwp_entangler");
    if (config.kind != EntanglerKind::mwp) {
        throw std::invalid_argument("mwp_entangler needs kind mwp");
    }
    const double phi = config.larmor_phi.phi;
    // Fully spin-splitting setting: up transmits, down reflects.
    ElementOperator u = compose(larmor(space, config.larmor_phi),
                                mwp_beamsplitter(space, 1.0, 0.0, 0.0, 1.0));
    if (config.use_redefined_basis) {
        // Absorb the reflected branch's i e^{-2i phi} into the second path slot.
        u = redefine(u, path_redefinition(space, {Complex(1.0, 0.0),
                                                  Complex(0.0, 1.0) * phase(-2.0 * phi)}));
    }
    return u.with_tags(OpTag::unitary);
}

ElementOperator rf3_hamiltonian(const ProductSpace& space) {
    require_shape(space, {{"spin", 2}, {"path", 3}, {"energy", 3}}, "rf3_hamiltonian");
    // Energy ladder T steps E+ -> E0 -> E-; spin-up walks path 0 -> 1 while
    // spin-down walks 2 -> 0, plus hermitian conjugates.
    Matrix m = Matrix::Zero(space.total_dim, space.total_dim);
    add_transition(m, space, {0, 1, 1}, {0, 0, 2});
    add_transition(m, space, {0, 1, 0}, {0, 0, 1});
    add_transition(m, space, {1, 0, 1}, {1, 2, 2});
    add_transition(m, space, {1, 0, 0}, {1, 2, 1});
    m += Matrix(m.adjoint());
    return ElementOperator(space, std::move(m), OpTag::hermitian);
}

ElementOperator rf2_hamiltonian(const ProductSpace& space) {
    require_shape(space, {{"spin", 2}, {"path", 3}}, "rf2_hamiltonian");
    Matrix m = Matrix::Zero(space.total_dim, space.total_dim);
    add_transition(m, space, {0, 1}, {0, 0});
    add_transition(m, space, {1, 2}, {1, 0});
    m += Matrix(m.adjoint());
    return ElementOperator(space, std::move(m), OpTag::hermitian);
}

ElementOperator rf3_entangler(const ProductSpace& space, const EntanglerConfig& config) {
    if (config.kind != EntanglerKind::rf3) {
        throw std::invalid_argument("rf3_entangler needs kind rf3");
    }
    const double phi = config.larmor_phi.phi;
    ElementOperator u = compose(larmor(space, config.larmor_phi),
                                exp_i(rf3_hamiltonian(space), kPi / 2.0));
    if (config.use_redefined_basis) {
        u = redefine(u, path_redefinition(space, {Complex(1.0, 0.0),
                                                  Complex(0.0, -1.0) * phase(phi),
                                                  Complex(0.0, -1.0) * phase(-phi)}));
    }
    return u.with_tags(OpTag::unitary);
}

ElementOperator rf2_entangler(const ProductSpace& space, const EntanglerConfig& config) {
    if (config.kind != EntanglerKind::rf2) {
        throw std::invalid_argument("rf2_entangler needs kind rf2");
    }
    if (config.delta != 0.0) {
        throw std::invalid_argument("rf2 requires delta=0");
    }
    const double phi = config.larmor_phi.phi;
    ElementOperator u = compose(larmor(space, config.larmor_phi),
                                exp_i(rf2_hamiltonian(space), kPi / 2.0));
    if (config.use_redefined_basis) {
        u = redefine(u, path_redefinition(space, {Complex(1.0, 0.0),
                                                  Complex(0.0, -1.0) * phase(phi),
                                                  Complex(0.0, -1.0) * phase(-phi)}));
    }
    return u.with_tags(OpTag::unitary);
}

ElementOperator phase_shifter(const ProductSpace& space, const std::string& subsystem,
                              double theta, std::optional<BasisPair> pair) {
    require_finite(theta, "phase shift");
    const SubsystemSpec& sub = space.subsystem(subsystem);
    const auto [i, j] = resolve_pair(sub, pair, "phase_shifter");
    (void)i;  // the first pair member keeps phase 1 like every other state
    Matrix local = Matrix::Identity(sub.dim, sub.dim);
    local(j, j) = phase(theta);
    return embed_op(space, subsystem, local, OpTag::unitary);
}

ElementOperator dc_flipper(const ProductSpace& space) {
    Matrix local(2, 2);
    local << 0.0, 1.0, 1.0, 0.0;
    return embed_op(space, "spin", local, OpTag::unitary | OpTag::hermitian);
}

ElementOperator crystal_beamsplitter(const ProductSpace& space) {
    const SubsystemSpec& path = space.subsystem("path");
    if (path.dim != 2) {
        throw std::invalid_argument("crystal_beamsplitter needs a 2-dim path subsystem");
    }
    const double s = 1.0 / std::sqrt(2.0);
    Matrix local(2, 2);
    local << s, s, s, -s;
    return embed_op(space, "path", local, OpTag::unitary | OpTag::hermitian);
}

ElementOperator crystal_rf_hamiltonian(const ProductSpace& space) {
    require_shape(space, {{"spin", 2}, {"path", 2}, {"energy", 3}}, "crystal_rf_hamiltonian");
    Matrix m = Matrix::Zero(space.total_dim, space.total_dim);
    add_transition(m, space, {1, 1, 2}, {0, 1, 0});
    m += Matrix(m.adjoint());
    return ElementOperator(space, std::move(m), OpTag::hermitian);
}

ElementOperator energy_recombiner_hamiltonian(const ProductSpace& space) {
    require_shape(space, {{"spin", 2}, {"path", 2}, {"energy", 3}},
                  "energy_recombiner_hamiltonian");
    // Half-frequency flipper on path I: E0 -> E1 and E1 -> E2 with spin flip.
    Matrix m = Matrix::Zero(space.total_dim, space.total_dim);
    add_transition(m, space, {1, 0, 1}, {0, 0, 0});
    add_transition(m, space, {1, 0, 2}, {0, 0, 1});
    m += Matrix(m.adjoint());
    return ElementOperator(space, std::move(m), OpTag::hermitian);
}

ElementOperator crystal_rf_entangler(const ProductSpace& space) {
    return exp_i(crystal_rf_hamiltonian(space), kPi / 2.0);
}

ElementOperator energy_recombiner(const ProductSpace& space) {
    return exp_i(energy_recombiner_hamiltonian(space), kPi / 2.0);
}

ElementOperator blade_projection(const ProductSpace& space) {
    const SubsystemSpec& path = space.subsystem("path");
    if (path.dim != 2) {
        throw std::invalid_argument("blade_projection needs a 2-dim path subsystem");
    }
    Matrix keep = Matrix::Zero(2, 2);
    keep(0, 0) = 1.0;
    const ElementOperator keep_first = embed_op(space, "path", keep, OpTag::projector);
    return ElementOperator(space, keep_first.matrix * crystal_beamsplitter(space).matrix,
                           OpTag::none);
}

}  // namespace nisim
