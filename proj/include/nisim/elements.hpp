#pragma once

#include <optional>
#include <string>
#include <utility>

#include "nisim/qstate.hpp"

namespace nisim {

/// Angle in the x-y plane of a Bloch sphere, normalized into (-pi, pi].
struct PlaneAngle {
    double radians = 0.0;

    static PlaneAngle of(double radians);
};

/// Accumulated Larmor precession phase; any finite value.
struct LarmorPhase {
    double phi = 0.0;

    static LarmorPhase of(double phi);
};

enum class EntanglerKind { mwp, rf3, rf2, crystal_rf };

struct EntanglerConfig {
    EntanglerKind kind = EntanglerKind::mwp;
    LarmorPhase larmor_phi{};
    /// Energy-splitting surrogate: zero merges the split energy bands and is
    /// mandatory for the two-mode RF entangler.
    double delta = 1.0;
    bool use_redefined_basis = true;
};

using BasisPair = std::pair<std::string, std::string>;

/// Canonical device spaces.
ProductSpace mwp_space();       // [spin:2, path:2 {a|c, b|d}]
ProductSpace rf3_space();       // [spin:2, path:3 {0,1,2}, energy:3 {E-,E0,E+}]
ProductSpace rf2_space();       // [spin:2, path:3 {0,1,2}]
ProductSpace hasegawa_space();  // [spin:2, path:2 {I,II}, energy:3 {E0,E1,E2}]

/// cos(theta) sigma_x + sin(theta) sigma_y on the target subsystem. With no
/// pair given the subsystem must be two-dimensional; otherwise the operator
/// acts on the named pair of basis states and as zero on the rest (then it
/// is hermitian but no longer unitary).
ElementOperator sigma_plane(const ProductSpace& space, const std::string& subsystem,
                            PlaneAngle angle, std::optional<BasisPair> pair = {});

/// Rank-1 projector onto (|first> + e^{i theta} |second>)/sqrt(2) of the
/// effective pair; satisfies sigma_plane(t) = projector_plus(t) -
/// projector_plus(t + pi).
ElementOperator projector_plus(const ProductSpace& space, const std::string& subsystem,
                               PlaneAngle angle, std::optional<BasisPair> pair = {});

/// Spin-dependent 50:50-capable beam splitter on [spin:2, path:2]: per spin
/// block [[t, ir], [ir, t]] with t^2 + r^2 = 1.
ElementOperator mwp_beamsplitter(const ProductSpace& space, double t_up, double r_up,
                                 double t_dn, double r_dn);

/// diag(e^{i phi}, e^{-i phi}) on spin, identity elsewhere.
ElementOperator larmor(const ProductSpace& space, LarmorPhase phi);

/// Pair-of-prisms spin/path entangler: Larmor precession following the
/// fully spin-splitting beam setting (t_up = 1 = r_dn), optionally in the
/// output basis redefined to absorb the splitter's transition phases.
ElementOperator mwp_entangler(const ProductSpace& space, const EntanglerConfig& config);

/// Transition Hamiltonians of the RF-flipper entanglers. Exposed so the
/// propagator identities can be checked against independent constructions.
ElementOperator rf3_hamiltonian(const ProductSpace& space);
ElementOperator rf2_hamiltonian(const ProductSpace& space);

/// RF-flipper-pair entangler of spin, path and energy on the 18-dim space:
/// exp(-i pi H / 2) followed by Larmor precession and (optionally) the
/// phase-absorbing redefinition of paths 1 and 2.
ElementOperator rf3_entangler(const ProductSpace& space, const EntanglerConfig& config);

/// Degenerate-frequency limit of the RF entangler: spin/path only, on
/// [spin:2, path:3]. Requires config.delta == 0.
ElementOperator rf2_entangler(const ProductSpace& space, const EntanglerConfig& config);

/// Diagonal unitary putting relative phase e^{i theta} on the second member
/// of the effective pair; identity on every other basis state.
ElementOperator phase_shifter(const ProductSpace& space, const std::string& subsystem,
                              double theta, std::optional<BasisPair> pair = {});

/// sigma_x on spin, identity elsewhere.
ElementOperator dc_flipper(const ProductSpace& space);

/// Hadamard-form 50:50 splitter on a 2-dim path subsystem.
ElementOperator crystal_beamsplitter(const ProductSpace& space);

/// Single-path RF devices of the perfect-crystal interferometer, on
/// [spin:2, path:2 {I,II}, energy:3 {E0,E1,E2}].
ElementOperator crystal_rf_hamiltonian(const ProductSpace& space);
ElementOperator energy_recombiner_hamiltonian(const ProductSpace& space);
ElementOperator crystal_rf_entangler(const ProductSpace& space);
ElementOperator energy_recombiner(const ProductSpace& space);

/// Third-blade recombination keeping path I: |I><I| U_BS (unnormalized);
/// callers renormalize and record the branch probability.
ElementOperator blade_projection(const ProductSpace& space);

}  // namespace nisim
