#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nisim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tolerance for algebraic identities (unitarity, hermiticity, norms).
inline constexpr double kAlgebraTol = 1e-10;
/// Tolerance for matrix-exponential series truncation.
inline constexpr double kSeriesTol = 1e-12;
/// Threshold below which a vector counts as fully cancelled / dead branch.
inline constexpr double kZeroNormTol = 1e-12;

/// One labeled finite-dimensional degree of freedom (spin, path, energy, ...).
///
/// `basis_names` are the canonical state names in index order. `aliases`
/// gives extra names for existing slots; a beam-splitter output path may be
/// known by a different name than the input path occupying the same slot.
struct SubsystemSpec {
    std::string label;
    int dim = 0;
    std::vector<std::string> basis_names;
    std::vector<std::pair<std::string, int>> aliases;

    static SubsystemSpec make(std::string label, std::vector<std::string> basis_names,
                              std::vector<std::pair<std::string, int>> aliases = {});
    /// Conventional spin-1/2 subsystem with basis {up, dn}.
    static SubsystemSpec spin();

    /// Index of a basis state by canonical name or alias. Throws on unknown.
    int basis_index(const std::string& name) const;
    bool operator==(const SubsystemSpec& other) const;
};

/// Ordered tensor product of subsystems. Basis indices are row-major with
/// the FIRST listed subsystem slowest-varying:
///   flat = ((i0 * d1) + i1) * d2 + i2 ...
struct ProductSpace {
    std::vector<SubsystemSpec> subsystems;
    int total_dim = 0;

    int subsystem_index(const std::string& label) const;
    const SubsystemSpec& subsystem(const std::string& label) const;
    /// Product of the dimensions of all subsystems after position k.
    int stride(int k) const;
    int flat_index(const std::vector<int>& digits) const;
    std::vector<int> digits_of(int flat) const;
    bool operator==(const ProductSpace& other) const;
};

ProductSpace make_space(std::vector<SubsystemSpec> subsystems);

/// Unit-norm complex amplitude vector over a ProductSpace basis.
struct StateVector {
    ProductSpace space;
    Vector amplitudes;

    /// Checks the unit-norm invariant; throws if violated beyond kAlgebraTol.
    StateVector(ProductSpace space, Vector amplitudes);
    /// Normalizes first; throws if the input norm is below kZeroNormTol.
    static StateVector normalized(ProductSpace space, Vector amplitudes);
};

enum class OpTag : unsigned {
    none = 0,
    unitary = 1u << 0,
    hermitian = 1u << 1,
    projector = 1u << 2,
};

constexpr OpTag operator|(OpTag a, OpTag b) {
    return static_cast<OpTag>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has_tag(OpTag set, OpTag t) {
    return (static_cast<unsigned>(set) & static_cast<unsigned>(t)) != 0;
}

/// Square complex matrix on a ProductSpace with role tags. Construction
/// verifies every claimed tag (U†U = 1, H = H†, P² = P = P†) at kAlgebraTol.
struct ElementOperator {
    ProductSpace space;
    Matrix matrix;
    OpTag tags = OpTag::none;

    ElementOperator(ProductSpace space, Matrix matrix, OpTag tags);

    ElementOperator adjoint() const;
    /// Returns a copy carrying the given tags (revalidated).
    ElementOperator with_tags(OpTag tags) const;
};

ElementOperator identity_op(const ProductSpace& space);

/// Product a·b. The result keeps the unitary tag when both factors carry it;
/// any other tag combination yields an untagged operator.
ElementOperator compose(const ElementOperator& a, const ElementOperator& b);

/// Unit basis vector selected by one basis name (or alias) per subsystem.
StateVector basis_state(const ProductSpace& space, const std::vector<std::string>& labels);

/// Normalized linear combination. Throws on space mismatch and on complete
/// cancellation (resulting norm below kZeroNormTol).
StateVector superpose(const std::vector<std::pair<Complex, StateVector>>& terms);

/// Lifts a local operator on the named target subsystems (in the given
/// order, first target slowest-varying in the local matrix) to the full
/// space, acting as the identity elsewhere. Targets need not be adjacent
/// nor listed in space order. Tags carry over to the embedded operator.
ElementOperator embed_op(const ProductSpace& space, const std::vector<std::string>& targets,
                         const Matrix& local, OpTag tags = OpTag::none);
ElementOperator embed_op(const ProductSpace& space, const std::string& target,
                         const Matrix& local, OpTag tags = OpTag::none);

/// Matrix-vector application. Projector-tagged operators renormalize the
/// result (projection-then-count semantics) and throw when the state lies
/// in the orthogonal subspace; all other operators apply unaided.
StateVector apply(const ElementOperator& op, const StateVector& psi);

/// |op·psi|², the probability weight of the branch kept by a projector.
double projection_probability(const ElementOperator& op, const StateVector& psi);

/// ⟨psi|op|psi⟩. For hermitian-tagged operators the imaginary part must
/// vanish within kAlgebraTol and the returned value is purely real.
Complex expectation(const ElementOperator& op, const StateVector& psi);
double expectation_real(const ElementOperator& op, const StateVector& psi);

/// exp(-i·H·t) for hermitian H, by scaled-and-squared Taylor series with
/// truncation below kSeriesTol. Result is tagged unitary.
ElementOperator exp_i(const ElementOperator& h, double t);

}  // namespace nisim
