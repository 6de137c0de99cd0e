#include "nisim/qstate.hpp"

#include <cmath>
#include <stdexcept>

namespace nisim {

namespace {

double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

void validate_tags(const ProductSpace& space, const Matrix& m, OpTag tags) {
    const auto n = static_cast<Eigen::Index>(space.total_dim);
    if (m.rows() != n || m.cols() != n) {
        throw std::invalid_argument("operator matrix does not match space dimension " +
                                    std::to_string(space.total_dim));
    }
    const Matrix eye = Matrix::Identity(n, n);
    if (has_tag(tags, OpTag::unitary) && max_abs(m.adjoint() * m - eye) >= kAlgebraTol) {
        throw std::invalid_argument("operator tagged unitary violates U†U = 1");
    }
    if (has_tag(tags, OpTag::hermitian) && max_abs(m - m.adjoint()) >= kAlgebraTol) {
        throw std::invalid_argument("operator tagged hermitian violates H = H†");
    }
    if (has_tag(tags, OpTag::projector) &&
        (max_abs(m * m - m) >= kAlgebraTol || max_abs(m - m.adjoint()) >= kAlgebraTol)) {
        throw std::invalid_argument("operator tagged projector violates P² = P = P†");
    }
}

}  // namespace

SubsystemSpec SubsystemSpec::make(std::string label, std::vector<std::string> basis_names,
                                  std::vector<std::pair<std::string, int>> aliases) {
    SubsystemSpec spec;
    spec.label = std::move(label);
    spec.dim = static_cast<int>(basis_names.size());
    spec.basis_names = std::move(basis_names);
    spec.aliases = std::move(aliases);
    if (spec.label.empty()) {
        throw std::invalid_argument("subsystem label must be non-empty");
    }
    if (spec.dim < 2) {
        throw std::invalid_argument("subsystem '" + spec.label + "' needs dim >= 2");
    }
    for (std::size_t i = 0; i < spec.basis_names.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.basis_names.size(); ++j) {
            if (spec.basis_names[i] == spec.basis_names[j]) {
                throw std::invalid_argument("duplicate basis name '" + spec.basis_names[i] +
                                            "' in subsystem '" + spec.label + "'");
            }
        }
    }
    for (const auto& [name, idx] : spec.aliases) {
        if (idx < 0 || idx >= spec.dim) {
            throw std::invalid_argument("alias '" + name + "' points outside subsystem '" +
                                        spec.label + "'");
        }
    }
    return spec;
}

SubsystemSpec SubsystemSpec::spin() {
    return make("spin", {"up", "dn"});
}

int SubsystemSpec::basis_index(const std::string& name) const {
    for (int i = 0; i < dim; ++i) {
        if (basis_names[static_cast<std::size_t>(i)] == name) {
            return i;
        }
    }
    for (const auto& [alias, idx] : aliases) {
        if (alias == name) {
            return idx;
        }
    }
    throw std::invalid_argument("unknown basis name '" + name + "' in subsystem '" + label + "'");
}

bool SubsystemSpec::operator==(const SubsystemSpec& other) const {
    return label == other.label && dim == other.dim && basis_names == other.basis_names;
}

int ProductSpace::subsystem_index(const std::string& label) const {
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        if (subsystems[i].label == label) {
            return static_cast<int>(i);
        }
    }
    throw std::invalid_argument("unknown subsystem label '" + label + "'");
}

const SubsystemSpec& ProductSpace::subsystem(const std::string& label) const {
    return subsystems[static_cast<std::size_t>(subsystem_index(label))];
}

int ProductSpace::stride(int k) const {
    int s = 1;
    for (std::size_t i = static_cast<std::size_t>(k) + 1; i < subsystems.size(); ++i) {
        s *= subsystems[i].dim;
    }
    return s;
}

int ProductSpace::flat_index(const std::vector<int>& digits) const {
    if (digits.size() != subsystems.size()) {
        throw std::invalid_argument("digit count does not match subsystem count");
    }
    int flat = 0;
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        if (digits[i] < 0 || digits[i] >= subsystems[i].dim) {
            throw std::invalid_argument("basis digit out of range for subsystem '" +
                                        subsystems[i].label + "'");
        }
        flat = flat * subsystems[i].dim + digits[i];
    }
    return flat;
}

std::vector<int> ProductSpace::digits_of(int flat) const {
    std::vector<int> digits(subsystems.size(), 0);
    for (std::size_t i = subsystems.size(); i-- > 0;) {
        digits[i] = flat % subsystems[i].dim;
        flat /= subsystems[i].dim;
    }
    return digits;
}

bool ProductSpace::operator==(const ProductSpace& other) const {
    return total_dim == other.total_dim && subsystems == other.subsystems;
}

ProductSpace make_space(std::vector<SubsystemSpec> subsystems) {
    if (subsystems.empty()) {
        throw std::invalid_argument("a product space needs at least one subsystem");
    }
    ProductSpace space;
    space.total_dim = 1;
    for (auto& sub : subsystems) {
        if (sub.dim < 2) {
            throw std::invalid_argument("subsystem '" + sub.label + "' needs dim >= 2");
        }
        space.total_dim *= sub.dim;
    }
    for (std::size_t i = 0; i < subsystems.size(); ++i) {
        for (std::size_t j = i + 1; j < subsystems.size(); ++j) {
            if (subsystems[i].label == subsystems[j].label) {
                throw std::invalid_argument("duplicate subsystem label '" + subsystems[i].label +
                                            "'");
            }
        }
    }
    if (space.total_dim > 64) {
        throw std::invalid_argument("total dimension " + std::to_string(space.total_dim) +
                                    " exceeds the supported limit of 64");
    }
    space.subsystems = std::move(subsystems);
    return space;
}

StateVector::StateVector(ProductSpace space_, Vector amplitudes_)
    : space(std::move(space_)), amplitudes(std::move(amplitudes_)) {
    if (amplitudes.size() != static_cast<Eigen::Index>(space.total_dim)) {
        throw std::invalid_argument("amplitude count does not match space dimension");
    }
    if (std::abs(amplitudes.norm() - 1.0) >= kAlgebraTol) {
        throw std::invalid_argument("state vector is not unit norm");
    }
}

StateVector StateVector::normalized(ProductSpace space, Vector amplitudes) {
    const double norm = amplitudes.norm();
    if (norm < kZeroNormTol) {
        throw std::invalid_argument("cannot normalize a (near-)zero vector");
    }
    return StateVector(std::move(space), amplitudes / norm);
}

ElementOperator::ElementOperator(ProductSpace space_, Matrix matrix_, OpTag tags_)
    : space(std::move(space_)), matrix(std::move(matrix_)), tags(tags_) {
    validate_tags(space, matrix, tags);
}

ElementOperator ElementOperator::adjoint() const {
    return ElementOperator(space, matrix.adjoint(), tags);
}

ElementOperator ElementOperator::with_tags(OpTag new_tags) const {
    return ElementOperator(space, matrix, new_tags);
}

ElementOperator identity_op(const ProductSpace& space) {
    return ElementOperator(space, Matrix::Identity(space.total_dim, space.total_dim),
                           OpTag::unitary | OpTag::hermitian | OpTag::projector);
}

ElementOperator compose(const ElementOperator& a, const ElementOperator& b) {
    if (!(a.space == b.space)) {
        throw std::invalid_argument("cannot compose operators on different spaces");
    }
    const OpTag tags = (has_tag(a.tags, OpTag::unitary) && has_tag(b.tags, OpTag::unitary))
                           ? OpTag::unitary
                           : OpTag::none;
    return ElementOperator(a.space, a.matrix * b.matrix, tags);
}

StateVector basis_state(const ProductSpace& space, const std::vector<std::string>& labels) {
    if (labels.size() != space.subsystems.size()) {
        throw std::invalid_argument("need exactly one basis name per subsystem");
    }
    std::vector<int> digits(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        digits[i] = space.subsystems[i].basis_index(labels[i]);
    }
    Vector v = Vector::Zero(space.total_dim);
    v(space.flat_index(digits)) = Complex(1.0, 0.0);
    return StateVector(space, std::move(v));
}

StateVector superpose(const std::vector<std::pair<Complex, StateVector>>& terms) {
    if (terms.empty()) {
        throw std::invalid_argument("superpose needs at least one term");
    }
    const ProductSpace& space = terms.front().second.space;
    Vector sum = Vector::Zero(space.total_dim);
    for (const auto& [coeff, state] : terms) {
        if (!(state.space == space)) {
            throw std::invalid_argument("superpose terms live on different spaces");
        }
        sum += coeff * state.amplitudes;
    }
    if (sum.norm() < kZeroNormTol) {
        throw std::invalid_argument("superposition cancels to the zero vector");
    }
    return StateVector::normalized(space, std::move(sum));
}

ElementOperator embed_op(const ProductSpace& space, const std::vector<std::string>& targets,
                         const Matrix& local, OpTag tags) {
    if (targets.empty()) {
        throw std::invalid_argument("embed_op needs at least one target subsystem");
    }
    std::vector<int> positions;
    positions.reserve(targets.size());
    int local_dim = 1;
    for (const auto& label : targets) {
        const int pos = space.subsystem_index(label);
        for (int seen : positions) {
            if (seen == pos) {
                throw std::invalid_argument("target subsystem '" + label + "' listed twice");
            }
        }
        positions.push_back(pos);
        local_dim *= space.subsystems[static_cast<std::size_t>(pos)].dim;
    }
    if (local.rows() != local_dim || local.cols() != local_dim) {
        throw std::invalid_argument("local matrix dimension does not match target subsystems");
    }

    const int n = space.total_dim;
    Matrix full = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        const std::vector<int> rd = space.digits_of(r);
        for (int c = 0; c < n; ++c) {
            const std::vector<int> cd = space.digits_of(c);
            bool spectator_match = true;
            for (std::size_t k = 0; k < rd.size(); ++k) {
                bool is_target = false;
                for (int pos : positions) {
                    if (pos == static_cast<int>(k)) {
                        is_target = true;
                        break;
                    }
                }
                if (!is_target && rd[k] != cd[k]) {
                    spectator_match = false;
                    break;
                }
            }
            if (!spectator_match) {
                continue;
            }
            int lr = 0;
            int lc = 0;
            for (int pos : positions) {
                const int d = space.subsystems[static_cast<std::size_t>(pos)].dim;
                lr = lr * d + rd[static_cast<std::size_t>(pos)];
                lc = lc * d + cd[static_cast<std::size_t>(pos)];
            }
            full(r, c) = local(lr, lc);
        }
    }
    return ElementOperator(space, std::move(full), tags);
}

ElementOperator embed_op(const ProductSpace& space, const std::string& target,
                         const Matrix& local, OpTag tags) {
    return embed_op(space, std::vector<std::string>{target}, local, tags);
}

StateVector apply(const ElementOperator& op, const StateVector& psi) {
    if (!(op.space == psi.space)) {
        throw std::invalid_argument("operator and state live on different spaces");
    }
    Vector out = op.matrix * psi.amplitudes;
    if (has_tag(op.tags, OpTag::projector)) {
        const double weight = out.squaredNorm();
        if (weight < kZeroNormTol) {
            throw std::runtime_error("projection onto an orthogonal subspace (zero probability)");
        }
        out /= std::sqrt(weight);
    }
    return StateVector(op.space, std::move(out));
}

double projection_probability(const ElementOperator& op, const StateVector& psi) {
    if (!(op.space == psi.space)) {
        throw std::invalid_argument("operator and state live on different spaces");
    }
    return (op.matrix * psi.amplitudes).squaredNorm();
}

Complex expectation(const ElementOperator& op, const StateVector& psi) {
    if (!(op.space == psi.space)) {
        throw std::invalid_argument("operator and state live on different spaces");
    }
    const Complex value = psi.amplitudes.dot(op.matrix * psi.amplitudes);
    if (has_tag(op.tags, OpTag::hermitian)) {
        if (std::abs(value.imag()) >= kAlgebraTol) {
            throw std::runtime_error("hermitian expectation has a non-vanishing imaginary part");
        }
        return Complex(value.real(), 0.0);
    }
    return value;
}

double expectation_real(const ElementOperator& op, const StateVector& psi) {
    if (!has_tag(op.tags, OpTag::hermitian)) {
        throw std::invalid_argument("expectation_real needs a hermitian-tagged operator");
    }
    return expectation(op, psi).real();
}

ElementOperator exp_i(const ElementOperator& h, double t) {
    if (!has_tag(h.tags, OpTag::hermitian)) {
        throw std::invalid_argument("exp_i needs a hermitian-tagged operator");
    }
    const int n = h.space.total_dim;
    Matrix a = Complex(0.0, -1.0) * t * h.matrix;

    // Scale until the infinity norm is comfortable for the Taylor series,
    // sum terms until they fall below the truncation tolerance, then square
    // the scaling back out.
    int squarings = 0;
    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    while (norm > 0.5 && squarings < 60) {
        a *= 0.5;
        norm *= 0.5;
        ++squarings;
    }

    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k <= 40; ++k) {
        term = (term * a) / static_cast<double>(k);
        result += term;
        if (max_abs(term) < kSeriesTol * 1e-3) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return ElementOperator(h.space, std::move(result), OpTag::unitary);
}

}  // namespace nisim
