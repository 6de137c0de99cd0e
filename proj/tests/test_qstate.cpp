#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "nisim/elements.hpp"
#include "nisim/qstate.hpp"
#include "oracles.hpp"

using namespace nisim;

namespace {

constexpr double kPi = 3.14159265358979323846;

ProductSpace spin_only() {
    return make_space({SubsystemSpec::spin()});
}

Matrix random_matrix(int dim, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            m(i, j) = Complex(u(rng), u(rng));
        }
    }
    return m;
}

ElementOperator random_hermitian(const ProductSpace& space, std::mt19937& rng) {
    Matrix m = random_matrix(space.total_dim, rng);
    return ElementOperator(space, Matrix((m + m.adjoint()) / 2.0), OpTag::hermitian);
}

}  // namespace

TEST_CASE("make_space computes total dimensions") {
    CHECK(spin_only().total_dim == 2);
    CHECK(mwp_space().total_dim == 4);
    CHECK(rf3_space().total_dim == 18);
    CHECK_THROWS(make_space({}));
    CHECK_THROWS(SubsystemSpec::make("path", {"only"}));
    CHECK_THROWS(make_space({SubsystemSpec::spin(), SubsystemSpec::spin()}));
}

TEST_CASE("basis_state follows the first-subsystem-slowest convention") {
    const StateVector up = basis_state(spin_only(), {"up"});
    CHECK(up.amplitudes(0) == Complex(1.0, 0.0));
    CHECK(up.amplitudes(1) == Complex(0.0, 0.0));

    // Aliased path names resolve to the same slots.
    const StateVector dn_d = basis_state(mwp_space(), {"dn", "d"});
    CHECK(dn_d.amplitudes(3) == Complex(1.0, 0.0));
    CHECK(dn_d.amplitudes.cwiseAbs().sum() == doctest::Approx(1.0));

    // index = (0*3 + 0)*3 + 1 for up, path 0, middle energy state
    const StateVector mid = basis_state(rf3_space(), {"up", "0", "E0"});
    CHECK(mid.amplitudes(1) == Complex(1.0, 0.0));

    CHECK_THROWS(basis_state(spin_only(), {"sideways"}));
    CHECK_THROWS(basis_state(mwp_space(), {"up"}));
}

TEST_CASE("superpose normalizes and rejects cancellation") {
    const ProductSpace space = spin_only();
    const StateVector plus = superpose({{1.0, basis_state(space, {"up"})},
                                        {1.0, basis_state(space, {"dn"})}});
    CHECK(std::abs(plus.amplitudes(0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(plus.amplitudes(1)) == doctest::Approx(1.0 / std::sqrt(2.0)));

    CHECK_THROWS(superpose({{1.0, basis_state(space, {"up"})},
                            {-1.0, basis_state(space, {"up"})}}));
    CHECK_THROWS(superpose({{1.0, basis_state(space, {"up"})},
                            {1.0, basis_state(mwp_space(), {"up", "a"})}}));

    const ProductSpace mwp = mwp_space();
    const StateVector input = superpose({{1.0, basis_state(mwp, {"up", "a"})},
                                         {1.0, basis_state(mwp, {"dn", "a"})}});
    CHECK(input.amplitudes(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(input.amplitudes(2).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("embed_op matches Kronecker oracles") {
    const ProductSpace space = mwp_space();
    const ElementOperator sz = embed_op(space, "spin", oracles::sigma_z(),
                                        OpTag::hermitian | OpTag::unitary);
    CHECK(oracles::max_abs_diff(sz.matrix,
                                oracles::kron(oracles::sigma_z(), oracles::eye(2))) < 1e-15);
    CHECK(sz.matrix(0, 0) == Complex(1, 0));
    CHECK(sz.matrix(3, 3) == Complex(-1, 0));

    const double chi = 0.37;
    Matrix phase = Matrix::Identity(2, 2);
    phase(1, 1) = Complex(std::cos(chi), std::sin(chi));
    const ElementOperator up = embed_op(space, "path", phase, OpTag::unitary);
    CHECK(oracles::max_abs_diff(up.matrix, oracles::kron(oracles::eye(2), phase)) < 1e-15);

    const ProductSpace sp3 =
        make_space({SubsystemSpec::spin(), SubsystemSpec::make("path", {"0", "1", "2"})});
    const ElementOperator p1 = embed_op(sp3, "path", oracles::dyad(3, 1, 1), OpTag::projector);
    CHECK(oracles::max_abs_diff(p1.matrix,
                                oracles::kron(oracles::eye(2), oracles::dyad(3, 1, 1))) <
          1e-15);
    CHECK(std::abs(p1.matrix.trace() - Complex(2.0, 0.0)) < 1e-15);

    CHECK_THROWS(embed_op(space, "spin", Matrix::Identity(3, 3)));
    CHECK_THROWS(embed_op(space, "energy", Matrix::Identity(2, 2)));
}

TEST_CASE("embed_op handles non-adjacent and permuted targets") {
    const ProductSpace space = make_space({SubsystemSpec::make("a", {"0", "1"}),
                                           SubsystemSpec::make("b", {"0", "1", "2"}),
                                           SubsystemSpec::make("c", {"0", "1"})});
    std::mt19937 rng(5);
    const Matrix local = random_matrix(4, rng);  // acts on (c, a), c slowest

    // Oracle route: permutation matrix into (c, a, b) ordering, then kron.
    Matrix perm = Matrix::Zero(12, 12);
    for (int ia = 0; ia < 2; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
            for (int ic = 0; ic < 2; ++ic) {
                const int from = (ia * 3 + ib) * 2 + ic;
                const int to = (ic * 2 + ia) * 3 + ib;
                perm(to, from) = 1.0;
            }
        }
    }
    const Matrix expected = perm.adjoint() * oracles::kron(local, oracles::eye(3)) * perm;

    const ElementOperator embedded = embed_op(space, std::vector<std::string>{"c", "a"}, local);
    CHECK(oracles::max_abs_diff(embedded.matrix, expected) < 1e-12);
}

TEST_CASE("embedding composes multiplicatively on a shared target") {
    std::mt19937 rng(17);
    for (const char* target : {"path", "energy"}) {
        const ProductSpace space = rf3_space();
        const int dim = space.subsystem(target).dim;
        const Matrix a = random_matrix(dim, rng);
        const Matrix b = random_matrix(dim, rng);
        const Matrix lhs = embed_op(space, target, a).matrix * embed_op(space, target, b).matrix;
        const Matrix rhs = embed_op(space, target, Matrix(a * b)).matrix;
        CHECK(oracles::max_abs_diff(lhs, rhs) < 1e-12);
    }
    std::mt19937 rng2(18);
    const ProductSpace two = mwp_space();
    const Matrix a = random_matrix(2, rng2);
    const Matrix b = random_matrix(2, rng2);
    const Matrix lhs = embed_op(two, "spin", a).matrix * embed_op(two, "spin", b).matrix;
    CHECK(oracles::max_abs_diff(lhs, embed_op(two, "spin", Matrix(a * b)).matrix) < 1e-12);
}

TEST_CASE("apply: identity, flips, and projector renormalization") {
    const ProductSpace space = spin_only();
    const StateVector up = basis_state(space, {"up"});
    CHECK((apply(identity_op(space), up).amplitudes - up.amplitudes).norm() < 1e-15);

    const ElementOperator sx = embed_op(space, "spin", oracles::sigma_x(),
                                        OpTag::unitary | OpTag::hermitian);
    CHECK(std::abs(apply(sx, up).amplitudes(1) - Complex(1, 0)) < 1e-15);

    const ElementOperator p0 = projector_plus(space, "spin", PlaneAngle::of(0.0));
    const StateVector tilted = superpose({{0.9, basis_state(space, {"up"})},
                                          {0.1, basis_state(space, {"dn"})}});
    const StateVector projected = apply(p0, tilted);
    CHECK(projected.amplitudes.norm() == doctest::Approx(1.0));

    // orthogonal branch: project |dn>-only state onto the minus direction
    const StateVector minus = superpose({{1.0, basis_state(space, {"up"})},
                                         {-1.0, basis_state(space, {"dn"})}});
    CHECK_THROWS(apply(p0, minus));
}

TEST_CASE("unitary chains preserve norm unaided") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const ProductSpace space = rf3_space();
    StateVector psi = basis_state(space, {"up", "0", "E0"});
    for (int step = 0; step < 20; ++step) {
        ElementOperator u = (step % 2 == 0)
                                ? exp_i(random_hermitian(space, rng), angle(rng))
                                : phase_shifter(space, "path", angle(rng), BasisPair{"1", "2"});
        psi = apply(u, psi);
    }
    CHECK(std::abs(psi.amplitudes.norm() - 1.0) < 1e-9);
}

TEST_CASE("expectation values against dense oracles") {
    const ProductSpace space = spin_only();
    const StateVector plus = superpose({{1.0, basis_state(space, {"up"})},
                                        {1.0, basis_state(space, {"dn"})}});
    const ElementOperator sx = embed_op(space, "spin", oracles::sigma_x(),
                                        OpTag::unitary | OpTag::hermitian);
    CHECK(expectation_real(sx, plus) == doctest::Approx(1.0));

    const ProductSpace mwp = mwp_space();
    const StateVector bell = superpose({{1.0, basis_state(mwp, {"up", "c"})},
                                        {1.0, basis_state(mwp, {"dn", "d"})}});
    const Matrix sxsx = oracles::kron(oracles::sigma_x(), oracles::sigma_x());
    CHECK(oracles::dense_expectation(bell.amplitudes, sxsx).real() == doctest::Approx(1.0));
    const ElementOperator both = embed_op(mwp, std::vector<std::string>{"spin", "path"}, sxsx,
                                          OpTag::hermitian);
    CHECK(expectation_real(both, bell) == doctest::Approx(1.0));

    CHECK_THROWS(expectation(sx, basis_state(mwp, {"up", "a"})));
}

TEST_CASE("GHZ projector products give the 2^-n fringe law") {
    const ProductSpace space = rf3_space();
    const StateVector ghz = superpose({{1.0, basis_state(space, {"up", "1", "E-"})},
                                       {1.0, basis_state(space, {"dn", "2", "E+"})}});
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int i = 0; i < 25; ++i) {
        const double a = angle(rng);
        const double c = angle(rng);
        const double g = angle(rng);
        const Matrix product =
            projector_plus(space, "spin", PlaneAngle::of(a)).matrix *
            projector_plus(space, "path", PlaneAngle::of(c), BasisPair{"1", "2"}).matrix *
            projector_plus(space, "energy", PlaneAngle::of(g), BasisPair{"E-", "E+"}).matrix;
        const double expected = (1.0 + std::cos(a + c + g)) / 8.0;
        CHECK(oracles::dense_expectation(ghz.amplitudes, product).real() ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("projector expectations stay inside [0, 1]") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const ProductSpace space = rf3_space();
    for (int i = 0; i < 40; ++i) {
        Vector raw(space.total_dim);
        for (int k = 0; k < space.total_dim; ++k) {
            raw(k) = Complex(u(rng), u(rng));
        }
        const StateVector psi = StateVector::normalized(space, std::move(raw));
        const char* subsystem = (i % 2 == 0) ? "path" : "energy";
        const BasisPair pair = (i % 2 == 0) ? BasisPair{"0", "2"} : BasisPair{"E-", "E0"};
        const double value = expectation_real(
            projector_plus(space, subsystem, PlaneAngle::of(angle(rng)), pair), psi);
        CHECK(value >= -1e-12);
        CHECK(value <= 1.0 + 1e-12);
    }
}

TEST_CASE("exp_i: trivial angle and tag enforcement") {
    const ProductSpace space = rf2_space();
    const ElementOperator h = rf2_hamiltonian(space);
    const ElementOperator one = exp_i(h, 0.0);
    CHECK(oracles::max_abs_diff(one.matrix, Matrix::Identity(6, 6)) < 1e-14);
    CHECK(has_tag(one.tags, OpTag::unitary));

    const ElementOperator skew = embed_op(space, "path", oracles::dyad(3, 0, 1));
    CHECK_THROWS(exp_i(skew, 1.0));
}

TEST_CASE("exp_i reproduces the three-mode closed form") {
    const ProductSpace space = rf3_space();
    const ElementOperator h = rf3_hamiltonian(space);

    // Independent construction from projector sums: 1 - i(V_up + V_dn).
    const Matrix t = oracles::dyad(3, 1, 2) + oracles::dyad(3, 0, 1);
    const Matrix p_up_pe =
        oracles::kron(oracles::dyad(3, 0, 0), oracles::dyad(3, 1, 1)) +
        oracles::kron(oracles::dyad(3, 0, 0), oracles::dyad(3, 2, 2)) +
        oracles::kron(oracles::dyad(3, 1, 1), oracles::dyad(3, 0, 0)) +
        oracles::kron(oracles::dyad(3, 1, 1), oracles::dyad(3, 1, 1));
    const Matrix p_dn_pe =
        oracles::kron(oracles::dyad(3, 0, 0), oracles::dyad(3, 0, 0)) +
        oracles::kron(oracles::dyad(3, 0, 0), oracles::dyad(3, 1, 1)) +
        oracles::kron(oracles::dyad(3, 2, 2), oracles::dyad(3, 1, 1)) +
        oracles::kron(oracles::dyad(3, 2, 2), oracles::dyad(3, 2, 2));
    const Complex i(0, 1);
    const Matrix v_up = oracles::kron(
        oracles::dyad(2, 0, 0),
        Matrix(oracles::kron(oracles::dyad(3, 1, 0), t) +
               oracles::kron(oracles::dyad(3, 0, 1), Matrix(t.adjoint())) - i * p_up_pe));
    const Matrix v_dn = oracles::kron(
        oracles::dyad(2, 1, 1),
        Matrix(oracles::kron(oracles::dyad(3, 0, 2), t) +
               oracles::kron(oracles::dyad(3, 2, 0), Matrix(t.adjoint())) - i * p_dn_pe));
    const Matrix closed = Matrix::Identity(18, 18) - i * (v_up + v_dn);

    CHECK(oracles::max_abs_diff(exp_i(h, kPi / 2).matrix, closed) < 1e-10);

    // H^3 = H for this transition Hamiltonian.
    CHECK(oracles::max_abs_diff(Matrix(h.matrix * h.matrix * h.matrix), h.matrix) < 1e-12);
}

TEST_CASE("exp_i reproduces the two-mode closed form") {
    const ProductSpace space = rf2_space();
    const ElementOperator h = rf2_hamiltonian(space);

    const Matrix p_up2 = oracles::kron(oracles::dyad(2, 0, 0), oracles::dyad(3, 2, 2));
    const Matrix p_dn1 = oracles::kron(oracles::dyad(2, 1, 1), oracles::dyad(3, 1, 1));
    const Matrix hops = oracles::kron(oracles::dyad(2, 0, 0), oracles::dyad(3, 1, 0)) +
                        oracles::kron(oracles::dyad(2, 1, 1), oracles::dyad(3, 2, 0));
    const Matrix closed =
        p_up2 + p_dn1 - Complex(0, 1) * (hops + Matrix(hops.adjoint()));

    CHECK(oracles::max_abs_diff(exp_i(h, kPi / 2).matrix, closed) < 1e-10);

    // H^2 = 1 - P_up2 - P_dn1.
    const Matrix h2 = h.matrix * h.matrix;
    CHECK(oracles::max_abs_diff(h2, Matrix(Matrix::Identity(6, 6) - p_up2 - p_dn1)) < 1e-12);
}

TEST_CASE("operator tag validation rejects wrong claims") {
    const ProductSpace space = spin_only();
    Matrix not_unitary(2, 2);
    not_unitary << 1, 1, 0, 1;
    CHECK_THROWS(ElementOperator(space, not_unitary, OpTag::unitary));
    CHECK_THROWS(ElementOperator(space, not_unitary, OpTag::hermitian));
    CHECK_THROWS(ElementOperator(space, not_unitary, OpTag::projector));
    CHECK_NOTHROW(ElementOperator(space, not_unitary, OpTag::none));
}
