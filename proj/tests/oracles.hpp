// Test-local dense-algebra oracles, written independently of the library's
// embedding and exponential code paths so they can vouch for them.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Matrix kron(const std::vector<Matrix>& factors) {
    Matrix out = Matrix::Identity(1, 1);
    for (const auto& factor : factors) {
        out = kron(out, factor);
    }
    return out;
}

inline Matrix dyad(int dim, int row, int col) {
    Matrix out = Matrix::Zero(dim, dim);
    out(row, col) = 1.0;
    return out;
}

inline Matrix eye(int dim) {
    return Matrix::Identity(dim, dim);
}

inline Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix sigma_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline Complex dense_expectation(const Vector& psi, const Matrix& op) {
    return psi.dot(op * psi);
}

}  // namespace oracles
