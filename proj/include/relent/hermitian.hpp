#pragma once

// Dense complex linear algebra for Hermitian operators: a cyclic Jacobi
// eigensolver, spectral matrix functions, tensor/partial operations and the
// trace/operator norms.

#include "relent/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace relent {

struct EigenDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns paired with eigenvalues
};

// Cyclic Jacobi diagonalization of a complex Hermitian matrix. The input is
// rescaled to unit max-entry, so the off-diagonal stopping threshold
// 1e-13 * N acts relative to the matrix scale.
inline EigenDecomposition eig_hermitian(const Matrix& h) {
    require_hermitian(h);
    const Eigen::Index n = h.rows();

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix::Identity(n, n);
    if (n == 1) {
        out.eigenvalues[0] = h(0, 0).real();
        return out;
    }

    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        out.eigenvalues.setZero();
        return out;
    }

    Matrix a = (0.5 / scale) * (h + h.adjoint());
    Matrix& v = out.eigenvectors;
    const double thr = 1e-13 * static_cast<double>(n);
    const double skip = thr / (8.0 * static_cast<double>(n) * static_cast<double>(n));

    Vector colp(n), colq(n);
    Eigen::RowVectorXcd rowp(n), rowq(n);

    bool converged = false;
    for (int sweep = 0; sweep < 128 && !converged; ++sweep) {
        double lower2 = 0.0;
        for (Eigen::Index q = 1; q < n; ++q) {
            for (Eigen::Index p = 0; p < q; ++p) lower2 += std::norm(a(q, p));
        }
        if (std::sqrt(2.0 * lower2) <= thr) {
            converged = true;
            break;
        }
        for (Eigen::Index q = 1; q < n; ++q) {
            for (Eigen::Index p = 0; p < q; ++p) {
                const Complex b = a(p, q);
                const double ab = std::abs(b);
                if (ab <= skip) continue;

                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * ab);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex phase = b / ab;

                colp = a.col(p);
                colq = a.col(q);
                a.col(p) = c * colp - (s * std::conj(phase)) * colq;
                a.col(q) = (s * phase) * colp + c * colq;

                rowp = a.row(p);
                rowq = a.row(q);
                a.row(p) = c * rowp - (s * phase) * rowq;
                a.row(q) = (s * std::conj(phase)) * rowp + c * rowq;

                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = Complex(a(p, p).real(), 0.0);
                a(q, q) = Complex(a(q, q).real(), 0.0);

                colp = v.col(p);
                colq = v.col(q);
                v.col(p) = c * colp - (s * std::conj(phase)) * colq;
                v.col(q) = (s * phase) * colp + c * colq;
            }
        }
    }
    if (!converged) {
        double lower2 = 0.0;
        for (Eigen::Index q = 1; q < n; ++q) {
            for (Eigen::Index p = 0; p < q; ++p) lower2 += std::norm(a(q, p));
        }
        if (std::sqrt(2.0 * lower2) > thr) {
            throw ConvergenceFailure("eig_hermitian: Jacobi sweeps exhausted");
        }
    }

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&a](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });

    Matrix sorted(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues[k] = scale * a(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(k)]).real();
        sorted.col(k) = v.col(idx[static_cast<std::size_t>(k)]);
    }
    out.eigenvectors = std::move(sorted);
    return out;
}

// V f(diag) V^dagger for a spectral function applied to a Hermitian matrix.
template <typename F>
inline Matrix spectral_map(const EigenDecomposition& ed, F&& f) {
    const Eigen::Index n = ed.eigenvalues.size();
    RealVector mapped(n);
    for (Eigen::Index i = 0; i < n; ++i) mapped[i] = f(ed.eigenvalues[i]);
    return hermitize(ed.eigenvectors * mapped.asDiagonal() * ed.eigenvectors.adjoint());
}

// Natural logarithm of a strictly positive Hermitian matrix.
inline Matrix matrix_log(const Matrix& h) {
    const EigenDecomposition ed = eig_hermitian(h);
    if (ed.eigenvalues.minCoeff() <= tol::spectral_floor) {
        throw NonPositiveSpectrum("matrix_log: eigenvalue at or below the spectral floor");
    }
    return spectral_map(ed, [](double x) { return std::log(x); });
}

// Transposition of the B-subsystem index pair; trace- and
// hermiticity-preserving involution.
inline Matrix partial_transpose(const Matrix& m, const BipartiteDims& dims) {
    require_valid(dims);
    const int da = dims.dim_a, db = dims.dim_b;
    if (m.rows() != dims.total() || m.cols() != dims.total()) {
        throw DimensionMismatch("partial_transpose: matrix does not match dims");
    }
    Matrix out(m.rows(), m.cols());
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k)
                for (int l = 0; l < db; ++l)
                    out(i * db + k, j * db + l) = m(i * db + l, j * db + k);
    return out;
}

inline double trace_norm(const Matrix& m) {
    return eig_hermitian(m).eigenvalues.cwiseAbs().sum();
}

inline double operator_norm(const Matrix& m) {
    return eig_hermitian(m).eigenvalues.cwiseAbs().maxCoeff();
}

// Kronecker product, A-major index convention: (i,k),(j,l) -> A(i,j)B(k,l).
inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
    const Eigen::Index ra = a.rows(), ca = a.cols();
    const Eigen::Index rb = b.rows(), cb = b.cols();
    Matrix out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i)
        for (Eigen::Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    return out;
}

inline Vector tensor_product_vec(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

enum class Subsystem { a, b };

inline Matrix partial_trace(const Matrix& m, const BipartiteDims& dims, Subsystem which) {
    require_valid(dims);
    const int da = dims.dim_a, db = dims.dim_b;
    if (m.rows() != dims.total() || m.cols() != dims.total()) {
        throw DimensionMismatch("partial_trace: matrix does not match dims");
    }
    if (which == Subsystem::b) {
        Matrix out = Matrix::Zero(da, da);
        for (int i = 0; i < da; ++i)
            for (int j = 0; j < da; ++j)
                for (int k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
        return out;
    }
    Matrix out = Matrix::Zero(db, db);
    for (int k = 0; k < db; ++k)
        for (int l = 0; l < db; ++l)
            for (int i = 0; i < da; ++i) out(k, l) += m(i * db + k, i * db + l);
    return out;
}

}  // namespace relent
