#pragma once

// Density matrices on bipartite spaces: validation, canonical states and
// seeded random-state sampling.

#include "relent/hermitian.hpp"

#include <array>
#include <cmath>
#include <random>

namespace relent {

struct DensityMatrix {
    Matrix matrix;
    BipartiteDims dims;
};

// Validates trace, positivity and hermiticity. Violations inside tolerance
// (decimal truncation, projection roundoff) are repaired by clipping negative
// eigenvalues and renormalizing; anything larger is rejected.
inline DensityMatrix validate_density(const Matrix& m, const BipartiteDims& dims) {
    require_valid(dims);
    if (m.rows() != dims.total() || m.cols() != dims.total()) {
        throw DimensionMismatch("validate_density: matrix does not match dims");
    }
    if (!is_hermitian(m)) {
        throw NotDensityMatrix(NotDensityMatrix::Reason::hermiticity,
                               "validate_density: not Hermitian");
    }
    const double tr = m.trace().real();
    if (std::abs(tr - 1.0) > tol::state_trace) {
        throw NotDensityMatrix(NotDensityMatrix::Reason::trace,
                               "validate_density: trace " + std::to_string(tr));
    }
    EigenDecomposition ed = eig_hermitian(m);
    const double min_eig = ed.eigenvalues.minCoeff();
    if (min_eig < -tol::state_psd) {
        throw NotDensityMatrix(NotDensityMatrix::Reason::positivity,
                               "validate_density: min eigenvalue " + std::to_string(min_eig));
    }
    // Roundoff-level deviations are not violations; passing them through keeps
    // serialization round trips exact. The repair below handles genuine (but
    // in-tolerance) drift such as decimal truncation.
    if (min_eig >= -1e-14 && std::abs(tr - 1.0) <= 1e-13) {
        return DensityMatrix{m, dims};
    }
    RealVector clipped = ed.eigenvalues.cwiseMax(0.0);
    clipped /= clipped.sum();
    Matrix repaired =
        hermitize(ed.eigenvectors * clipped.asDiagonal() * ed.eigenvectors.adjoint());
    return DensityMatrix{std::move(repaired), dims};
}

inline DensityMatrix maximally_mixed(const BipartiteDims& dims) {
    require_valid(dims);
    const int n = dims.total();
    return DensityMatrix{Matrix::Identity(n, n) / static_cast<double>(n), dims};
}

namespace detail {

// Bell basis Phi+, Phi-, Psi+, Psi- on 2x2.
inline std::array<Vector, 4> bell_basis() {
    const double r = 1.0 / std::sqrt(2.0);
    std::array<Vector, 4> b;
    b[0] = Vector::Zero(4); b[0][0] = r;  b[0][3] = r;
    b[1] = Vector::Zero(4); b[1][0] = r;  b[1][3] = -r;
    b[2] = Vector::Zero(4); b[2][1] = r;  b[2][2] = r;
    b[3] = Vector::Zero(4); b[3][1] = r;  b[3][2] = -r;
    return b;
}

}  // namespace detail

inline DensityMatrix bell_state() {
    const Vector v = detail::bell_basis()[0];
    return DensityMatrix{v * v.adjoint(), BipartiteDims{2, 2}};
}

inline DensityMatrix bell_diagonal(const std::array<double, 4>& p) {
    double sum = 0.0;
    for (double w : p) {
        if (w < -1e-12) throw NotProbabilityVector("bell_diagonal: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw NotProbabilityVector("bell_diagonal: weights sum to " + std::to_string(sum));
    }
    const auto basis = detail::bell_basis();
    Matrix m = Matrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        m += (std::max(p[static_cast<std::size_t>(i)], 0.0) / sum) *
             (basis[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(i)].adjoint());
    }
    return DensityMatrix{hermitize(m), BipartiteDims{2, 2}};
}

// Haar-distributed unit vector: normalized iid standard complex Gaussians.
// Deterministic per seed within one build of the library.
inline Vector random_pure(int dim, std::uint64_t seed) {
    if (dim < 1) throw DimensionMismatch("random_pure: dim must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v[i] = Complex(re, im);
    }
    v /= v.norm();
    return v;
}

// Induced-measure mixed state: partial trace over a rank-dimensional ancilla
// of a Haar-random pure state, realized as GG^dagger / tr with G an
// N x rank complex Gaussian matrix.
inline DensityMatrix random_mixed(const BipartiteDims& dims, int rank, std::uint64_t seed) {
    require_valid(dims);
    const int n = dims.total();
    if (rank < 1 || rank > n * n) {
        throw DimensionMismatch("random_mixed: rank out of range");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(n, rank);
    for (int j = 0; j < rank; ++j)
        for (int i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix{hermitize(m), dims};
}

inline DensityMatrix random_product_pure(const BipartiteDims& dims, std::uint64_t seed) {
    require_valid(dims);
    const Vector a = random_pure(dims.dim_a, derive_seed(seed, 0));
    const Vector b = random_pure(dims.dim_b, derive_seed(seed, 1));
    const Vector ab = tensor_product_vec(a, b);
    return DensityMatrix{ab * ab.adjoint(), dims};
}

// tr|sigma1 - sigma2|: the unnormalized trace distance in [0, 2].
inline double trace_distance(const DensityMatrix& s1, const DensityMatrix& s2) {
    if (!(s1.dims == s2.dims)) throw DimensionMismatch("trace_distance: dims differ");
    return trace_norm(s1.matrix - s2.matrix);
}

// n-fold tensor power regrouped to the A^n : B^n bipartite cut.
inline DensityMatrix tensor_power_cut(const DensityMatrix& s, int n) {
    if (n < 1) throw DimensionMismatch("tensor_power_cut: n must be >= 1");
    const int da = s.dims.dim_a, db = s.dims.dim_b;
    const int nn = s.dims.total();

    double dim_check = 1.0;
    for (int i = 0; i < n; ++i) dim_check *= nn;
    if (dim_check > (1 << 20)) throw DimensionMismatch("tensor_power_cut: power too large");

    Matrix power = s.matrix;
    for (int i = 1; i < n; ++i) power = tensor_product(power, s.matrix);

    const int total = static_cast<int>(dim_check);
    // perm[new] = old: digits (a_1..a_n, b_1..b_n) -> interleaved (a_i b_i).
    std::vector<int> perm(static_cast<std::size_t>(total));
    std::vector<int> adig(static_cast<std::size_t>(n)), bdig(static_cast<std::size_t>(n));
    for (int newi = 0; newi < total; ++newi) {
        int rest = newi;
        for (int i = n - 1; i >= 0; --i) {
            bdig[static_cast<std::size_t>(i)] = rest % db;
            rest /= db;
        }
        for (int i = n - 1; i >= 0; --i) {
            adig[static_cast<std::size_t>(i)] = rest % da;
            rest /= da;
        }
        int old = 0;
        for (int i = 0; i < n; ++i) {
            old = old * nn + adig[static_cast<std::size_t>(i)] * db + bdig[static_cast<std::size_t>(i)];
        }
        perm[static_cast<std::size_t>(newi)] = old;
    }
    Matrix out(total, total);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j)
            out(i, j) = power(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);

    int da_n = 1, db_n = 1;
    for (int i = 0; i < n; ++i) {
        da_n *= da;
        db_n *= db;
    }
    return DensityMatrix{std::move(out), BipartiteDims{da_n, db_n}};
}

}  // namespace relent
