#pragma once

// Shared helpers for the test suites: random Hermitian generators and an
// independent eigensolver route (Eigen's Householder-based solver) used as an
// oracle against the library's Jacobi implementation.

#include "relent/states.hpp"

#include <Eigen/Eigenvalues>

#include <random>

namespace test_support {

inline relent::Matrix random_hermitian(int n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    relent::Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = relent::Complex(gauss(rng), gauss(rng));
    return relent::hermitize(scale * m);
}

inline Eigen::VectorXd reference_eigenvalues(const relent::Matrix& m) {
    Eigen::SelfAdjointEigenSolver<relent::Matrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

// Well-conditioned full-rank random state: an induced-measure draw mixed
// toward tau.
inline relent::DensityMatrix mixed_toward_tau(const relent::BipartiteDims& dims, std::uint64_t seed,
                                           double tau_weight = 0.3) {
    const relent::DensityMatrix rho = relent::random_mixed(dims, dims.total(), seed);
    const int n = dims.total();
    relent::Matrix m = (1.0 - tau_weight) * rho.matrix +
                    (tau_weight / n) * relent::Matrix::Identity(n, n);
    return relent::DensityMatrix{std::move(m), dims};
}

}  // namespace test_support
