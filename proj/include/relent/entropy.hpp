#pragma once

// Scalar entropy functionals in nats: von Neumann entropy, relative entropy
// with support handling, eta, and the entropy/value continuity bounds.

#include "relent/states.hpp"

#include <cmath>
#include <limits>

namespace relent {

// eta(s) = -s ln s on [0, 1], eta(0) = 0.
inline double eta(double s) {
    if (s < -1e-12 || s > 1.0 + 1e-12) {
        throw OutOfDomain("eta: argument outside [0, 1]");
    }
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return -s * std::log(s);
}

namespace detail {

inline double entropy_of_spectrum(const RealVector& lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double x = lambda[i];
        if (x > tol::spectral_floor) s -= x * std::log(x);
    }
    return s < 0.0 ? 0.0 : s;
}

// Relative entropy on raw matrices given a precomputed entropy of sigma.
// Returns +infinity when sigma has weight above the support tolerance on the
// null space of rho; weights below it are numerical noise and projected out.
inline double relative_entropy_impl(const Matrix& sigma, double s1_sigma, const Matrix& rho) {
    const EigenDecomposition er = eig_hermitian(rho);
    double cross = 0.0;  // -tr(sigma log rho)
    for (Eigen::Index i = 0; i < er.eigenvalues.size(); ++i) {
        const double w =
            std::max((er.eigenvectors.col(i).adjoint() * sigma * er.eigenvectors.col(i))(0).real(), 0.0);
        const double mu = er.eigenvalues[i];
        if (mu <= tol::spectral_floor) {
            if (w > tol::support_weight) return std::numeric_limits<double>::infinity();
            continue;
        }
        cross -= w * std::log(mu);
    }
    const double s = cross - s1_sigma;
    return s < 0.0 ? 0.0 : s;
}

}  // namespace detail

// S1(sigma) = -tr(sigma ln sigma), in [0, ln N].
inline double von_neumann_entropy(const DensityMatrix& sigma) {
    return detail::entropy_of_spectrum(eig_hermitian(sigma.matrix).eigenvalues);
}

// S(sigma|rho) = tr sigma ln sigma - tr sigma ln rho. Finite iff the support
// of sigma lies inside the support of rho; +infinity is returned as a value,
// not thrown, so callers can compare against it.
inline double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho) {
    if (!(sigma.dims == rho.dims)) throw DimensionMismatch("relative_entropy: dims differ");
    const double s1 = von_neumann_entropy(sigma);
    return detail::relative_entropy_impl(sigma.matrix, s1, rho.matrix);
}

// Entropy continuity bound T ln N + eta(T), valid for T <= 1/3.
inline double fannes_bound(double T, int n) {
    if (T < -1e-12 || T > 1.0 / 3.0 + 1e-12) {
        throw OutOfDomain("fannes_bound: T outside [0, 1/3]");
    }
    if (n < 1) throw DimensionMismatch("fannes_bound: N must be >= 1");
    const double t = std::min(std::max(T, 0.0), 1.0 / 3.0);
    return t * std::log(static_cast<double>(n)) + eta(t);
}

// Value continuity bound 2(T ln N + eta(T)) + 4T, valid for T <= 1/3.
inline double continuity_bound(double T, int n) {
    const double t = std::min(std::max(T, 0.0), 1.0 / 3.0);
    return 2.0 * fannes_bound(T, n) + 4.0 * t;
}

}  // namespace relent
