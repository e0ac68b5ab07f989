#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace relent {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Tolerances shared across the library. States are unit-trace, so these are
// absolute on state-scale quantities.
namespace tol {
inline constexpr double hermiticity = 1e-12;     // entrywise |m_ij - conj(m_ji)|
inline constexpr double spectral_floor = 1e-14;  // eigenvalues below count as 0
inline constexpr double support_weight = 1e-10;  // sigma-weight on a null direction
inline constexpr double state_trace = 1e-10;
inline constexpr double state_psd = 1e-10;       // min eigenvalue >= -state_psd
inline constexpr double membership = 1e-9;
inline constexpr double projection = 1e-10;      // Dykstra per-cycle change
}  // namespace tol

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NonPositiveSpectrum : Error {
    using Error::Error;
};
struct NotDensityMatrix : Error {
    enum class Reason { trace, positivity, hermiticity };
    Reason reason;
    NotDensityMatrix(Reason r, const std::string& msg) : Error(msg), reason(r) {}
};
struct NotProbabilityVector : Error {
    using Error::Error;
};
struct OutOfDomain : Error {
    using Error::Error;
};
struct ConvergenceFailure : Error {
    using Error::Error;
};
struct NotInSet : Error {
    using Error::Error;
};
struct SamplingExhausted : Error {
    using Error::Error;
};

struct BipartiteDims {
    int dim_a = 1;
    int dim_b = 1;

    int total() const { return dim_a * dim_b; }
    bool operator==(const BipartiteDims& o) const = default;
};

inline void require_valid(const BipartiteDims& d) {
    if (d.dim_a < 1 || d.dim_b < 1) {
        throw DimensionMismatch("bipartite dims must be >= 1");
    }
}

inline bool is_hermitian(const Matrix& m, double eps = tol::hermiticity) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= eps;
}

inline void require_hermitian(const Matrix& m, double eps = tol::hermiticity) {
    if (m.rows() != m.cols()) {
        throw NotHermitian("matrix is not square");
    }
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > eps) {
        throw NotHermitian("hermiticity violated by " + std::to_string(dev));
    }
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Stable per-task seed derivation (splitmix64); keeps parallel and serial
// batch runs on identical random streams.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

}  // namespace relent
