#pragma once

// The compact convex sets the solver minimizes over (separable and PPT
// states), the linear-minimization oracles on them, Dykstra projection onto
// the PPT set, and the tau-shift map.

#include "relent/states.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <utility>

namespace relent {

enum class SetKind { sep, ppt };

enum class OracleConfidence { heuristic, certified };

struct ConvexSetSpec {
    SetKind kind = SetKind::sep;
    BipartiteDims dims;
    double x = 1.0;  // mixing weight toward the set; 1-x toward tau
};

struct LinMinResult {
    DensityMatrix atom;
    double value = 0.0;        // tr(G atom)
    double value_lower = 0.0;  // sound lower bound on the true minimum;
                               // equals value when no certificate exists
    int restarts_used = 0;
    OracleConfidence confidence = OracleConfidence::heuristic;
    // Product factors of the atom; set by the separable oracle only.
    Vector factor_a;
    Vector factor_b;
};

inline bool ppt_member(const DensityMatrix& rho, double tolerance = tol::membership) {
    const EigenDecomposition ed = eig_hermitian(partial_transpose(rho.matrix, rho.dims));
    return ed.eigenvalues.minCoeff() >= -tolerance;
}

// x rho + (1-x) tau; min eigenvalue >= (1-x)/N, so the matrix logarithm is
// defined on the image for every x < 1.
inline DensityMatrix shift(const DensityMatrix& rho, double x) {
    if (!(x > 0.0) || x > 1.0) throw OutOfDomain("shift: x outside (0, 1]");
    const int n = rho.dims.total();
    Matrix m = x * rho.matrix;
    m += ((1.0 - x) / static_cast<double>(n)) * Matrix::Identity(n, n);
    return DensityMatrix{std::move(m), rho.dims};
}

namespace detail {

// <b| G |b> conditioned on the B factor: a dA x dA Hermitian operator.
inline Matrix condition_on_b(const Matrix& g, const BipartiteDims& dims, const Vector& b) {
    const int da = dims.dim_a, db = dims.dim_b;
    Matrix out(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out(i, j) = (b.adjoint() * g.block(i * db, j * db, db, db) * b)(0);
    return hermitize(out);
}

inline Matrix condition_on_a(const Matrix& g, const BipartiteDims& dims, const Vector& a) {
    const int da = dims.dim_a, db = dims.dim_b;
    Matrix out = Matrix::Zero(db, db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j) out += std::conj(a[i]) * a[j] * g.block(i * db, j * db, db, db);
    return hermitize(out);
}

struct SeesawPoint {
    Vector a;
    Vector b;
    double value = 0.0;
    bool stalled = false;
};

// Minimum eigenpair of a Hermitian matrix; closed form for 2x2, Jacobi above.
inline double min_eigvec(const Matrix& m, Vector& v) {
    if (m.rows() == 2) {
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const Complex b = m(0, 1);
        const double hdiff = 0.5 * (a - d);
        const double r = std::sqrt(hdiff * hdiff + std::norm(b));
        const double lam = 0.5 * (a + d) - r;
        v.resize(2);
        if (r <= 1e-150) {
            v << 1.0, 0.0;
            return lam;
        }
        // (m - lam I) v = 0; pick the better-conditioned null-space expression
        if (a - lam >= d - lam) {
            v << b, Complex(lam - a, 0.0);
        } else {
            v << Complex(lam - d, 0.0), std::conj(b);
        }
        const double n = v.norm();
        if (n <= 1e-150) {
            v << 1.0, 0.0;
        } else {
            v /= n;
        }
        return lam;
    }
    const EigenDecomposition ed = eig_hermitian(m);
    v = ed.eigenvectors.col(0);
    return ed.eigenvalues[0];
}

// Alternating eigeniteration: each half-step minimizes <a x b|G|a x b> exactly
// over one factor, so the value is monotone nonincreasing.
inline SeesawPoint seesaw(const Matrix& g, const BipartiteDims& dims, Vector b, int max_iters) {
    SeesawPoint pt;
    pt.b = std::move(b);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iters; ++it) {
        min_eigvec(condition_on_b(g, dims, pt.b), pt.a);
        pt.value = min_eigvec(condition_on_a(g, dims, pt.a), pt.b);
        if (prev - pt.value <= 1e-14 * (1.0 + std::abs(pt.value))) {
            pt.stalled = true;
            break;
        }
        prev = pt.value;
    }
    return pt;
}

inline Vector perturb_unit(const Vector& v, double eps, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector out = v;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] += eps * Complex(gauss(rng), gauss(rng));
    }
    out /= out.norm();
    return out;
}

}  // namespace detail

// Linear minimization of tr(G rho) over separable states via alternating
// eigeniterations over the extreme points |a x b><a x b|. Nonconvex, so the
// result is best-over-restarts and flagged heuristic. The valley around the
// minimum can be nearly flat; when `polish` is set, the best fixed point is
// re-seeded with shrinking random kicks, which closes that gap in practice.
inline LinMinResult sep_linmin(const Matrix& g, const BipartiteDims& dims, int restarts,
                               int max_iters, std::uint64_t seed, bool polish = true,
                               const std::vector<std::pair<Vector, Vector>>& warm_starts = {}) {
    require_valid(dims);
    if (g.rows() != dims.total() || g.cols() != dims.total()) {
        throw DimensionMismatch("sep_linmin: matrix does not match dims");
    }
    require_hermitian(g);
    if (restarts < 1) restarts = 1;
    if (max_iters < 1) max_iters = 1;

    // A restart that exhausts its budget while still creeping along a nearly
    // flat valley is kept as a candidate rather than treated as failure; the
    // result is heuristic either way and the polish phase re-seeds from it.
    detail::SeesawPoint best;
    best.value = std::numeric_limits<double>::infinity();

    for (int r = 0; r < restarts; ++r) {
        const Vector b0 = random_pure(dims.dim_b, derive_seed(seed, static_cast<std::uint64_t>(r)));
        detail::SeesawPoint pt = detail::seesaw(g, dims, b0, max_iters);
        if (pt.value < best.value) best = pt;
    }
    for (const auto& [wa, wb] : warm_starts) {
        if (wb.size() != dims.dim_b) continue;
        detail::SeesawPoint pt = detail::seesaw(g, dims, wb, max_iters);
        if (pt.value < best.value) best = pt;
    }

    if (polish) {
        std::mt19937_64 rng(derive_seed(seed, 0xbeefULL));
        for (int round = 0; round < 3; ++round) {
            bool improved = false;
            for (double eps : {0.3, 0.1, 0.03, 0.01}) {
                for (int k = 0; k < 5; ++k) {
                    const Vector b0 = detail::perturb_unit(best.b, eps, rng);
                    detail::SeesawPoint pt = detail::seesaw(g, dims, b0, 60);
                    if (pt.value < best.value - 1e-13) {
                        best = pt;
                        improved = true;
                    }
                }
            }
            if (!improved) break;
        }
    }

    const Vector ab = tensor_product_vec(best.a, best.b);
    LinMinResult out;
    out.atom = DensityMatrix{ab * ab.adjoint(), dims};
    out.value = (ab.adjoint() * g * ab)(0).real();
    out.value_lower = out.value;  // no certificate: nonconvex landscape
    out.restarts_used = restarts;
    out.confidence = OracleConfidence::heuristic;
    out.factor_a = best.a;
    out.factor_b = best.b;
    return out;
}

namespace detail {

inline Matrix psd_clip(const Matrix& m) {
    const EigenDecomposition ed = eig_hermitian(m);
    return spectral_map(ed, [](double x) { return x > 0.0 ? x : 0.0; });
}

}  // namespace detail

// Frobenius-nearest point of the intersection PSD cone / PT-PSD cone /
// unit-trace plane, via Dykstra's corrected alternating projections with the
// fixed cycle order PSD -> PT-PSD -> trace.
inline DensityMatrix dykstra_project_ppt(const Matrix& m, const BipartiteDims& dims,
                                         double tolerance = tol::projection,
                                         int max_iters = 100000) {
    require_valid(dims);
    if (m.rows() != dims.total() || m.cols() != dims.total()) {
        throw DimensionMismatch("dykstra_project_ppt: matrix does not match dims");
    }
    const int n = dims.total();
    Matrix y = hermitize(m);
    Matrix p1 = Matrix::Zero(n, n), p2 = Matrix::Zero(n, n), p3 = Matrix::Zero(n, n);
    Matrix prev = y;

    bool done = false;
    for (int it = 0; it < max_iters; ++it) {
        Matrix z = y + p1;
        y = detail::psd_clip(z);
        p1 = z - y;

        z = y + p2;
        y = partial_transpose(detail::psd_clip(partial_transpose(z, dims)), dims);
        p2 = z - y;

        z = y + p3;
        y = z + ((1.0 - z.trace().real()) / n) * Matrix::Identity(n, n);
        p3 = z - y;

        if ((y - prev).norm() <= tolerance) {
            done = true;
            break;
        }
        prev = y;
    }
    if (!done) throw ConvergenceFailure("dykstra_project_ppt: cycle limit reached");

    Matrix out = detail::psd_clip(y);
    out /= out.trace().real();
    return validate_density(out, dims);
}

// Linear minimization of tr(G omega) over PPT states: projected-gradient
// steps with diminishing step sizes, each projected by Dykstra. The problem
// is convex, and the result always carries a sound lower bound on the true
// minimum: unconditionally max(lambda_min(G), lambda_min(G^Gamma)), tightened
// by the fixed-step optimality estimate
//     min >= tr(G omega+) - ||omega - omega+||_F * diam / alpha_probe
// from probe projections omega+ = P(omega - alpha_probe G). The probe step
// size is held at order one, so the estimate stays resolvable even when
// ||G|| is large. Flagged certified once value - value_lower <= tolerance.
inline LinMinResult ppt_linmin(const Matrix& g, const BipartiteDims& dims, int step_count,
                               double tolerance, const DensityMatrix* init = nullptr) {
    require_valid(dims);
    if (g.rows() != dims.total() || g.cols() != dims.total()) {
        throw DimensionMismatch("ppt_linmin: matrix does not match dims");
    }
    require_hermitian(g);
    if (step_count < 1) step_count = 1;

    const double gnorm = std::max(operator_norm(g), 1e-300);
    const double diam = std::sqrt(2.0);  // Frobenius diameter bound of the state set
    // The objective is linear, so the step size is not curvature-limited;
    // starting at order one keeps the per-step optimality certificate
    //     min >= tr(G omega_{t+1}) - ||omega_{t+1} - omega_t|| diam / alpha
    // resolvable even for large ||G||.
    const double alpha_start = std::max(0.25, 1.0 / gnorm);

    DensityMatrix omega = init != nullptr ? *init : maximally_mixed(dims);
    double value = (omega.matrix * g).trace().real();
    double value_lower =
        std::max(eig_hermitian(g).eigenvalues.minCoeff(),
                 eig_hermitian(partial_transpose(g, dims)).eigenvalues.minCoeff());
    int used = 0;

    for (int t = 0; t < step_count && value - value_lower > tolerance; ++t) {
        const double alpha = alpha_start / std::sqrt(1.0 + t / 16.0);
        const double dyk_tol =
            std::clamp(tolerance * alpha / (diam * 50.0), 1e-12, tol::projection * 10.0);
        DensityMatrix next = dykstra_project_ppt(omega.matrix - alpha * g, dims, dyk_tol);
        const double delta = (next.matrix - omega.matrix).norm();
        omega = std::move(next);
        value = (omega.matrix * g).trace().real();
        value_lower =
            std::max(value_lower, value - (delta + 10.0 * dyk_tol) * diam / alpha);
        used = t + 1;
    }

    LinMinResult out;
    out.value = value;
    out.value_lower = std::min(value_lower, value);
    out.atom = std::move(omega);
    out.restarts_used = used;
    out.confidence = value - out.value_lower <= tolerance ? OracleConfidence::certified
                                                          : OracleConfidence::heuristic;
    return out;
}

}  // namespace relent
