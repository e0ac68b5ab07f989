#include "relent/convex_sets.hpp"

#include "test_support.hpp"

#include <catch2/catch.hpp>

using namespace relent;

TEST_CASE("validate_density accepts and repairs near-valid input") {
    const BipartiteDims dims{2, 2};
    const DensityMatrix tau = maximally_mixed(dims);
    CHECK_NOTHROW(validate_density(tau.matrix, dims));

    // decimal-truncation-sized violations are repaired
    Matrix m = tau.matrix;
    m(0, 0) += 5e-11;
    m(1, 1) -= 5e-11;
    const DensityMatrix repaired = validate_density(m, dims);
    CHECK(std::abs(repaired.matrix.trace().real() - 1.0) <= 1e-14);
}

TEST_CASE("validate_density rejects invalid input with the right reason") {
    const BipartiteDims dims{1, 2};
    Matrix bad_trace(2, 2);
    bad_trace << 0.5, 0.0, 0.0, 0.6;
    CHECK_THROWS_MATCHES(validate_density(bad_trace, dims), NotDensityMatrix,
                         Catch::Matchers::Predicate<NotDensityMatrix>([](const auto& e) {
                             return e.reason == NotDensityMatrix::Reason::trace;
                         }));

    Matrix bad_psd(2, 2);
    bad_psd << 1.2, 0.0, 0.0, -0.2;
    CHECK_THROWS_MATCHES(validate_density(bad_psd, dims), NotDensityMatrix,
                         Catch::Matchers::Predicate<NotDensityMatrix>([](const auto& e) {
                             return e.reason == NotDensityMatrix::Reason::positivity;
                         }));

    Matrix bad_herm(2, 2);
    bad_herm << 0.5, Complex(0.1, 0.1), Complex(0.1, 0.2), 0.5;
    CHECK_THROWS_MATCHES(validate_density(bad_herm, dims), NotDensityMatrix,
                         Catch::Matchers::Predicate<NotDensityMatrix>([](const auto& e) {
                             return e.reason == NotDensityMatrix::Reason::hermiticity;
                         }));

    CHECK_THROWS_AS(validate_density(Matrix::Identity(3, 3) / 3.0, BipartiteDims{2, 2}),
                    DimensionMismatch);
}

TEST_CASE("maximally mixed state") {
    const DensityMatrix tau = maximally_mixed(BipartiteDims{2, 2});
    CHECK((tau.matrix - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ppt_member(tau));
}

TEST_CASE("bell_state properties") {
    const DensityMatrix bell = bell_state();
    CHECK(bell.matrix.trace().real() == Approx(1.0));
    CHECK((bell.matrix * bell.matrix).trace().real() == Approx(1.0));  // pure

    const Matrix red = partial_trace(bell.matrix, bell.dims, Subsystem::b);
    CHECK((red - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);

    const auto pt_eigs = eig_hermitian(partial_transpose(bell.matrix, bell.dims)).eigenvalues;
    CHECK(pt_eigs[0] == Approx(-0.5).margin(1e-12));
}

TEST_CASE("bell_diagonal family") {
    const DensityMatrix b1 = bell_diagonal({1.0, 0.0, 0.0, 0.0});
    CHECK((b1.matrix - bell_state().matrix).cwiseAbs().maxCoeff() <= 1e-14);

    const DensityMatrix uniform = bell_diagonal({0.25, 0.25, 0.25, 0.25});
    CHECK((uniform.matrix - maximally_mixed(b1.dims).matrix).cwiseAbs().maxCoeff() <= 1e-14);

    // weights (3/4, 1/4, 0, 0): smallest partial-transpose eigenvalue -1/4
    const DensityMatrix mix = bell_diagonal({0.75, 0.25, 0.0, 0.0});
    const auto ev = eig_hermitian(partial_transpose(mix.matrix, mix.dims)).eigenvalues;
    CHECK(ev[0] == Approx(-0.25).margin(1e-12));

    CHECK_THROWS_AS(bell_diagonal({0.5, 0.6, 0.0, 0.0}), NotProbabilityVector);
    CHECK_THROWS_AS(bell_diagonal({-0.1, 0.6, 0.25, 0.25}), NotProbabilityVector);
}

TEST_CASE("random_pure is unit norm and deterministic per seed") {
    const Vector v1 = random_pure(4, 77);
    const Vector v2 = random_pure(4, 77);
    const Vector v3 = random_pure(4, 78);
    CHECK(std::abs(v1.norm() - 1.0) <= 1e-12);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((v1 - v3).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("random_pure Haar first moment") {
    // mean of |psi><psi| over many draws approaches I/dim
    const int dim = 4;
    Matrix acc = Matrix::Zero(dim, dim);
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
        const Vector v = random_pure(dim, 5000 + static_cast<std::uint64_t>(i));
        acc += v * v.adjoint();
    }
    acc /= static_cast<double>(samples);
    CHECK((acc - Matrix::Identity(dim, dim) / dim).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("random_mixed sampling") {
    const BipartiteDims dims{2, 2};

    SECTION("rank 1 is pure") {
        const DensityMatrix rho = random_mixed(dims, 1, 91);
        CHECK((rho.matrix * rho.matrix).trace().real() == Approx(1.0).margin(1e-12));
    }

    SECTION("all outputs validate") {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            for (int rank : {1, 2, 4, 16}) {
                const DensityMatrix rho = random_mixed(dims, rank, 400 + seed);
                CHECK_NOTHROW(validate_density(rho.matrix, dims));
            }
        }
    }

    SECTION("rank N^2 spectra concentrate near uniform") {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const DensityMatrix rho = random_mixed(dims, 16, 600 + seed);
            const auto ev = eig_hermitian(rho.matrix).eigenvalues;
            CHECK(ev.minCoeff() > 0.02);
            CHECK(ev.maxCoeff() < 0.75);
        }
    }

    SECTION("rank bounds enforced") {
        CHECK_THROWS_AS(random_mixed(dims, 0, 1), DimensionMismatch);
        CHECK_THROWS_AS(random_mixed(dims, 17, 1), DimensionMismatch);
    }
}

TEST_CASE("random_product_pure lives in the separable set") {
    const BipartiteDims dims{2, 3};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const DensityMatrix rho = random_product_pure(dims, seed);
        CHECK_NOTHROW(validate_density(rho.matrix, dims));
        CHECK(ppt_member(rho));
        // reduced states are pure
        for (Subsystem s : {Subsystem::a, Subsystem::b}) {
            const Matrix red = partial_trace(rho.matrix, dims, s);
            CHECK((red * red).trace().real() == Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("trace_distance basics and frozen mixing value") {
    const DensityMatrix bell = bell_state();
    const DensityMatrix tau = maximally_mixed(bell.dims);
    CHECK(trace_distance(bell, bell) == Approx(0.0).margin(1e-14));

    // orthogonal pure states
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    const BipartiteDims d12{1, 2};
    CHECK(trace_distance(DensityMatrix{p0, d12}, DensityMatrix{p1, d12}) == Approx(2.0));

    // Bell vs (1-eps) Bell + eps tau at eps = 0.1: 0.1 * tr|bell - tau| = 0.15
    const Matrix mixed = 0.9 * bell.matrix + 0.1 * tau.matrix;
    CHECK(trace_distance(bell, DensityMatrix{mixed, bell.dims}) == Approx(0.15).margin(1e-12));

    CHECK_THROWS_AS(trace_distance(bell, DensityMatrix{Matrix::Identity(2, 2) / 2.0, d12}),
                    DimensionMismatch);
}

TEST_CASE("trace_distance is a metric on random triples") {
    const BipartiteDims dims{2, 2};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const DensityMatrix a = random_mixed(dims, 4, 3 * seed);
        const DensityMatrix b = random_mixed(dims, 4, 3 * seed + 1);
        const DensityMatrix c = random_mixed(dims, 4, 3 * seed + 2);
        const double ab = trace_distance(a, b);
        const double ba = trace_distance(b, a);
        const double ac = trace_distance(a, c);
        const double cb = trace_distance(c, b);
        CHECK(ab == Approx(ba).margin(1e-12));
        CHECK(ab <= ac + cb + 1e-12);
        CHECK(trace_distance(a, a) <= 1e-12);
    }
}

TEST_CASE("tensor_power_cut regroups to the A^n:B^n cut") {
    const DensityMatrix bell = bell_state();

    SECTION("n = 1 is the identity map") {
        const DensityMatrix p1 = tensor_power_cut(bell, 1);
        CHECK((p1.matrix - bell.matrix).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("spectrum and trace preserved, reduced state maximally mixed") {
        const DensityMatrix p2 = tensor_power_cut(bell, 2);
        CHECK(p2.dims == BipartiteDims{4, 4});
        CHECK(p2.matrix.trace().real() == Approx(1.0).margin(1e-12));
        CHECK((p2.matrix * p2.matrix).trace().real() == Approx(1.0).margin(1e-12));
        const Matrix red = partial_trace(p2.matrix, p2.dims, Subsystem::b);
        CHECK((red - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SECTION("product state powers stay product across the cut") {
        const DensityMatrix prod = random_product_pure(BipartiteDims{2, 2}, 17);
        const DensityMatrix p2 = tensor_power_cut(prod, 2);
        const Matrix ra = partial_trace(p2.matrix, p2.dims, Subsystem::b);
        CHECK((ra * ra).trace().real() == Approx(1.0).margin(1e-10));
    }
}
