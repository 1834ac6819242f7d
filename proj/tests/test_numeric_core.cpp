#include <doctest.h>

#include <random>

#include "magnuseff/eig.hpp"
#include "oracle_helpers.hpp"

using namespace magnuseff;

namespace {

Mat diag3(double a, double b, double c) {
    Mat m(3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

Mat pauli_x() {
    Mat m(2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

Mat pauli_y() {
    Mat m(2);
    m(0, 1) = cplx(0.0, -1.0);
    m(1, 0) = cplx(0.0, 1.0);
    return m;
}

Mat pauli_z() {
    Mat m(2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

} // namespace

TEST_CASE("sinc: values and series/direct branch agreement") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::abs(sinc(M_PI)) <= 1e-15);
    // high-precision series evaluation of sin(0.5)/0.5
    CHECK(sinc(0.5) == doctest::Approx(0.9588510772084060).epsilon(1e-15));

    // continuity across the |x| = 1e-4 branch switch: both branches agree
    const double x = 1e-4;
    const double direct = std::sin(x) / x;
    const double series = 1.0 - x * x / 6.0 + x * x * x * x / 120.0 - std::pow(x, 6) / 5040.0;
    CHECK(std::abs(direct - series) <= 1e-15);
    CHECK(std::abs(sinc(std::nextafter(x, 0.0)) - sinc(std::nextafter(x, 1.0))) <= 1e-12);
}

TEST_CASE("herm_eig: already-diagonal and Pauli-x cases") {
    const EigResult e = herm_eig(HermitianMatrix(diag3(-1.0, 0.0, 2.0)));
    CHECK(e.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(e.eigenvalues[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(e.eigenvalues[2] == doctest::Approx(2.0).epsilon(1e-15));

    const EigResult px = herm_eig(HermitianMatrix(pauli_x()));
    CHECK(px.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(px.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("herm_eig: reconstruction and Eigen cross-check on random Hermitian") {
    std::mt19937 rng(20240811);
    for (int dim = 2; dim <= 5; ++dim) {
        for (int rep = 0; rep < 25; ++rep) {
            const Mat h = oracle::random_hermitian(rng, dim, 2.0);
            const HermitianMatrix hm(h);
            const EigResult e = herm_eig(hm);

            // H = V diag(λ) V†
            Mat rebuilt(dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    cplx s = 0.0;
                    for (int k = 0; k < dim; ++k)
                        s += e.vectors(i, k) * e.eigenvalues[static_cast<std::size_t>(k)] *
                             std::conj(e.vectors(j, k));
                    rebuilt(i, j) = s;
                }
            const double scale = std::max(h.max_abs(), 1e-300);
            CHECK((rebuilt - h).max_abs() <= 1e-12 * scale);

            // unitarity of V
            CHECK((e.vectors.adjoint() * e.vectors - Mat::identity(dim)).max_abs() <= 1e-13);

            // ascending order and agreement with an independent solver
            const auto ref = oracle::eigen_hermitian_eigenvalues(h);
            for (int k = 0; k < dim; ++k) {
                if (k > 0)
                    CHECK(e.eigenvalues[static_cast<std::size_t>(k)] >=
                          e.eigenvalues[static_cast<std::size_t>(k - 1)]);
                CHECK(e.eigenvalues[static_cast<std::size_t>(k)] ==
                      doctest::Approx(ref[static_cast<std::size_t>(k)]).epsilon(1e-12).scale(scale));
            }
        }
    }
}

TEST_CASE("herm_eig: full-capacity dimension") {
    std::mt19937 rng(88);
    const Mat h = oracle::random_hermitian(rng, 8, 1.5);
    const EigResult e = herm_eig(HermitianMatrix(h));
    Mat rebuilt(8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 8; ++k)
                s += e.vectors(i, k) * e.eigenvalues[static_cast<std::size_t>(k)] *
                     std::conj(e.vectors(j, k));
            rebuilt(i, j) = s;
        }
    CHECK((rebuilt - h).max_abs() <= 1e-12 * h.max_abs());
    const auto ref = oracle::eigen_hermitian_eigenvalues(h);
    for (int k = 0; k < 8; ++k)
        CHECK(e.eigenvalues[static_cast<std::size_t>(k)] ==
              doctest::Approx(ref[static_cast<std::size_t>(k)]).epsilon(1e-11));
}

TEST_CASE("herm_eig: lambda Hamiltonian splittings at delta=0 match the closed form") {
    // δ=0, Δ=1, Ω₀=Ω₁=0.3: x = 0.045, splittings (√1.18 ∓ 1)/2
    Mat h(3);
    h(2, 2) = 1.0;
    h(0, 2) = 0.15;
    h(2, 0) = 0.15;
    h(1, 2) = 0.15;
    h(2, 1) = 0.15;
    const EigResult e = herm_eig(HermitianMatrix(h));
    const double root = std::sqrt(1.18);
    CHECK(e.eigenvalues[1] - e.eigenvalues[0] == doctest::Approx(0.5 * (root - 1.0)).epsilon(1e-13));
    CHECK(e.eigenvalues[2] - e.eigenvalues[1] == doctest::Approx(0.5 * (root + 1.0)).epsilon(1e-13));
    CHECK(0.5 * (root - 1.0) == doctest::Approx(0.0431390245600108).epsilon(1e-12));
}

TEST_CASE("expm_hermitian: identity at t=0, diagonal phases, Pauli rotation") {
    std::mt19937 rng(7);
    const Mat h = oracle::random_hermitian(rng, 3, 1.0);
    const UnitaryMatrix u0 = expm_hermitian(HermitianMatrix(h), 0.0);
    CHECK((u0.m() - Mat::identity(3)).max_abs() <= 1e-14);

    const Mat d = diag3(0.3, -1.2, 2.0);
    const UnitaryMatrix ud = expm_hermitian(HermitianMatrix(d), 0.7);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(ud.m()(i, i) - std::polar(1.0, -d(i, i).real() * 0.7)) <= 1e-14);

    // exp(−iσx t) = cos(t)𝟙 − i sin(t)σx
    const double t = 0.83;
    const UnitaryMatrix ux = expm_hermitian(HermitianMatrix(pauli_x()), t);
    Mat expect = std::cos(t) * Mat::identity(2) + cplx(0.0, -std::sin(t)) * pauli_x();
    CHECK((ux.m() - expect).max_abs() <= 1e-14);
}

TEST_CASE("expm_hermitian: group property exp(−iH(s+t)) = exp(−iHs)exp(−iHt)") {
    std::mt19937 rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        const HermitianMatrix h(oracle::random_hermitian(rng, 4, 1.5));
        const double s = 0.9, t = 1.7;
        const Mat lhs = expm_hermitian(h, s + t).m();
        const Mat rhs = expm_hermitian(h, s).m() * expm_hermitian(h, t).m();
        CHECK((lhs - rhs).max_abs() <= 1e-11);
    }
}

TEST_CASE("spectral_norm: identity, diagonal, lambda coupling, SVD oracle") {
    CHECK(spectral_norm(Mat::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spectral_norm(diag3(3.0, -4.0, 0.0)) == doctest::Approx(4.0).epsilon(1e-12));

    // H̃(0) for Ω₀=Ω₁=Ω real: ‖H̃‖ = Ω/√2 (dense SVD oracle)
    const double omega = 0.3;
    Mat ht(3);
    ht(0, 2) = 0.5 * omega;
    ht(2, 0) = 0.5 * omega;
    ht(1, 2) = 0.5 * omega;
    ht(2, 1) = 0.5 * omega;
    CHECK(spectral_norm(ht) == doctest::Approx(oracle::eigen_spectral_norm(ht)).epsilon(1e-12));
    CHECK(spectral_norm(ht) == doctest::Approx(omega / std::sqrt(2.0)).epsilon(1e-12));

    std::mt19937 rng(1234);
    for (int rep = 0; rep < 20; ++rep) {
        std::normal_distribution<double> dist(0.0, 1.0);
        Mat m(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = cplx(dist(rng), dist(rng));
        CHECK(spectral_norm(m) ==
              doctest::Approx(oracle::eigen_spectral_norm(m)).epsilon(1e-10));
        // unitary invariance
        const Mat u = oracle::random_unitary(rng, 3);
        CHECK(spectral_norm(u * m) == doctest::Approx(spectral_norm(m)).epsilon(1e-10));
    }
}

TEST_CASE("commutator: algebra basics") {
    std::mt19937 rng(5);
    const Mat a = oracle::random_hermitian(rng, 3, 1.0);
    CHECK(commutator(a, a).max_abs() <= 1e-15);

    const Mat lhs = commutator(pauli_x(), pauli_y());
    const Mat rhs = cplx(0.0, 2.0) * pauli_z();
    CHECK((lhs - rhs).max_abs() <= 1e-15);

    const Mat b = oracle::random_hermitian(rng, 3, 1.0);
    CHECK((commutator(a, b) + commutator(b, a)).max_abs() <= 1e-15);

    Mat wrong(2);
    CHECK_THROWS_AS((void)commutator(a, wrong), DimensionError);
}

TEST_CASE("wrapper types: invariants enforced on construction") {
    Mat m(2);
    m(0, 1) = cplx(0.0, 0.5);
    m(1, 0) = cplx(0.0, 0.5); // not Hermitian: (1,0) should be −0.5i
    CHECK_THROWS_AS(HermitianMatrix{m}, NumericsError);

    Mat u = Mat::identity(2);
    u(0, 0) = 1.1;
    CHECK_THROWS_AS(UnitaryMatrix{u}, NumericsError);

    Mat bad(2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(HermitianMatrix{bad}, NumericsError);

    const Vec psi = Vec::basis(3, 0);
    CHECK(psi.norm() == doctest::Approx(1.0));
}
