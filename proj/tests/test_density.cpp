#include <doctest.h>

#include <cmath>

#include "sscopic/density.hpp"
#include "sscopic/error.hpp"

using namespace sscopic;
using doctest::Approx;
using Eigen::MatrixXcd;

namespace {

MatrixXcd projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

Eigen::VectorXcd basis(int d, int i) { return Eigen::VectorXcd::Unit(d, i); }

double min_eigenvalue(const MatrixXcd& m) {
    return Eigen::SelfAdjointEigenSolver<MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("density matrix validation") {
    MatrixXcd m = MatrixXcd::Zero(2, 2);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    CHECK_NOTHROW(DensityMatrix{m});
    MatrixXcd bad_trace = m * 1.1;
    CHECK_THROWS_AS(DensityMatrix{bad_trace}, Error);
    MatrixXcd not_herm = m;
    not_herm(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{not_herm}, Error);
    MatrixXcd negative = m;
    negative(0, 0) = 1.2;
    negative(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityMatrix{negative}, Error);
}

TEST_CASE("coherence between two outcomes") {
    const Eigen::VectorXcd plus = (basis(2, 0) + basis(2, 1)) / std::sqrt(2.0);
    const Eigen::VectorXcd minus = (basis(2, 0) - basis(2, 1)) / std::sqrt(2.0);
    CHECK(offdiagonal_coherence(DensityMatrix(projector(plus)), 0, 1));
    const MatrixXcd mixed = 0.5 * (projector(basis(2, 0)) + projector(basis(2, 1)));
    CHECK_FALSE(offdiagonal_coherence(DensityMatrix(mixed), 0, 1));
    const MatrixXcd pm = 0.5 * (projector(plus) + projector(minus));
    CHECK_FALSE(offdiagonal_coherence(DensityMatrix(pm), 0, 1));
    CHECK_THROWS_AS(offdiagonal_coherence(DensityMatrix(pm), 0, 0), Error);
    CHECK_THROWS_AS(offdiagonal_coherence(DensityMatrix(pm), 0, 2), Error);
}

TEST_CASE("decomposing a diagonal mixture") {
    const MatrixXcd mixed = 0.5 * (projector(basis(2, 0)) + projector(basis(2, 1)));
    const auto d = appendix_a_decompose(DensityMatrix(mixed), 0, 1);
    CHECK(d.w1 == Approx(0.5));
    CHECK(d.w2 == Approx(0.5));
    REQUIRE(d.rho1.has_value());
    CHECK((d.rho1->matrix() - projector(basis(2, 0))).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(d.rho2.has_value());
    CHECK((d.rho2->matrix() - projector(basis(2, 1))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("decomposing a pure state with an empty outcome") {
    Eigen::VectorXcd psi(4);
    psi << std::complex<double>(0.6, 0.0), 0.0, std::complex<double>(0.0, 0.64), 0.48;
    psi.normalize();
    // A single purification term: the state already has no weight on x_1.
    const auto d = appendix_a_decompose(DensityMatrix(projector(psi)), 0, 1);
    CHECK(d.w1 == Approx(1.0).epsilon(1e-12));
    REQUIRE(d.rho1.has_value());
    CHECK((d.rho1->matrix() - projector(psi)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_FALSE(d.rho2.has_value());
    CHECK(reconstruction_error(DensityMatrix(projector(psi)), d) < 1e-12);

    // With c_0 = 0 instead, everything lands in rho2.
    Eigen::VectorXcd phi(3);
    phi << 0.0, 0.8, std::complex<double>(0.0, 0.6);
    const auto e = appendix_a_decompose(DensityMatrix(projector(phi)), 0, 1);
    CHECK(e.w2 == Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(e.rho1.has_value());
}

TEST_CASE("random incoherent pairs decompose exactly") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t rank = 1 + seed % 6;
        const auto rho = random_incoherent_pair(6, rank, 0, 1, seed);
        CHECK(std::abs(rho(0, 1)) <= 1e-12);
        const auto d = appendix_a_decompose(rho, 0, 1);
        CHECK(reconstruction_error(rho, d) < 1e-8);
        CHECK(d.w1 + d.w2 == Approx(1.0).epsilon(1e-12));
        if (d.rho1) {
            for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs((*d.rho1)(1, k)) <= 1e-10);
            CHECK(min_eigenvalue(d.rho1->matrix()) >= -1e-10);
        }
        if (d.rho2) {
            for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs((*d.rho2)(0, k)) <= 1e-10);
            CHECK(min_eigenvalue(d.rho2->matrix()) >= -1e-10);
        }
    }
}

TEST_CASE("other index pairs") {
    const auto rho = random_incoherent_pair(5, 3, 4, 2, 77);
    const auto d = appendix_a_decompose(rho, 4, 2);
    CHECK(reconstruction_error(rho, d) < 1e-8);
    REQUIRE(d.rho1);
    REQUIRE(d.rho2);
    CHECK(std::abs((*d.rho1)(2, 2)) == 0.0);
    CHECK(std::abs((*d.rho2)(4, 4)) == 0.0);
}

TEST_CASE("coherent matrices are refused") {
    int refused = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto rho = random_density_matrix(6, 3, 1000 + seed);
        if (std::abs(rho(0, 1)) <= 1e-6) continue;
        try {
            appendix_a_decompose(rho, 0, 1);
            FAIL("decomposition accepted a coherent matrix");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::CoherencePresent);
            ++refused;
        }
    }
    CHECK(refused > 40);
}
