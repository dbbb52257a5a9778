#include "sscopic/density.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "sscopic/bootstrap.hpp"
#include "sscopic/error.hpp"

namespace sscopic {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kPsdTol = -1e-10;
constexpr double kTraceTol = 1e-12;
constexpr double kCoherenceTol = 1e-10;
constexpr double kWeightFloor = 1e-14;

using Index = Eigen::Index;

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

// Orthonormal basis of C^n whose leading columns span the given vectors
// (which must already be orthonormal).
Eigen::MatrixXcd complete_basis(const std::vector<Eigen::VectorXcd>& leading, Index n) {
    Eigen::MatrixXcd q(n, n);
    Index cols = 0;
    for (const auto& v : leading) q.col(cols++) = v;
    for (Index e = 0; e < n && cols < n; ++e) {
        Eigen::VectorXcd cand = Eigen::VectorXcd::Unit(n, e);
        // Two passes of Gram-Schmidt for stability.
        for (int pass = 0; pass < 2; ++pass)
            for (Index c = 0; c < cols; ++c) cand -= q.col(c) * q.col(c).dot(cand);
        const double norm = cand.norm();
        if (norm < 1e-8) continue;
        q.col(cols++) = cand / norm;
    }
    return q;
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho, std::vector<double> basis)
    : rho_(std::move(rho)), basis_(std::move(basis)) {
    require(rho_.rows() == rho_.cols() && rho_.rows() >= 1, ErrorCode::InvalidArgument,
            "DensityMatrix: must be square and nonempty");
    if (basis_.empty()) {
        basis_.resize(static_cast<std::size_t>(rho_.rows()));
        std::iota(basis_.begin(), basis_.end(), 0.0);
    }
    require(basis_.size() == static_cast<std::size_t>(rho_.rows()), ErrorCode::InvalidArgument,
            "DensityMatrix: basis label count mismatch");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= kHermitianTol, ErrorCode::InvalidArgument, "DensityMatrix: not Hermitian");
    const double trace = rho_.trace().real();
    require(std::abs(trace - 1.0) <= kTraceTol, ErrorCode::InvalidArgument, "DensityMatrix: trace is not 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(rho_), Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= kPsdTol, ErrorCode::InvalidArgument,
            "DensityMatrix: not positive semidefinite");
}

bool offdiagonal_coherence(const DensityMatrix& rho, std::size_t i, std::size_t j) {
    require(i < rho.dimension() && j < rho.dimension(), ErrorCode::InvalidArgument,
            "offdiagonal_coherence: index out of range");
    require(i != j, ErrorCode::InvalidArgument, "offdiagonal_coherence: need i != j");
    return std::abs(rho(i, j)) > kCoherenceTol;
}

Decomposition appendix_a_decompose(const DensityMatrix& rho, std::size_t i, std::size_t j) {
    require(i < rho.dimension() && j < rho.dimension() && i != j, ErrorCode::InvalidArgument,
            "appendix_a_decompose: need distinct in-range indices");
    if (offdiagonal_coherence(rho, i, j)) {
        std::ostringstream os;
        os << "appendix_a_decompose: |rho(" << i << "," << j << ")| = " << std::abs(rho(i, j))
           << " > 1e-10, no decomposition exists";
        fail(ErrorCode::CoherencePresent, os.str());
    }
    const Index d = static_cast<Index>(rho.dimension());
    const auto ii = static_cast<Index>(i), jj = static_cast<Index>(j);

    // Purification: |Psi> = sum_k sqrt(eta_k) |psi_k> |k_B>, stored as the
    // d x d coefficient matrix M(x, k) = sqrt(eta_k) <x|psi_k>.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(rho.matrix()));
    const Eigen::VectorXd eta = es.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXcd m = es.eigenvectors() * eta.cwiseSqrt().asDiagonal();

    // Ancilla vectors attached to x_i and x_j: |1~_B>_k = sqrt(eta_k) c_{k,i}
    // (row i of M), likewise for x_j. They are orthogonal because rho_ij = 0.
    const Eigen::VectorXcd one = m.row(ii).transpose();
    const Eigen::VectorXcd two = m.row(jj).transpose();
    std::vector<Eigen::VectorXcd> leading;
    const double n1 = one.norm(), n2 = two.norm();
    if (n1 > 0.0) leading.push_back(one / n1);
    if (n2 > 0.0) {
        Eigen::VectorXcd t = two / n2;
        if (n1 > 0.0) t -= leading[0] * leading[0].dot(t);  // removes the ~1e-16 residual overlap
        leading.push_back(t.normalized());
    }
    const Eigen::MatrixXcd basis = complete_basis(leading, d);

    // <b|Psi> as a system vector is M * conj(b); each term of the partial trace
    // is its outer product.
    Eigen::MatrixXcd part1 = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd part2 = Eigen::MatrixXcd::Zero(d, d);
    for (Index c = 0; c < d; ++c) {
        const Eigen::VectorXcd v = m * basis.col(c).conjugate();
        const Eigen::MatrixXcd term = v * v.adjoint();
        if (c == 0 && n1 > 0.0)
            part1 += term;
        else
            part2 += term;
    }
    part1 = hermitian_part(part1);
    part2 = hermitian_part(part2);
    // Support conditions hold analytically; clear the rounding residue.
    part1.row(jj).setZero();
    part1.col(jj).setZero();
    part2.row(ii).setZero();
    part2.col(ii).setZero();

    Decomposition out;
    out.w1 = part1.trace().real();
    out.w2 = part2.trace().real();
    const double total = out.w1 + out.w2;
    out.w1 /= total;
    out.w2 = 1.0 - out.w1;
    if (out.w1 > kWeightFloor) {
        part1 /= part1.trace().real();
        out.rho1.emplace(part1, rho.basis());
    } else {
        out.w1 = 0.0;
        out.w2 = 1.0;
    }
    if (out.w2 > kWeightFloor) {
        part2 /= part2.trace().real();
        out.rho2.emplace(part2, rho.basis());
    } else {
        out.w2 = 0.0;
        out.w1 = 1.0;
    }
    return out;
}

double reconstruction_error(const DensityMatrix& rho, const Decomposition& d) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(rho.matrix().rows(), rho.matrix().cols());
    if (d.rho1) sum += d.w1 * d.rho1->matrix();
    if (d.rho2) sum += d.w2 * d.rho2->matrix();
    return (sum - rho.matrix()).cwiseAbs().maxCoeff();
}

DensityMatrix random_density_matrix(std::size_t d, std::size_t rank, std::uint64_t seed) {
    require(d >= 1 && rank >= 1 && rank <= d, ErrorCode::InvalidArgument, "random_density_matrix: need 1 <= rank <= d");
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd g(static_cast<Index>(d), static_cast<Index>(rank));
    for (Index r = 0; r < g.rows(); ++r)
        for (Index c = 0; c < g.cols(); ++c) g(r, c) = {normal(rng), normal(rng)};
    Eigen::MatrixXcd rho = hermitian_part(g * g.adjoint());
    rho /= rho.trace().real();
    return DensityMatrix(rho);
}

DensityMatrix random_incoherent_pair(std::size_t d, std::size_t rank, std::size_t i, std::size_t j,
                                     std::uint64_t seed) {
    require(i < d && j < d && i != j, ErrorCode::InvalidArgument, "random_incoherent_pair: bad indices");
    Eigen::MatrixXcd rho = random_density_matrix(d, rank, seed).matrix();
    const auto ii = static_cast<Index>(i), jj = static_cast<Index>(j);
    for (int iter = 0; iter < 10000; ++iter) {
        rho(ii, jj) = rho(jj, ii) = 0.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(rho));
        const Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
        rho = hermitian_part(es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint());
        rho /= rho.trace().real();
        if (std::abs(rho(ii, jj)) <= 1e-12) {
            rho(ii, jj) = rho(jj, ii) = 0.0;
            rho /= rho.trace().real();
            return DensityMatrix(rho);
        }
    }
    fail(ErrorCode::InvalidArgument, "random_incoherent_pair: projection did not converge");
}

}  // namespace sscopic
