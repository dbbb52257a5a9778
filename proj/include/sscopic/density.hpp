#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace sscopic {

/// Finite density matrix in a discrete x-basis.
///
/// Validated on construction: Hermitian within 1e-12, smallest eigenvalue
/// >= -1e-10, unit trace within 1e-12.
class DensityMatrix {
public:
    explicit DensityMatrix(Eigen::MatrixXcd rho, std::vector<double> basis = {});

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
    const Eigen::MatrixXcd& matrix() const noexcept { return rho_; }
    /// x-labels of the basis states (0, 1, ... when not given).
    const std::vector<double>& basis() const noexcept { return basis_; }

    std::complex<double> operator()(std::size_t i, std::size_t j) const {
        return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXcd rho_;
    std::vector<double> basis_;
};

/// True iff |rho_ij| > 1e-10 (coherence between outcomes x_i and x_j).
bool offdiagonal_coherence(const DensityMatrix& rho, std::size_t i, std::size_t j);

/// rho = w1 rho1 + w2 rho2 with <x_j|rho1|x_j> = 0 and <x_i|rho2|x_i> = 0.
/// A part with zero weight is left empty.
struct Decomposition {
    double w1 = 0.0;
    std::optional<DensityMatrix> rho1;
    double w2 = 0.0;
    std::optional<DensityMatrix> rho2;
};

/// Constructive decomposition for rho_ij = 0: purify rho through its
/// eigendecomposition, split the ancilla into the (orthogonal) vectors
/// attached to x_i and x_j plus a completing basis, and trace the ancilla out
/// term by term. rho1 is the ancilla-|1_B> term; everything else goes to rho2.
/// Throws CoherencePresent when |rho_ij| > 1e-10.
Decomposition appendix_a_decompose(const DensityMatrix& rho, std::size_t i, std::size_t j);

/// Largest absolute entry of w1 rho1 + w2 rho2 - rho.
double reconstruction_error(const DensityMatrix& rho, const Decomposition& d);

/// Random rank-r density matrix of dimension d with entry (i, j) driven to
/// zero by alternating projection (zero the entry, clip negative eigenvalues,
/// renormalise) until |rho_ij| <= 1e-12 and the result is a valid density matrix.
DensityMatrix random_incoherent_pair(std::size_t d, std::size_t rank, std::size_t i, std::size_t j,
                                     std::uint64_t seed);

/// Random rank-r density matrix of dimension d (no constraint).
DensityMatrix random_density_matrix(std::size_t d, std::size_t rank, std::uint64_t seed);

}  // namespace sscopic
