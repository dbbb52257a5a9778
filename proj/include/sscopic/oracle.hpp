#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sscopic/bootstrap.hpp"
#include "sscopic/states.hpp"
#include "sscopic/stats.hpp"

namespace sscopic {

/// Uniform x-grid: x_i = x_min + i * step, i < count (count a power of two).
struct UniformGrid {
    double x_min = -16.0;
    double step = 1.0 / 32.0;
    std::size_t count = 1024;

    double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * step; }
    /// Conjugate momentum spacing, 4 pi / (count * step), for p = -2i d/dx.
    double p_step() const noexcept;

    /// Symmetric grid with the given half width.
    static UniformGrid centered(double half_width, std::size_t count);
    /// Default 1024 points on [-16, 16), with points and span doubled until
    /// the half width covers 8 standard deviations.
    static UniformGrid for_stdev(double stdev);
};

/// Wavefunction sampled on a uniform grid with sum |psi|^2 step = 1.
class GridWavefunction {
public:
    /// Takes normalised amplitudes; throws InvalidArgument if the norm is
    /// off by more than 1e-9 or the count is not a power of two.
    GridWavefunction(UniformGrid grid, std::vector<std::complex<double>> amplitudes);

    /// Rescales the amplitudes to unit norm first.
    static GridWavefunction normalized(UniformGrid grid, std::vector<std::complex<double>> amplitudes);
    /// Sample a Coherent, Cat or Squeezed wavefunction (grid chosen from its x-spread by default).
    static GridWavefunction discretize(const StateModel& state, std::optional<UniformGrid> grid = std::nullopt);

    const UniformGrid& grid() const noexcept { return grid_; }
    const std::vector<std::complex<double>>& amplitudes() const noexcept { return amps_; }

    /// |psi|^2 step on the grid points.
    Distribution position_law() const;

private:
    UniformGrid grid_;
    std::vector<std::complex<double>> amps_;
};

/// |FT psi|^2 on the conjugate grid (p = -2i d/dx, so the vacuum maps to the
/// vacuum). Throws Resolution when at least 1e-6 of the mass sits in the
/// outermost 5% of either grid.
Distribution momentum_law(const GridWavefunction& psi);

struct UncertaintyAudit {
    double var_x = 0.0;
    double var_p = 0.0;
    double product = 0.0;
};

UncertaintyAudit audit_uncertainty(const GridWavefunction& psi);

/// Outcome of the restricted-mixture soundness fuzz at one S_cap.
struct FuzzReport {
    double s_cap = 0.0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::size_t components = 0;
    std::size_t assertions = 0;
    std::vector<std::string> violations;
    /// Smallest lhs - bound seen for theorem1 product and sum (>= 0 when sound).
    double worst_theorem1_product = 0.0;
    double worst_theorem1_sum = 0.0;
    /// Smallest mixture dp and the smallest dp - 2/S_cap.
    double min_delta_p = 0.0;
    double worst_theorem4 = 0.0;
    /// Largest component var_x / (S_cap^2 / 4) (< 1 for every generated state).
    double max_var_x_ratio = 0.0;
    /// Smallest component var_x * var_p.
    double min_uncertainty_product = 0.0;
    /// Smallest var_p(mixture) - sum w_i var_p_i.
    double worst_dominance = 0.0;

    bool sound() const noexcept { return violations.empty(); }
};

struct FuzzOptions {
    std::size_t max_components = 4;
    /// Grid slack when declaring a violation of the theorem bounds.
    double tolerance = 1e-6;
};

/// Random mixtures of smooth wavefunctions whose supports each have diameter
/// below S_cap, checked against theorem 1 (product and sum, at S >= S_cap),
/// theorem 4 (dp > 2/S_cap), the pure-state bounds and the variance dominance
/// of mixtures. Each trial draws from its own derived seed.
FuzzReport fuzz_restricted_mixtures(double s_cap, std::size_t trials, std::uint64_t seed,
                                    const FuzzOptions& options = {});

/// Concavity of the conditional inference variance under mixing.
struct ConcavityReport {
    double civ_merged = 0.0;
    double civ_left = 0.0;
    double civ_right = 0.0;
    double weighted_parts = 0.0;
    /// civ_merged - (wL civ_left + (1 - wL) civ_right).
    double gap = 0.0;
    double standard_error = 0.0;
    bool holds = false;
};

/// Merges L and R with weights (wL, 1 - wL), bins pB on a shared origin and
/// checks civ(merge) >= wL civ(L) + (1 - wL) civ(R) within k bootstrap
/// standard errors (plus 1e-9 absolute).
ConcavityReport appendix_b_audit(const JointSamples& left, const JointSamples& right, double w_left,
                                 double bin_width, const BootstrapOptions& bootstrap = {});

}  // namespace sscopic
