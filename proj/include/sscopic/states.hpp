#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sscopic/stats.hpp"

namespace sscopic {

/// Coherent state |alpha>, alpha real.
struct Coherent {
    double alpha = 0.0;
};

/// Equal superposition of |-alpha> and |alpha> with relative phase i, alpha
/// real. Phases are fixed so the p-law is exp(-p^2/2)(1 + sin 2 alpha p) / sqrt(2 pi).
struct Cat {
    double alpha = 0.0;
};

/// Momentum-squeezed vacuum exp(r(a^2 - a^dagger^2)) |0>, r >= 0.
struct Squeezed {
    double r = 0.0;
};

/// Two-mode squeezed vacuum exp(r(ab - a^dagger b^dagger)) |0>|0>, r >= 0.
struct TwoModeSqueezed {
    double r = 0.0;
};

/// Gaussian x and p laws with the given variances (var_x * var_p >= 1).
struct PhenomGaussian {
    double var_x = 1.0;
    double var_p = 1.0;
};

/// Analytic state family. Construct through make_state() or the helpers to
/// get parameter validation.
class StateModel {
public:
    using Variant = std::variant<Coherent, Cat, Squeezed, TwoModeSqueezed, PhenomGaussian>;

    StateModel(Variant v);  // NOLINT(google-explicit-constructor)

    const Variant& variant() const noexcept { return v_; }
    std::string name() const;

    template <class T>
    bool is() const noexcept {
        return std::holds_alternative<T>(v_);
    }
    template <class T>
    const T& as() const {
        return std::get<T>(v_);
    }

private:
    Variant v_;
};

/// Exact x-quadrature law (X^A for the two-mode state).
Distribution pdf_x(const StateModel& state);

/// Exact p-quadrature law (P^A marginal for the two-mode state).
Distribution pdf_p(const StateModel& state);

/// Laws of (x^A + x^B)/sqrt 2 and (p^A + p^B)/sqrt 2 for the two-mode state.
std::pair<Distribution, Distribution> sum_quadrature_laws(const StateModel& state);

/// Position-basis density-matrix element <x|rho|x2> for Coherent, Cat and Squeezed.
std::complex<double> density_matrix_element(const StateModel& state, double x, double x2);

/// Position wavefunction <x|psi> for Coherent, Cat and Squeezed (used to
/// discretise states on a grid). Coherent uses the normalised form whose
/// modulus squared is the N(2 alpha, 1) law; Cat is (e^{-i pi/4}|-alpha> +
/// e^{i pi/4}|alpha>) / sqrt(2), which matches the fringe law of pdf_p.
std::complex<double> wavefunction(const StateModel& state, double x);

struct TmssInference {
    double gain = 0.0;      // regression gain for p~ = pA - g pB
    double variance = 0.0;  // inference variance of pA given pB
};

/// Closed-form optimal linear inference for the two-mode squeezed state with
/// var(pA) = var(pB) = cosh 2r and cov(pA, pB) = -sinh 2r:
/// gain = -tanh 2r, variance = 1 / cosh 2r.
TmssInference tmss_inference(double r);

/// Joint (pA, pB) second moments of the two-mode squeezed model.
struct JointPMoments {
    double var_a = 0.0;
    double var_b = 0.0;
    double cov = 0.0;
};
JointPMoments tmss_joint_p_moments(double r);

enum class Quadrature { X, P };

/// n i.i.d. draws of one quadrature. Deterministic in (state, n, seed).
std::vector<double> sample(const StateModel& state, Quadrature q, std::size_t n, std::uint64_t seed);

/// n i.i.d. (pA, pB) pairs from the two-mode squeezed model.
JointSamples sample_joint_p(const StateModel& state, std::size_t n, std::uint64_t seed);

/// n i.i.d. draws of the normalised sum quadratures of the two-mode state.
std::vector<double> sample_sum(const StateModel& state, Quadrature q, std::size_t n, std::uint64_t seed);

/// Parses "coherent:A", "cat:A", "squeezed:R", "tmss:R" or "phenom:VX,VP".
StateModel parse_state(std::string_view spec);

}  // namespace sscopic
