#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sscopic {

// Units: x = a + a^dagger, p = (a - a^dagger)/i, so the vacuum has unit
// variance in both quadratures and the uncertainty bound reads
// var_x * var_p >= 1 (equivalently var_x + var_p >= 2).
inline constexpr double kVacuumVariance = 1.0;
inline constexpr double kProductBound = 1.0;
inline constexpr double kSumBound = 2.0;

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// One piece of a mixture law: weight, mean and variance of the component.
struct MixtureComponent {
    double weight = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Mass, conditional mean and conditional variance of a law restricted to a
/// region. An empty region has prob == 0 and NaN mean/variance.
struct RegionMoments {
    double prob = 0.0;
    double mean = 0.0;
    double variance = 0.0;

    bool empty() const noexcept { return !(prob > 0.0); }
};

/// A one-dimensional outcome law for a quadrature.
///
/// Analytic kinds (Gaussian, GaussianMixture, CatFringe) evaluate pdf, cdf and
/// region moments in closed form or by adaptive quadrature. Empirical holds a
/// sorted sample; Discrete holds a law on a finite set of points (used for
/// grid wavefunctions).
class Distribution {
public:
    enum class Kind { Gaussian, GaussianMixture, CatFringe, Empirical, Discrete };

    static Distribution gaussian(double mean, double variance);
    static Distribution gaussian_mixture(std::vector<MixtureComponent> components);
    /// p-quadrature law of the cat state: exp(-p^2/2) (1 + sin 2 alpha p) / sqrt(2 pi).
    static Distribution cat_fringe(double alpha);
    static Distribution empirical(std::vector<double> samples);
    static Distribution discrete(std::vector<double> points, std::vector<double> masses);

    Kind kind() const noexcept { return kind_; }
    bool is_analytic() const noexcept;

    /// Gaussian components (a plain Gaussian is a one-component mixture).
    std::span<const MixtureComponent> components() const noexcept { return components_; }
    double alpha() const noexcept { return alpha_; }
    /// Sorted sample values (Empirical) or support points (Discrete).
    std::span<const double> values() const noexcept { return values_; }
    /// Point masses (Discrete only; empty otherwise).
    std::span<const double> masses() const noexcept { return masses_; }

    /// Density for analytic kinds; throws InvalidArgument for sample-based kinds.
    double pdf(double x) const;
    /// Cumulative distribution P(X <= x). Empirical and Discrete use the step cdf.
    double cdf(double x) const;
    /// Analytic kinds use closed forms; Empirical the unbiased sample
    /// estimator; Discrete the exact moments of the point law.
    Moments moments() const;
    double stdev() const;

    /// Moments of the law restricted to the region between lo and hi.
    /// Closedness of each end matters only for sample-based kinds.
    RegionMoments region(double lo, bool lo_closed, double hi, bool hi_closed) const;

private:
    Distribution() = default;

    Kind kind_ = Kind::Gaussian;
    std::vector<MixtureComponent> components_;
    double alpha_ = 0.0;
    std::vector<double> values_;
    std::vector<double> masses_;
};

Moments moments(const Distribution& dist);

/// Mass, mean and variance of N(mean, variance) restricted to [lo, hi].
/// lo/hi may be infinite. Mass below 1e-300 is reported as an empty region.
RegionMoments truncated_gaussian_moments(double mean, double variance, double lo, double hi);

/// Standard normal cdf and density.
double normal_cdf(double z);
double normal_pdf(double z);

/// Theorem-1 summary of a law for a given outcome separation S.
///
/// Regions: minus is x <= -S/2, zero is |x| < S/2, plus is x >= S/2.
/// When a side region carries no probability its mean is pinned to the
/// boundary (+-S/2) and its variance to zero; the flags record this.
struct BinnedStats {
    double S = 0.0;
    double p_minus = 0.0;
    double p_zero = 0.0;
    double p_plus = 0.0;
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    double var_plus = 0.0;
    double var_minus = 0.0;
    double var_ave = 0.0;
    double delta = 0.0;
    bool plus_empty = false;
    bool minus_empty = false;
};

/// delta = (mu_+ + S/2)^2 + (mu_- - S/2)^2 + S^2/2 + var_+ + var_-.
double binned_delta(double S, double mu_plus, double mu_minus, double var_plus, double var_minus);

/// Assemble BinnedStats from the three region summaries, applying the
/// empty-bin convention.
BinnedStats assemble_binned(double S, const RegionMoments& minus, const RegionMoments& zero,
                            const RegionMoments& plus);

BinnedStats bin_stats(const Distribution& dist, double S);

/// Sorted, optionally weighted sample with prefix sums for O(log n) region
/// queries. Variances are population (weighted) variances. Bootstrap
/// replicas reuse the sort through reweighted().
class SampleSummary {
public:
    explicit SampleSummary(std::span<const double> values);

    /// Same sorted values with new per-point weights (aligned with values()).
    SampleSummary reweighted(std::span<const double> weights) const;

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double total_weight() const noexcept;
    Moments moments() const;
    RegionMoments region(double lo, bool lo_closed, double hi, bool hi_closed) const;
    BinnedStats bin_stats(double S) const;

private:
    SampleSummary() = default;
    void build_prefix(std::span<const double> weights);

    std::vector<double> values_;
    double shift_ = 0.0;
    std::vector<long double> w_, wx_, wxx_;  // prefix sums, size n+1
};

/// Exact mixture variance: sum w_i v_i + 1/2 sum_{i != j} w_i w_j (m_i - m_j)^2.
/// Weights must be nonnegative and sum to 1 within 1e-12.
double mixture_variance(std::span<const MixtureComponent> components);

/// Paired (pA, pB) quadrature records with per-pair weights (uniform by default).
class JointSamples {
public:
    JointSamples(std::vector<double> pa, std::vector<double> pb);
    JointSamples(std::vector<double> pa, std::vector<double> pb, std::vector<double> weights);

    /// Weighted merge: L carries total weight wL and R carries 1 - wL.
    /// Zero-weight pairs are dropped.
    static JointSamples merge(const JointSamples& left, const JointSamples& right, double w_left);

    std::size_t size() const noexcept { return pa_.size(); }
    std::span<const double> pa() const noexcept { return pa_; }
    std::span<const double> pb() const noexcept { return pb_; }
    /// Normalised weights (sum to 1).
    std::span<const double> weights() const noexcept { return weights_; }
    bool uniform() const noexcept { return uniform_; }

    JointSamples reweighted(std::span<const double> weights) const;

private:
    void validate();

    std::vector<double> pa_, pb_, weights_;
    bool uniform_ = true;
};

/// Variance of pA - g pB over the pairs.
double linear_inference_variance(const JointSamples& joint, double gain);

/// g = <pA pB> / <pB^2> about raw second moments. Throws
/// DegenerateConditioner when pB has zero variance.
double optimal_gain(const JointSamples& joint);

struct ConditionalInference {
    double variance = 0.0;
    /// Fraction of the total weight in bins that were kept.
    double coverage = 0.0;
    std::size_t bins_used = 0;
};

/// Average conditional variance of pA given pB, binning pB into equal-width
/// bins starting at origin (default: smallest pB). Bins without two distinct
/// records are dropped and the remaining mass renormalised.
ConditionalInference conditional_inference_variance(const JointSamples& joint, double bin_width,
                                                    std::optional<double> origin = std::nullopt);

}  // namespace sscopic
