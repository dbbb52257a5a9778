#include "sscopic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sscopic/error.hpp"

namespace sscopic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEmptyMass = 1e-300;
// The cat fringe density is bounded by 2 phi(p); beyond this it is < 1e-300.
constexpr double kCatSupport = 40.0;

RegionMoments empty_region() { return {0.0, kNaN, kNaN}; }

template <class F>
double integrate(F f, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-14);
}

// Moments of an arbitrary analytic density over [lo, hi] by quadrature.
template <class Pdf>
RegionMoments quadrature_region(Pdf pdf, double lo, double hi) {
    lo = std::max(lo, -kCatSupport);
    hi = std::min(hi, kCatSupport);
    const double mass = integrate(pdf, lo, hi);
    if (!(mass > kEmptyMass)) return empty_region();
    const double m1 = integrate([&](double t) { return t * pdf(t); }, lo, hi) / mass;
    const double m2 = integrate([&](double t) { return (t - m1) * (t - m1) * pdf(t); }, lo, hi) / mass;
    return {mass, m1, std::max(0.0, m2)};
}

bool in_region(double v, double lo, bool lo_closed, double hi, bool hi_closed) {
    const bool above = lo_closed ? v >= lo : v > lo;
    const bool below = hi_closed ? v <= hi : v < hi;
    return above && below;
}

// Population moments of a weighted point set restricted to a region.
RegionMoments weighted_region(std::span<const double> points, std::span<const double> mass, double lo,
                              bool lo_closed, double hi, bool hi_closed) {
    long double w = 0, wx = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!in_region(points[i], lo, lo_closed, hi, hi_closed)) continue;
        w += mass[i];
        wx += static_cast<long double>(mass[i]) * points[i];
    }
    if (!(w > 0)) return empty_region();
    const long double mean = wx / w;
    long double ss = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!in_region(points[i], lo, lo_closed, hi, hi_closed)) continue;
        const long double d = points[i] - mean;
        ss += mass[i] * d * d;
    }
    return {static_cast<double>(w), static_cast<double>(mean), static_cast<double>(ss / w)};
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::DegenerateInput: return "degenerate-input";
        case ErrorCode::InvalidMixture: return "invalid-mixture";
        case ErrorCode::DegenerateConditioner: return "degenerate-conditioner";
        case ErrorCode::InsufficientConditioning: return "insufficient-conditioning";
        case ErrorCode::SamplerFailure: return "sampler-failure";
        case ErrorCode::UnsupportedVariant: return "unsupported-variant";
        case ErrorCode::Resolution: return "resolution";
        case ErrorCode::CoherencePresent: return "coherence-present";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::ModeMismatch: return "mode-mismatch";
        case ErrorCode::SoundnessViolation: return "soundness-violation";
    }
    return "unknown";
}

double normal_pdf(double z) {
    if (std::isinf(z)) return 0.0;
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

RegionMoments truncated_gaussian_moments(double mean, double variance, double lo, double hi) {
    require(variance > 0.0, ErrorCode::InvalidArgument, "truncated_gaussian_moments: variance must be > 0");
    require(lo < hi, ErrorCode::InvalidArgument, "truncated_gaussian_moments: need lo < hi");
    const double s = std::sqrt(variance);
    const double a = (lo - mean) / s;
    const double b = (hi - mean) / s;

    // Mass in the upper or lower tail is taken from erfc of the matching sign
    // so that far-tail regions keep full relative precision.
    double z;
    if (a >= 0.0) {
        z = 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
    } else if (b <= 0.0) {
        z = 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
    } else {
        z = 1.0 - 0.5 * (std::erfc(-a / std::numbers::sqrt2) + std::erfc(b / std::numbers::sqrt2));
    }
    if (!(z >= kEmptyMass)) return empty_region();

    const double pa = normal_pdf(a);
    const double pb = normal_pdf(b);
    const double apa = std::isinf(a) ? 0.0 : a * pa;
    const double bpb = std::isinf(b) ? 0.0 : b * pb;
    const double lambda = (pa - pb) / z;
    const double var = variance * (1.0 + (apa - bpb) / z - lambda * lambda);
    return {z, mean + s * lambda, std::max(0.0, var)};
}

// ---------------------------------------------------------------------------
// Distribution

Distribution Distribution::gaussian(double mean, double variance) {
    require(std::isfinite(mean) && std::isfinite(variance) && variance > 0.0, ErrorCode::InvalidArgument,
            "gaussian: need finite mean and variance > 0");
    Distribution d;
    d.kind_ = Kind::Gaussian;
    d.components_ = {{1.0, mean, variance}};
    return d;
}

Distribution Distribution::gaussian_mixture(std::vector<MixtureComponent> components) {
    require(!components.empty(), ErrorCode::InvalidMixture, "gaussian_mixture: no components");
    double total = 0.0;
    for (const auto& c : components) {
        require(c.weight >= 0.0 && c.variance > 0.0 && std::isfinite(c.mean), ErrorCode::InvalidMixture,
                "gaussian_mixture: weights must be >= 0 and variances > 0");
        total += c.weight;
    }
    require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidMixture, "gaussian_mixture: weights must sum to 1");
    Distribution d;
    d.kind_ = Kind::GaussianMixture;
    d.components_ = std::move(components);
    return d;
}

Distribution Distribution::cat_fringe(double alpha) {
    require(std::isfinite(alpha), ErrorCode::InvalidArgument, "cat_fringe: alpha must be finite");
    Distribution d;
    d.kind_ = Kind::CatFringe;
    d.alpha_ = alpha;
    return d;
}

Distribution Distribution::empirical(std::vector<double> samples) {
    require(samples.size() >= 2, ErrorCode::DegenerateInput, "empirical: need at least 2 samples");
    for (double v : samples)
        require(std::isfinite(v), ErrorCode::DegenerateInput, "empirical: non-finite sample");
    std::sort(samples.begin(), samples.end());
    Distribution d;
    d.kind_ = Kind::Empirical;
    d.values_ = std::move(samples);
    return d;
}

Distribution Distribution::discrete(std::vector<double> points, std::vector<double> masses) {
    require(points.size() == masses.size() && !points.empty(), ErrorCode::InvalidArgument,
            "discrete: points and masses must have equal nonzero length");
    long double total = 0;
    for (double m : masses) {
        require(m >= 0.0 && std::isfinite(m), ErrorCode::InvalidArgument, "discrete: masses must be >= 0");
        total += m;
    }
    require(total > 0, ErrorCode::InvalidArgument, "discrete: zero total mass");
    for (double& m : masses) m = static_cast<double>(m / total);
    Distribution d;
    d.kind_ = Kind::Discrete;
    d.values_ = std::move(points);
    d.masses_ = std::move(masses);
    return d;
}

bool Distribution::is_analytic() const noexcept {
    return kind_ == Kind::Gaussian || kind_ == Kind::GaussianMixture || kind_ == Kind::CatFringe;
}

double Distribution::pdf(double x) const {
    switch (kind_) {
        case Kind::Gaussian:
        case Kind::GaussianMixture: {
            double sum = 0.0;
            for (const auto& c : components_) {
                const double s = std::sqrt(c.variance);
                sum += c.weight * normal_pdf((x - c.mean) / s) / s;
            }
            return sum;
        }
        case Kind::CatFringe:
            return normal_pdf(x) * (1.0 + std::sin(2.0 * alpha_ * x));
        case Kind::Empirical:
        case Kind::Discrete:
            break;
    }
    fail(ErrorCode::InvalidArgument, "pdf: not defined for sample-based distributions");
}

double Distribution::cdf(double x) const {
    switch (kind_) {
        case Kind::Gaussian:
        case Kind::GaussianMixture: {
            double sum = 0.0;
            for (const auto& c : components_) sum += c.weight * normal_cdf((x - c.mean) / std::sqrt(c.variance));
            return sum;
        }
        case Kind::CatFringe: {
            if (x <= -kCatSupport) return 0.0;
            const double hi = std::min(x, kCatSupport);
            return std::min(1.0, integrate([this](double t) { return pdf(t); }, -kCatSupport, hi));
        }
        case Kind::Empirical: {
            const auto it = std::upper_bound(values_.begin(), values_.end(), x);
            return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
        }
        case Kind::Discrete: {
            long double sum = 0;
            for (std::size_t i = 0; i < values_.size(); ++i)
                if (values_[i] <= x) sum += masses_[i];
            return static_cast<double>(sum);
        }
    }
    return kNaN;
}

Moments Distribution::moments() const {
    switch (kind_) {
        case Kind::Gaussian:
        case Kind::GaussianMixture: {
            double mean = 0.0;
            for (const auto& c : components_) mean += c.weight * c.mean;
            return {mean, mixture_variance(components_)};
        }
        case Kind::CatFringe: {
            const double a2 = alpha_ * alpha_;
            const double mean = 2.0 * alpha_ * std::exp(-2.0 * a2);
            return {mean, 1.0 - 4.0 * a2 * std::exp(-4.0 * a2)};
        }
        case Kind::Empirical: {
            const auto n = static_cast<long double>(values_.size());
            long double sum = 0;
            for (double v : values_) sum += v;
            const long double mean = sum / n;
            long double ss = 0;
            for (double v : values_) ss += (v - mean) * (v - mean);
            return {static_cast<double>(mean), static_cast<double>(ss / (n - 1))};
        }
        case Kind::Discrete: {
            const auto r = weighted_region(values_, masses_, -kInf, true, kInf, true);
            return {r.mean, r.variance};
        }
    }
    return {kNaN, kNaN};
}

double Distribution::stdev() const { return std::sqrt(moments().variance); }

RegionMoments Distribution::region(double lo, bool lo_closed, double hi, bool hi_closed) const {
    switch (kind_) {
        case Kind::Gaussian:
        case Kind::GaussianMixture: {
            long double mass = 0, m1 = 0, m2 = 0;
            for (const auto& c : components_) {
                if (c.weight == 0.0) continue;
                const auto r = truncated_gaussian_moments(c.mean, c.variance, lo, hi);
                if (r.empty()) continue;
                const long double w = static_cast<long double>(c.weight) * r.prob;
                mass += w;
                m1 += w * r.mean;
                m2 += w * (static_cast<long double>(r.variance) + static_cast<long double>(r.mean) * r.mean);
            }
            if (!(mass > kEmptyMass)) return empty_region();
            const long double mean = m1 / mass;
            const long double var = m2 / mass - mean * mean;
            return {static_cast<double>(mass), static_cast<double>(mean),
                    std::max(0.0, static_cast<double>(var))};
        }
        case Kind::CatFringe:
            return quadrature_region([this](double t) { return pdf(t); }, lo, hi);
        case Kind::Empirical: {
            const std::vector<double> ones(values_.size(), 1.0 / static_cast<double>(values_.size()));
            return weighted_region(values_, ones, lo, lo_closed, hi, hi_closed);
        }
        case Kind::Discrete:
            return weighted_region(values_, masses_, lo, lo_closed, hi, hi_closed);
    }
    return empty_region();
}

Moments moments(const Distribution& dist) { return dist.moments(); }

// ---------------------------------------------------------------------------
// Binned statistics

double binned_delta(double S, double mu_plus, double mu_minus, double var_plus, double var_minus) {
    const double a = mu_plus + 0.5 * S;
    const double b = mu_minus - 0.5 * S;
    return a * a + b * b + 0.5 * S * S + var_plus + var_minus;
}

BinnedStats assemble_binned(double S, const RegionMoments& minus, const RegionMoments& zero,
                            const RegionMoments& plus) {
    BinnedStats b;
    b.S = S;
    b.p_minus = minus.empty() ? 0.0 : minus.prob;
    b.p_plus = plus.empty() ? 0.0 : plus.prob;
    b.p_zero = zero.empty() ? 0.0 : zero.prob;
    // Masses come from one law, so close the partition exactly.
    const double total = b.p_minus + b.p_zero + b.p_plus;
    if (total > 0.0) {
        b.p_minus /= total;
        b.p_plus /= total;
        b.p_zero = 1.0 - b.p_minus - b.p_plus;
        if (b.p_zero < 0.0) b.p_zero = 0.0;
    }
    b.plus_empty = plus.empty();
    b.minus_empty = minus.empty();
    b.mu_plus = b.plus_empty ? 0.5 * S : std::max(plus.mean, 0.5 * S);
    b.var_plus = b.plus_empty ? 0.0 : plus.variance;
    b.mu_minus = b.minus_empty ? -0.5 * S : std::min(minus.mean, -0.5 * S);
    b.var_minus = b.minus_empty ? 0.0 : minus.variance;
    b.var_ave = b.p_plus * b.var_plus + b.p_minus * b.var_minus;
    b.delta = binned_delta(S, b.mu_plus, b.mu_minus, b.var_plus, b.var_minus);
    return b;
}

BinnedStats bin_stats(const Distribution& dist, double S) {
    require(S > 0.0 && std::isfinite(S), ErrorCode::InvalidArgument, "bin_stats: S must be > 0");
    const double h = 0.5 * S;
    return assemble_binned(S, dist.region(-kInf, true, -h, true), dist.region(-h, false, h, false),
                           dist.region(h, true, kInf, true));
}

// ---------------------------------------------------------------------------
// SampleSummary

SampleSummary::SampleSummary(std::span<const double> values) : values_(values.begin(), values.end()) {
    require(values_.size() >= 2, ErrorCode::DegenerateInput, "SampleSummary: need at least 2 samples");
    for (double v : values_)
        require(std::isfinite(v), ErrorCode::DegenerateInput, "SampleSummary: non-finite sample");
    std::sort(values_.begin(), values_.end());
    long double sum = 0;
    for (double v : values_) sum += v;
    shift_ = static_cast<double>(sum / values_.size());
    build_prefix({});
}

void SampleSummary::build_prefix(std::span<const double> weights) {
    const std::size_t n = values_.size();
    w_.assign(n + 1, 0);
    wx_.assign(n + 1, 0);
    wxx_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const long double wi = weights.empty() ? 1.0L : static_cast<long double>(weights[i]);
        const long double d = static_cast<long double>(values_[i]) - shift_;
        w_[i + 1] = w_[i] + wi;
        wx_[i + 1] = wx_[i] + wi * d;
        wxx_[i + 1] = wxx_[i] + wi * d * d;
    }
}

SampleSummary SampleSummary::reweighted(std::span<const double> weights) const {
    require(weights.size() == values_.size(), ErrorCode::InvalidArgument,
            "SampleSummary::reweighted: weight count mismatch");
    SampleSummary s;
    s.values_ = values_;
    s.shift_ = shift_;
    s.build_prefix(weights);
    return s;
}

double SampleSummary::total_weight() const noexcept { return static_cast<double>(w_.back()); }

RegionMoments SampleSummary::region(double lo, bool lo_closed, double hi, bool hi_closed) const {
    const auto first = lo_closed ? std::lower_bound(values_.begin(), values_.end(), lo)
                                 : std::upper_bound(values_.begin(), values_.end(), lo);
    const auto last = hi_closed ? std::upper_bound(values_.begin(), values_.end(), hi)
                                : std::lower_bound(values_.begin(), values_.end(), hi);
    const auto i = static_cast<std::size_t>(first - values_.begin());
    const auto j = static_cast<std::size_t>(std::max(first, last) - values_.begin());
    const long double w = w_[j] - w_[i];
    if (!(w > 0)) return empty_region();
    const long double m = (wx_[j] - wx_[i]) / w;
    const long double v = (wxx_[j] - wxx_[i]) / w - m * m;
    return {static_cast<double>(w / w_.back()), static_cast<double>(m + shift_),
            std::max(0.0, static_cast<double>(v))};
}

Moments SampleSummary::moments() const {
    const auto r = region(-kInf, true, kInf, true);
    return {r.mean, r.variance};
}

BinnedStats SampleSummary::bin_stats(double S) const {
    require(S > 0.0 && std::isfinite(S), ErrorCode::InvalidArgument, "bin_stats: S must be > 0");
    const double h = 0.5 * S;
    return assemble_binned(S, region(-kInf, true, -h, true), region(-h, false, h, false),
                           region(h, true, kInf, true));
}

// ---------------------------------------------------------------------------
// Mixtures and inference variances

double mixture_variance(std::span<const MixtureComponent> components) {
    require(!components.empty(), ErrorCode::InvalidMixture, "mixture_variance: no components");
    long double total = 0;
    for (const auto& c : components) {
        require(c.weight >= 0.0 && c.variance >= 0.0, ErrorCode::InvalidMixture,
                "mixture_variance: weights and variances must be >= 0");
        total += c.weight;
    }
    require(std::abs(static_cast<double>(total) - 1.0) <= 1e-12, ErrorCode::InvalidMixture,
            "mixture_variance: weights must sum to 1 within 1e-12 (got " +
                std::to_string(static_cast<double>(total)) + ")");
    long double within = 0, between = 0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        within += static_cast<long double>(components[i].weight) * components[i].variance;
        for (std::size_t j = i + 1; j < components.size(); ++j) {
            const long double d = static_cast<long double>(components[i].mean) - components[j].mean;
            between += static_cast<long double>(components[i].weight) * components[j].weight * d * d;
        }
    }
    // The i != j sum counts each unordered pair twice, cancelling the 1/2.
    return static_cast<double>(within + between);
}

JointSamples::JointSamples(std::vector<double> pa, std::vector<double> pb)
    : pa_(std::move(pa)), pb_(std::move(pb)) {
    weights_.assign(pa_.size(), pa_.empty() ? 0.0 : 1.0 / static_cast<double>(pa_.size()));
    validate();
}

JointSamples::JointSamples(std::vector<double> pa, std::vector<double> pb, std::vector<double> weights)
    : pa_(std::move(pa)), pb_(std::move(pb)), weights_(std::move(weights)), uniform_(false) {
    require(weights_.size() == pa_.size(), ErrorCode::InvalidArgument, "JointSamples: weight count mismatch");
    long double total = 0;
    for (double w : weights_) {
        require(w >= 0.0 && std::isfinite(w), ErrorCode::InvalidArgument, "JointSamples: weights must be >= 0");
        total += w;
    }
    require(total > 0, ErrorCode::DegenerateInput, "JointSamples: zero total weight");
    for (double& w : weights_) w = static_cast<double>(w / total);
    validate();
}

void JointSamples::validate() {
    require(pa_.size() == pb_.size(), ErrorCode::InvalidArgument, "JointSamples: column lengths differ");
    require(pa_.size() >= 2, ErrorCode::DegenerateInput, "JointSamples: need at least 2 pairs");
    for (std::size_t i = 0; i < pa_.size(); ++i)
        require(std::isfinite(pa_[i]) && std::isfinite(pb_[i]), ErrorCode::DegenerateInput,
                "JointSamples: non-finite value at pair " + std::to_string(i));
}

JointSamples JointSamples::merge(const JointSamples& left, const JointSamples& right, double w_left) {
    require(w_left >= 0.0 && w_left <= 1.0, ErrorCode::InvalidArgument, "merge: weight must lie in [0, 1]");
    std::vector<double> pa, pb, w;
    const auto append = [&](const JointSamples& j, double scale) {
        if (scale <= 0.0) return;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (j.weights_[i] <= 0.0) continue;
            pa.push_back(j.pa_[i]);
            pb.push_back(j.pb_[i]);
            w.push_back(scale * j.weights_[i]);
        }
    };
    append(left, w_left);
    append(right, 1.0 - w_left);
    return JointSamples(std::move(pa), std::move(pb), std::move(w));
}

JointSamples JointSamples::reweighted(std::span<const double> weights) const {
    return JointSamples(pa_, pb_, std::vector<double>(weights.begin(), weights.end()));
}

double linear_inference_variance(const JointSamples& joint, double gain) {
    long double mean = 0;
    const auto pa = joint.pa(), pb = joint.pb(), w = joint.weights();
    for (std::size_t i = 0; i < joint.size(); ++i) mean += w[i] * (pa[i] - gain * pb[i]);
    long double ss = 0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
        const long double d = (pa[i] - gain * pb[i]) - mean;
        ss += w[i] * d * d;
    }
    return static_cast<double>(ss);
}

double optimal_gain(const JointSamples& joint) {
    const auto pa = joint.pa(), pb = joint.pb(), w = joint.weights();
    long double mb = 0;
    for (std::size_t i = 0; i < joint.size(); ++i) mb += w[i] * pb[i];
    long double vb = 0, ab = 0, bb = 0;
    for (std::size_t i = 0; i < joint.size(); ++i) {
        vb += w[i] * (pb[i] - mb) * (pb[i] - mb);
        ab += static_cast<long double>(w[i]) * pa[i] * pb[i];
        bb += static_cast<long double>(w[i]) * pb[i] * pb[i];
    }
    require(vb > 0, ErrorCode::DegenerateConditioner, "optimal_gain: pB has zero variance");
    return static_cast<double>(ab / bb);
}

ConditionalInference conditional_inference_variance(const JointSamples& joint, double bin_width,
                                                    std::optional<double> origin) {
    require(bin_width > 0.0 && std::isfinite(bin_width), ErrorCode::InvalidArgument,
            "conditional_inference_variance: bin width must be > 0");
    const auto pa = joint.pa(), pb = joint.pb(), w = joint.weights();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < joint.size(); ++i)
        if (w[i] > 0.0) lo = std::min(lo, pb[i]);
    if (origin) {
        require(*origin <= lo, ErrorCode::InvalidArgument,
                "conditional_inference_variance: origin lies above the smallest pB");
        lo = *origin;
    }

    std::vector<std::pair<long long, std::size_t>> keyed;
    keyed.reserve(joint.size());
    for (std::size_t i = 0; i < joint.size(); ++i) {
        if (w[i] <= 0.0) continue;
        keyed.emplace_back(static_cast<long long>(std::floor((pb[i] - lo) / bin_width)), i);
    }
    std::sort(keyed.begin(), keyed.end());

    long double kept = 0, total = 0, acc = 0;
    std::size_t bins = 0;
    for (std::size_t s = 0; s < keyed.size();) {
        std::size_t e = s;
        long double bw = 0, bm = 0;
        bool distinct = false;
        const auto first = keyed[s].second;
        while (e < keyed.size() && keyed[e].first == keyed[s].first) {
            const auto i = keyed[e].second;
            bw += w[i];
            bm += static_cast<long double>(w[i]) * pa[i];
            distinct = distinct || pa[i] != pa[first] || pb[i] != pb[first];
            ++e;
        }
        total += bw;
        // A bin counts once it holds two distinct records; repeated copies of
        // one record (as in a merge of a set with itself) do not qualify.
        if (distinct && bw > 0) {
            bm /= bw;
            long double ss = 0;
            for (std::size_t k = s; k < e; ++k) {
                const auto i = keyed[k].second;
                ss += w[i] * (pa[i] - bm) * (pa[i] - bm);
            }
            acc += ss;  // = bw * var(pA | bin)
            kept += bw;
            ++bins;
        }
        s = e;
    }
    require(bins > 0, ErrorCode::InsufficientConditioning,
            "conditional_inference_variance: no bin holds two or more pairs");
    return {static_cast<double>(acc / kept), static_cast<double>(kept / total), bins};
}

}  // namespace sscopic
