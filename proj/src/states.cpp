#include "sscopic/states.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sscopic/bootstrap.hpp"
#include "sscopic/error.hpp"

namespace sscopic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMaxRejections = 10000;

void validate(const StateModel::Variant& v) {
    std::visit(overloaded{
                   [](const Coherent& s) {
                       require(std::isfinite(s.alpha), ErrorCode::InvalidArgument, "Coherent: alpha must be finite");
                   },
                   [](const Cat& s) {
                       require(std::isfinite(s.alpha), ErrorCode::InvalidArgument, "Cat: alpha must be finite");
                   },
                   [](const Squeezed& s) {
                       require(std::isfinite(s.r) && s.r >= 0.0, ErrorCode::InvalidArgument, "Squeezed: need r >= 0");
                   },
                   [](const TwoModeSqueezed& s) {
                       require(std::isfinite(s.r) && s.r >= 0.0, ErrorCode::InvalidArgument,
                               "TwoModeSqueezed: need r >= 0");
                   },
                   [](const PhenomGaussian& s) {
                       require(s.var_x > 0.0 && s.var_p > 0.0, ErrorCode::InvalidArgument,
                               "PhenomGaussian: variances must be > 0");
                       // Small slack so that u^2/var_p * var_p rounding does not reject u = 1.
                       require(s.var_x * s.var_p >= 1.0 - 1e-12, ErrorCode::InvalidArgument,
                               "PhenomGaussian: var_x * var_p must be >= 1");
                   },
               },
               v);
}

std::vector<double> gaussian_draws(double mean, double variance, std::size_t n, std::uint64_t seed) {
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> normal(mean, std::sqrt(variance));
    std::vector<double> out(n);
    for (auto& v : out) v = normal(rng);
    return out;
}

}  // namespace

StateModel::StateModel(Variant v) : v_(v) { validate(v_); }

std::string StateModel::name() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Coherent& s) { os << "coherent(alpha=" << s.alpha << ")"; },
                   [&](const Cat& s) { os << "cat(alpha=" << s.alpha << ")"; },
                   [&](const Squeezed& s) { os << "squeezed(r=" << s.r << ")"; },
                   [&](const TwoModeSqueezed& s) { os << "two-mode-squeezed(r=" << s.r << ")"; },
                   [&](const PhenomGaussian& s) {
                       os << "phenom-gaussian(var_x=" << s.var_x << ",var_p=" << s.var_p << ")";
                   },
               },
               v_);
    return os.str();
}

Distribution pdf_x(const StateModel& state) {
    return std::visit(overloaded{
                          [](const Coherent& s) { return Distribution::gaussian(2.0 * s.alpha, 1.0); },
                          [](const Cat& s) {
                              return Distribution::gaussian_mixture(
                                  {{0.5, -2.0 * s.alpha, 1.0}, {0.5, 2.0 * s.alpha, 1.0}});
                          },
                          [](const Squeezed& s) { return Distribution::gaussian(0.0, std::exp(2.0 * s.r)); },
                          [](const TwoModeSqueezed& s) { return Distribution::gaussian(0.0, std::cosh(2.0 * s.r)); },
                          [](const PhenomGaussian& s) { return Distribution::gaussian(0.0, s.var_x); },
                      },
                      state.variant());
}

Distribution pdf_p(const StateModel& state) {
    return std::visit(overloaded{
                          [](const Coherent&) { return Distribution::gaussian(0.0, 1.0); },
                          [](const Cat& s) { return Distribution::cat_fringe(s.alpha); },
                          [](const Squeezed& s) { return Distribution::gaussian(0.0, std::exp(-2.0 * s.r)); },
                          [](const TwoModeSqueezed& s) { return Distribution::gaussian(0.0, std::cosh(2.0 * s.r)); },
                          [](const PhenomGaussian& s) { return Distribution::gaussian(0.0, s.var_p); },
                      },
                      state.variant());
}

std::pair<Distribution, Distribution> sum_quadrature_laws(const StateModel& state) {
    require(state.is<TwoModeSqueezed>(), ErrorCode::UnsupportedVariant,
            "sum_quadrature_laws: needs a two-mode squeezed state, got " + state.name());
    const double r = state.as<TwoModeSqueezed>().r;
    return {Distribution::gaussian(0.0, std::exp(2.0 * r)), Distribution::gaussian(0.0, std::exp(-2.0 * r))};
}

std::complex<double> wavefunction(const StateModel& state, double x) {
    using namespace std::complex_literals;
    const double norm4 = std::pow(2.0 * std::numbers::pi, 0.25);
    return std::visit(
        overloaded{
            [&](const Coherent& s) -> std::complex<double> {
                const double d = x - 2.0 * s.alpha;
                return std::exp(-d * d / 4.0) / norm4;
            },
            [&](const Cat& s) -> std::complex<double> {
                // i e^{-i pi/4} e^{-x^2/4 - alpha^2} (e^{alpha x} - i e^{-alpha x}) / (sqrt 2 (2 pi)^{1/4}).
                // This is the conjugate of the superposition with phases (e^{i pi/4}, e^{-i pi/4});
                // under p = -2i d/dx it has the p-law exp(-p^2/2)(1 + sin 2 alpha p) used by pdf_p,
                // whereas the unconjugated form gives the mirrored fringe (1 - sin 2 alpha p).
                // Each exponent is completed to a square to avoid overflow at large alpha.
                const double a = s.alpha;
                const double plus = std::exp(-(x - 2.0 * a) * (x - 2.0 * a) / 4.0);
                const double minus = std::exp(-(x + 2.0 * a) * (x + 2.0 * a) / 4.0);
                const std::complex<double> phase = 1i * std::exp(-1i * (std::numbers::pi / 4.0));
                return phase * (plus - 1i * minus) / (std::numbers::sqrt2 * norm4);
            },
            [&](const Squeezed& s) -> std::complex<double> {
                const double sigma = std::exp(2.0 * s.r);
                return std::exp(-x * x / (4.0 * sigma)) / std::pow(2.0 * std::numbers::pi * sigma, 0.25);
            },
            [&](const TwoModeSqueezed&) -> std::complex<double> {
                fail(ErrorCode::UnsupportedVariant, "wavefunction: two-mode state is not pure on one mode");
            },
            [&](const PhenomGaussian&) -> std::complex<double> {
                fail(ErrorCode::UnsupportedVariant, "wavefunction: phenomenological Gaussian has no wavefunction");
            },
        },
        state.variant());
}

std::complex<double> density_matrix_element(const StateModel& state, double x, double x2) {
    require(state.is<Coherent>() || state.is<Cat>() || state.is<Squeezed>(), ErrorCode::UnsupportedVariant,
            "density_matrix_element: unsupported state " + state.name());
    return wavefunction(state, x) * std::conj(wavefunction(state, x2));
}

TmssInference tmss_inference(double r) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::InvalidArgument, "tmss_inference: need r >= 0");
    return {-std::tanh(2.0 * r), 1.0 / std::cosh(2.0 * r)};
}

JointPMoments tmss_joint_p_moments(double r) {
    require(std::isfinite(r) && r >= 0.0, ErrorCode::InvalidArgument, "tmss_joint_p_moments: need r >= 0");
    const double c = std::cosh(2.0 * r);
    return {c, c, -std::sinh(2.0 * r)};
}

std::vector<double> sample(const StateModel& state, Quadrature q, std::size_t n, std::uint64_t seed) {
    require(n >= 1, ErrorCode::InvalidArgument, "sample: n must be >= 1");
    if (q == Quadrature::P && state.is<Cat>()) {
        // Envelope 2 N(0,1): accept with probability (1 + sin 2 alpha p) / 2.
        const double a = state.as<Cat>().alpha;
        auto rng = seeded_rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> out(n);
        for (auto& v : out) {
            std::size_t tries = 0;
            for (;;) {
                const double p = normal(rng);
                if (unif(rng) * 2.0 < 1.0 + std::sin(2.0 * a * p)) {
                    v = p;
                    break;
                }
                if (++tries > kMaxRejections) fail(ErrorCode::SamplerFailure, "sample: rejection sampler stalled");
            }
        }
        return out;
    }
    if (q == Quadrature::X && state.is<Cat>()) {
        const double a = state.as<Cat>().alpha;
        auto rng = seeded_rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::bernoulli_distribution side(0.5);
        std::vector<double> out(n);
        for (auto& v : out) {
            const double centre = side(rng) ? 2.0 * a : -2.0 * a;
            v = centre + normal(rng);
        }
        return out;
    }
    const auto law = q == Quadrature::X ? pdf_x(state) : pdf_p(state);
    const auto c = law.components()[0];
    return gaussian_draws(c.mean, c.variance, n, seed);
}

JointSamples sample_joint_p(const StateModel& state, std::size_t n, std::uint64_t seed) {
    require(state.is<TwoModeSqueezed>(), ErrorCode::UnsupportedVariant,
            "sample_joint_p: needs a two-mode squeezed state, got " + state.name());
    require(n >= 2, ErrorCode::InvalidArgument, "sample_joint_p: n must be >= 2");
    const auto m = tmss_joint_p_moments(state.as<TwoModeSqueezed>().r);
    // Cholesky factor of [[v, c], [c, v]].
    const double l11 = std::sqrt(m.var_a);
    const double l21 = m.cov / l11;
    const double l22 = std::sqrt(std::max(0.0, m.var_b - l21 * l21));
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> pa(n), pb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        pa[i] = l11 * z1;
        pb[i] = l21 * z1 + l22 * z2;
    }
    return JointSamples(std::move(pa), std::move(pb));
}

std::vector<double> sample_sum(const StateModel& state, Quadrature q, std::size_t n, std::uint64_t seed) {
    require(n >= 1, ErrorCode::InvalidArgument, "sample_sum: n must be >= 1");
    const auto laws = sum_quadrature_laws(state);
    const auto c = (q == Quadrature::X ? laws.first : laws.second).components()[0];
    return gaussian_draws(c.mean, c.variance, n, seed);
}

StateModel parse_state(std::string_view text) {
    const std::string spec(text);
    const auto colon = spec.find(':');
    require(colon != std::string::npos, ErrorCode::InvalidArgument, "state must read name:parameters, got '" + spec + "'");
    const std::string name = spec.substr(0, colon);
    std::vector<double> args;
    std::stringstream ss(spec.substr(colon + 1));
    for (std::string tok; std::getline(ss, tok, ',');) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == tok.size() && used > 0, ErrorCode::InvalidArgument, "bad state parameter '" + tok + "'");
        args.push_back(v);
    }
    const auto want = [&](std::size_t n) {
        require(args.size() == n, ErrorCode::InvalidArgument, "state " + name + " takes " + std::to_string(n) + " parameter(s)");
    };
    if (name == "coherent") return (want(1), StateModel(Coherent{args[0]}));
    if (name == "cat") return (want(1), StateModel(Cat{args[0]}));
    if (name == "squeezed") return (want(1), StateModel(Squeezed{args[0]}));
    if (name == "tmss") return (want(1), StateModel(TwoModeSqueezed{args[0]}));
    if (name == "phenom") return (want(2), StateModel(PhenomGaussian{args[0], args[1]}));
    fail(ErrorCode::InvalidArgument, "unknown state '" + name + "'");
}

}  // namespace sscopic
