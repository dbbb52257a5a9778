#include "sscopic/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "sscopic/criteria.hpp"
#include "sscopic/error.hpp"

namespace sscopic {

namespace {

constexpr double kNormTol = 1e-9;
constexpr double kEdgeFraction = 0.05;
constexpr double kEdgeMass = 1e-6;

// Plan creation is the one FFTW call that is not thread safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> forward_fft(const std::vector<std::complex<double>>& in) {
    const int n = static_cast<int>(in.size());
    std::vector<std::complex<double>> out(in.size());
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, src, dst, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

double edge_mass(std::span<const double> masses) {
    const auto n = masses.size();
    const auto edge = static_cast<std::size_t>(std::ceil(kEdgeFraction * static_cast<double>(n)));
    double sum = 0.0;
    for (std::size_t i = 0; i < edge; ++i) sum += masses[i] + masses[n - 1 - i];
    return sum;
}

// C-infinity bump supported on |t| < 1.
double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

struct Component {
    double weight = 0.0;
    std::vector<double> x_mass;
    std::vector<double> p_mass;
    UncertaintyAudit audit;
};

}  // namespace

double UniformGrid::p_step() const noexcept {
    return 4.0 * std::numbers::pi / (static_cast<double>(count) * step);
}

UniformGrid UniformGrid::centered(double half_width, std::size_t count) {
    require(half_width > 0.0 && count >= 2, ErrorCode::InvalidArgument, "UniformGrid: bad extent");
    return {-half_width, 2.0 * half_width / static_cast<double>(count), count};
}

UniformGrid UniformGrid::for_stdev(double stdev) {
    double half = 16.0;
    std::size_t count = 1024;
    while (8.0 * stdev > half) {
        half *= 2.0;
        count *= 2;
    }
    return centered(half, count);
}

GridWavefunction::GridWavefunction(UniformGrid grid, std::vector<std::complex<double>> amplitudes)
    : grid_(grid), amps_(std::move(amplitudes)) {
    require(amps_.size() == grid_.count, ErrorCode::InvalidArgument, "GridWavefunction: amplitude count mismatch");
    require(std::has_single_bit(grid_.count), ErrorCode::InvalidArgument,
            "GridWavefunction: grid count must be a power of two");
    require(grid_.step > 0.0, ErrorCode::InvalidArgument, "GridWavefunction: step must be > 0");
    long double norm = 0;
    for (const auto& a : amps_) norm += std::norm(a);
    norm *= grid_.step;
    require(std::abs(static_cast<double>(norm) - 1.0) <= kNormTol, ErrorCode::InvalidArgument,
            "GridWavefunction: amplitudes are not normalised");
}

GridWavefunction GridWavefunction::normalized(UniformGrid grid, std::vector<std::complex<double>> amplitudes) {
    long double norm = 0;
    for (const auto& a : amplitudes) norm += std::norm(a);
    norm *= grid.step;
    require(norm > 0, ErrorCode::DegenerateInput, "GridWavefunction: zero wavefunction");
    const double scale = 1.0 / std::sqrt(static_cast<double>(norm));
    for (auto& a : amplitudes) a *= scale;
    return GridWavefunction(grid, std::move(amplitudes));
}

GridWavefunction GridWavefunction::discretize(const StateModel& state, std::optional<UniformGrid> grid) {
    if (!grid) {
        const auto law = pdf_x(state);
        const auto m = law.moments();
        grid = UniformGrid::for_stdev(std::abs(m.mean) / 8.0 + std::sqrt(m.variance));
    }
    std::vector<std::complex<double>> amps(grid->count);
    for (std::size_t i = 0; i < grid->count; ++i) amps[i] = wavefunction(state, grid->x(i));
    return normalized(*grid, std::move(amps));
}

Distribution GridWavefunction::position_law() const {
    std::vector<double> xs(grid_.count), mass(grid_.count);
    for (std::size_t i = 0; i < grid_.count; ++i) {
        xs[i] = grid_.x(i);
        mass[i] = std::norm(amps_[i]) * grid_.step;
    }
    return Distribution::discrete(std::move(xs), std::move(mass));
}

Distribution momentum_law(const GridWavefunction& psi) {
    const auto& g = psi.grid();
    const std::size_t n = g.count;

    std::vector<double> x_mass(n);
    for (std::size_t i = 0; i < n; ++i) x_mass[i] = std::norm(psi.amplitudes()[i]) * g.step;
    const double x_edge = edge_mass(x_mass);
    if (x_edge >= kEdgeMass) {
        std::ostringstream os;
        os << "momentum_law: " << x_edge << " of the x-mass lies in the outer 5% of the grid";
        fail(ErrorCode::Resolution, os.str());
    }

    // phi(p_k) = (1/sqrt(4 pi)) sum_n psi(x_n) e^{-i p_k x_n / 2} dx; with
    // p_k = k dp the sum is a DFT up to a unit-modulus phase, so
    // |phi|^2 dp = |FFT_k|^2 dx / n.
    const auto spectrum = forward_fft(psi.amplitudes());
    const double dp = g.p_step();
    std::vector<double> ps(n), mass(n);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::ptrdiff_t k = -half; k < half; ++k) {
        const auto out = static_cast<std::size_t>(k + half);
        const auto idx = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(n)) % static_cast<std::ptrdiff_t>(n));
        ps[out] = static_cast<double>(k) * dp;
        mass[out] = std::norm(spectrum[idx]) * g.step / static_cast<double>(n);
    }
    const double p_edge = edge_mass(mass);
    if (p_edge >= kEdgeMass) {
        std::ostringstream os;
        os << "momentum_law: " << p_edge << " of the p-mass lies in the outer 5% of the conjugate grid";
        fail(ErrorCode::Resolution, os.str());
    }
    return Distribution::discrete(std::move(ps), std::move(mass));
}

UncertaintyAudit audit_uncertainty(const GridWavefunction& psi) {
    const double vp = momentum_law(psi).moments().variance;
    const double vx = psi.position_law().moments().variance;
    return {vx, vp, vx * vp};
}

FuzzReport fuzz_restricted_mixtures(double s_cap, std::size_t trials, std::uint64_t seed, const FuzzOptions& options) {
    require(s_cap > 0.0 && std::isfinite(s_cap), ErrorCode::InvalidArgument, "fuzz: S_cap must be > 0");
    require(trials >= 1, ErrorCode::InvalidArgument, "fuzz: trials must be >= 1");
    require(options.max_components >= 1, ErrorCode::InvalidArgument, "fuzz: need at least one component");

    const auto grid = UniformGrid::centered(4.0 * s_cap, 2048);
    const double tol = options.tolerance;
    const double var_cap = s_cap * s_cap / 4.0;

    FuzzReport rep;
    rep.s_cap = s_cap;
    rep.trials = trials;
    rep.seed = seed;
    rep.worst_theorem1_product = rep.worst_theorem1_sum = rep.min_delta_p = rep.worst_theorem4 =
        rep.min_uncertainty_product = rep.worst_dominance = std::numeric_limits<double>::infinity();

    const auto violation = [&](std::size_t trial, const std::string& what, double value) {
        std::ostringstream os;
        os << "trial " << trial << ": " << what << " (" << value << ")";
        rep.violations.push_back(os.str());
    };

    std::vector<double> xs(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) xs[i] = grid.x(i);
    std::vector<double> ps;

    for (std::size_t t = 0; t < trials; ++t) {
        auto rng = seeded_rng(derive_seed(seed, t));
        std::uniform_int_distribution<std::size_t> n_comp(1, options.max_components);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::exponential_distribution<double> expo(1.0);

        const std::size_t m = n_comp(rng);
        std::vector<Component> comps(m);
        double wsum = 0.0;
        for (auto& c : comps) wsum += (c.weight = expo(rng) + 1e-3);
        for (auto& c : comps) c.weight /= wsum;

        for (auto& c : comps) {
            const double diameter = s_cap * (0.25 + 0.7 * unif(rng));
            const double centre = s_cap * (4.0 * unif(rng) - 2.0);
            const int harmonics = static_cast<int>(3.0 * unif(rng));
            const double carrier = (6.0 * unif(rng) - 3.0) / s_cap;
            std::vector<std::complex<double>> coeff(static_cast<std::size_t>(harmonics) + 1);
            for (auto& z : coeff) z = {normal(rng), normal(rng)};

            std::vector<std::complex<double>> amps(grid.count);
            for (std::size_t i = 0; i < grid.count; ++i) {
                const double tt = (xs[i] - centre) / (0.5 * diameter);
                const double env = bump(tt);
                if (env == 0.0) continue;
                std::complex<double> series = 0.0;
                for (std::size_t j = 0; j < coeff.size(); ++j)
                    series += coeff[j] * std::polar(1.0, std::numbers::pi * static_cast<double>(j) * tt);
                if (std::abs(series) < 1e-3) series += 1.0;  // keep the envelope from vanishing entirely
                amps[i] = env * series * std::polar(1.0, 0.5 * carrier * xs[i]);
            }
            const auto psi = GridWavefunction::normalized(grid, std::move(amps));
            const auto xlaw = psi.position_law();
            const auto plaw = momentum_law(psi);
            if (ps.empty()) ps.assign(plaw.values().begin(), plaw.values().end());
            c.x_mass.assign(xlaw.masses().begin(), xlaw.masses().end());
            c.p_mass.assign(plaw.masses().begin(), plaw.masses().end());
            c.audit = {xlaw.moments().variance, plaw.moments().variance, 0.0};
            c.audit.product = c.audit.var_x * c.audit.var_p;

            ++rep.components;
            rep.assertions += 2;
            rep.max_var_x_ratio = std::max(rep.max_var_x_ratio, c.audit.var_x / var_cap);
            rep.min_uncertainty_product = std::min(rep.min_uncertainty_product, c.audit.product);
            if (!(c.audit.var_x < var_cap)) violation(t, "component var_x >= S_cap^2/4", c.audit.var_x);
            if (c.audit.product < 1.0 - tol) violation(t, "component var_x var_p < 1", c.audit.product);
        }

        std::vector<double> xm(grid.count, 0.0), pm(grid.count, 0.0);
        double avg_var_p = 0.0;
        for (const auto& c : comps) {
            for (std::size_t i = 0; i < grid.count; ++i) {
                xm[i] += c.weight * c.x_mass[i];
                pm[i] += c.weight * c.p_mass[i];
            }
            avg_var_p += c.weight * c.audit.var_p;
        }
        const auto dist_x = Distribution::discrete(xs, std::move(xm));
        const auto dist_p = Distribution::discrete(ps, std::move(pm));
        const double var_p = dist_p.moments().variance;

        const double dominance = var_p - avg_var_p;
        rep.worst_dominance = std::min(rep.worst_dominance, dominance);
        ++rep.assertions;
        if (dominance < -1e-9 * std::max(1.0, avg_var_p)) violation(t, "mixture var_p below average var_p", dominance);

        const double dp = std::sqrt(var_p);
        rep.min_delta_p = std::min(rep.min_delta_p, dp);
        rep.worst_theorem4 = std::min(rep.worst_theorem4, dp - 2.0 / s_cap);
        ++rep.assertions;
        if (dp <= 2.0 / s_cap * (1.0 - tol)) violation(t, "theorem 4 fires: dp <= 2/S_cap", dp);

        for (double scale : {1.0, 1.5, 2.0}) {
            const auto b = bin_stats(dist_x, scale * s_cap);
            const auto prod = theorem1_product(b, var_p);
            const auto sum = theorem1_sum(b, var_p);
            rep.worst_theorem1_product = std::min(rep.worst_theorem1_product, prod.lhs - prod.bound);
            rep.worst_theorem1_sum = std::min(rep.worst_theorem1_sum, sum.lhs - sum.bound);
            rep.assertions += 2;
            if (prod.lhs < prod.bound - tol) violation(t, "theorem1-product fires", prod.lhs);
            if (sum.lhs < sum.bound - tol) violation(t, "theorem1-sum fires", sum.lhs - sum.bound);
        }
    }
    return rep;
}

ConcavityReport appendix_b_audit(const JointSamples& left, const JointSamples& right, double w_left,
                                 double bin_width, const BootstrapOptions& bootstrap) {
    require(w_left >= 0.0 && w_left <= 1.0, ErrorCode::InvalidArgument, "appendix_b_audit: wL must lie in [0, 1]");
    double origin = std::numeric_limits<double>::infinity();
    for (const auto* j : {&left, &right})
        for (std::size_t i = 0; i < j->size(); ++i)
            if (j->weights()[i] > 0.0) origin = std::min(origin, j->pb()[i]);

    const auto gap_of = [&](const JointSamples& l, const JointSamples& r, ConcavityReport* out) {
        const double cm = conditional_inference_variance(JointSamples::merge(l, r, w_left), bin_width, origin).variance;
        const double cl = conditional_inference_variance(l, bin_width, origin).variance;
        const double cr = conditional_inference_variance(r, bin_width, origin).variance;
        const double parts = w_left * cl + (1.0 - w_left) * cr;
        if (out) {
            out->civ_merged = cm;
            out->civ_left = cl;
            out->civ_right = cr;
            out->weighted_parts = parts;
        }
        return cm - parts;
    };

    ConcavityReport rep;
    rep.gap = gap_of(left, right, &rep);

    std::vector<double> gaps;
    gaps.reserve(bootstrap.replicas);
    const auto resample = [](const JointSamples& j, std::mt19937_64& rng) {
        auto w = multinomial_weights(j.size(), rng);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= j.weights()[i];
        return j.reweighted(w);
    };
    for (std::size_t b = 0; b < bootstrap.replicas; ++b) {
        auto rng = seeded_rng(derive_seed(bootstrap.seed, b));
        try {
            gaps.push_back(gap_of(resample(left, rng), resample(right, rng), nullptr));
        } catch (const Error& e) {
            // A replica can lose every multiply-occupied bin; skip it.
            if (e.code() != ErrorCode::InsufficientConditioning && e.code() != ErrorCode::DegenerateInput) throw;
        }
    }
    rep.standard_error = replica_standard_error(gaps);
    rep.holds = rep.gap >= -bootstrap.k * rep.standard_error - 1e-9;
    return rep;
}

}  // namespace sscopic
