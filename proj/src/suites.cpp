#include "sscopic/suites.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sscopic/density.hpp"
#include "sscopic/error.hpp"
#include "sscopic/io.hpp"
#include "sscopic/oracle.hpp"

namespace sscopic {

namespace {

constexpr double kEqualityTol = 1e-9;
constexpr double kReconstructionTol = 1e-8;
constexpr double kRefusalThreshold = 1e-6;
constexpr double kBinWidth = 0.25;

// Correlated Gaussian (pA, pB) cloud with random offsets, spreads and correlation.
JointSamples random_cloud(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 1.0);
    const double ma = 4.0 * u(rng) - 2.0, mb = 4.0 * u(rng) - 2.0;
    const double sa = 0.3 + 1.5 * u(rng), sb = 0.3 + 1.5 * u(rng);
    const double rho = 1.8 * u(rng) - 0.9;
    std::vector<double> pa(n), pb(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z1 = z(rng), z2 = z(rng);
        pb[i] = mb + sb * z1;
        pa[i] = ma + sa * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
    }
    return JointSamples(std::move(pa), std::move(pb));
}

template <class Fn>
void guarded(SuiteOutcome& out, const std::string& label, Fn fn) {
    ++out.cases;
    try {
        fn();
    } catch (const std::exception& e) {
        out.failures.push_back(label + ": " + e.what());
    }
}

}  // namespace

SuiteOutcome verify_fuzz(std::span<const double> s_caps, std::size_t trials, std::uint64_t seed) {
    SuiteOutcome out;
    out.name = "fuzz";
    out.detail = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s_caps.size(); ++k) {
        const auto rep = fuzz_restricted_mixtures(s_caps[k], trials, derive_seed(seed, k));
        out.cases += rep.trials;
        for (const auto& v : rep.violations) out.failures.push_back("S_cap=" + format_number(s_caps[k]) + ": " + v);
        out.detail.push_back(to_json(rep));
    }
    return out;
}

SuiteOutcome verify_grid(double tolerance) {
    SuiteOutcome out;
    out.name = "grid";
    out.detail = nlohmann::ordered_json::array();
    std::vector<std::pair<std::string, StateModel>> states{{"vacuum", StateModel(Coherent{0.0})}};
    for (double r : {0.0, 0.5, 1.0, 1.5, 2.0}) states.emplace_back("squeezed r=" + format_number(r), Squeezed{r});
    for (const auto& [label, state] : states) {
        guarded(out, label, [&, &label = label, &state = state] {
            const auto a = audit_uncertainty(GridWavefunction::discretize(state));
            nlohmann::ordered_json j;
            j["state"] = label;
            j["var_x"] = a.var_x;
            j["var_p"] = a.var_p;
            j["product"] = a.product;
            out.detail.push_back(j);
            if (std::abs(a.product - 1.0) > tolerance)
                out.failures.push_back(label + ": var_x var_p = " + format_number(a.product));
        });
    }
    return out;
}

SuiteOutcome verify_appendix_a(std::size_t cases, std::size_t dim, std::uint64_t seed) {
    SuiteOutcome out;
    out.name = "appendix-a";
    double worst = 0.0;
    std::size_t refused = 0, refusal_cases = 0;
    for (std::size_t c = 0; c < cases; ++c) {
        const std::uint64_t s = derive_seed(seed, c);
        const std::size_t rank = 1 + static_cast<std::size_t>(s % dim);
        guarded(out, "case " + std::to_string(c), [&] {
            const auto rho = random_incoherent_pair(dim, rank, 0, 1, s);
            const auto d = appendix_a_decompose(rho, 0, 1);
            const double err = reconstruction_error(rho, d);
            worst = std::max(worst, err);
            if (err >= kReconstructionTol)
                out.failures.push_back("case " + std::to_string(c) + ": reconstruction error " + format_number(err));
            for (std::size_t k = 0; k < dim; ++k) {
                if ((d.rho1 && ((*d.rho1)(1, k) != 0.0 || (*d.rho1)(k, 1) != 0.0)) ||
                    (d.rho2 && ((*d.rho2)(0, k) != 0.0 || (*d.rho2)(k, 0) != 0.0))) {
                    out.failures.push_back("case " + std::to_string(c) + ": support condition not exact");
                    break;
                }
            }
        });
        guarded(out, "refusal " + std::to_string(c), [&] {
            const auto rho = random_density_matrix(dim, rank, derive_seed(s, 1));
            if (std::abs(rho(0, 1)) <= kRefusalThreshold) return;
            ++refusal_cases;
            try {
                appendix_a_decompose(rho, 0, 1);
                out.failures.push_back("refusal " + std::to_string(c) + ": coherent matrix was decomposed");
            } catch (const Error& e) {
                if (e.code() != ErrorCode::CoherencePresent) throw;
                ++refused;
            }
        });
    }
    out.detail["dimension"] = dim;
    out.detail["max_reconstruction_error"] = worst;
    out.detail["refusal_cases"] = refusal_cases;
    out.detail["refused"] = refused;
    return out;
}

SuiteOutcome verify_appendix_b(std::size_t cases, std::size_t pairs, std::uint64_t seed,
                               const BootstrapOptions& bootstrap) {
    SuiteOutcome out;
    out.name = "appendix-b";
    double min_z = std::numeric_limits<double>::infinity();
    double worst_equality = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
        const std::string label = "case " + std::to_string(c);
        guarded(out, label, [&] {
            auto rng = seeded_rng(derive_seed(seed, c));
            const auto left = random_cloud(pairs, rng);
            const auto right = random_cloud(pairs, rng);
            const double w = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
            BootstrapOptions opts = bootstrap;
            opts.seed = derive_seed(bootstrap.seed, c);
            const auto rep = appendix_b_audit(left, right, w, kBinWidth, opts);
            if (rep.standard_error > 0.0) min_z = std::min(min_z, rep.gap / rep.standard_error);
            if (!rep.holds)
                out.failures.push_back(label + ": gap " + format_number(rep.gap) + " below -k SE (SE " +
                                       format_number(rep.standard_error) + ")");

            // Equality cases are exact in the point estimate.
            BootstrapOptions none = opts;
            none.replicas = 0;
            for (const auto& eq : {appendix_b_audit(left, left, w, kBinWidth, none),
                                   appendix_b_audit(left, right, 0.0, kBinWidth, none),
                                   appendix_b_audit(left, right, 1.0, kBinWidth, none)}) {
                worst_equality = std::max(worst_equality, std::abs(eq.gap));
                if (std::abs(eq.gap) > kEqualityTol)
                    out.failures.push_back(label + ": equality case gap " + format_number(eq.gap));
            }
        });
    }
    out.detail["pairs_per_side"] = pairs;
    out.detail["bin_width"] = kBinWidth;
    out.detail["min_gap_over_se"] = std::isfinite(min_z) ? nlohmann::ordered_json(min_z) : nlohmann::ordered_json();
    out.detail["worst_equality_gap"] = worst_equality;
    return out;
}

nlohmann::ordered_json to_json(const SuiteOutcome& s) {
    nlohmann::ordered_json j;
    j["suite"] = s.name;
    j["passed"] = s.passed();
    j["cases"] = s.cases;
    j["failures"] = s.failures;
    j["detail"] = s.detail;
    return j;
}

}  // namespace sscopic
