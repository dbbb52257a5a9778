#include <doctest.h>

#include <cmath>
#include <complex>

#include "sscopic/error.hpp"
#include "sscopic/oracle.hpp"
#include "sscopic/states.hpp"

using namespace sscopic;
using doctest::Approx;

namespace {

const double kPi = std::acos(-1.0);

// phi(p) = (1/sqrt(4 pi)) sum_n psi(x_n) exp(-i p x_n / 2) dx, evaluated directly.
std::complex<double> naive_phi(const GridWavefunction& psi, double p) {
    const auto& g = psi.grid();
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < g.count; ++i)
        acc += psi.amplitudes()[i] * std::exp(std::complex<double>(0.0, -0.5 * p * g.x(i)));
    return acc * g.step / std::sqrt(4.0 * kPi);
}

}  // namespace

TEST_CASE("grid wavefunction validation") {
    const auto g = UniformGrid::centered(8.0, 256);
    CHECK_THROWS_AS(GridWavefunction(g, std::vector<std::complex<double>>(256, 1.0)), Error);
    CHECK_THROWS_AS(GridWavefunction::normalized(UniformGrid::centered(8.0, 100),
                                                 std::vector<std::complex<double>>(100, 1.0)),
                    Error);
}

TEST_CASE("momentum law matches a direct transform and is unitary") {
    const auto g = UniformGrid::centered(12.0, 256);
    const auto psi = GridWavefunction::discretize(StateModel(Cat{0.9}), g);
    const auto law = momentum_law(psi);
    const double dp = g.p_step();
    double total = 0.0;
    for (std::size_t k = 0; k < law.values().size(); ++k) {
        const double direct = std::norm(naive_phi(psi, law.values()[k])) * dp;
        CHECK(std::abs(direct - law.masses()[k]) < 1e-12);
        total += direct;
    }
    // Parseval: the raw spectrum carries the full norm.
    CHECK(total == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("momentum law of analytic states") {
    const auto vac = momentum_law(GridWavefunction::discretize(StateModel(Coherent{0.0})));
    CHECK(vac.moments().variance == Approx(1.0).epsilon(1e-6));
    const auto sq = momentum_law(GridWavefunction::discretize(StateModel(Squeezed{1.0})));
    CHECK(sq.moments().variance == Approx(std::exp(-2.0)).epsilon(1e-6));
    const auto cat = momentum_law(GridWavefunction::discretize(StateModel(Cat{0.5})));
    CHECK(cat.moments().variance == Approx(1.0 - std::exp(-1.0)).epsilon(1e-6));
    CHECK(cat.moments().mean == Approx(std::exp(-0.5)).epsilon(1e-6));
}

TEST_CASE("a position shift leaves the momentum law unchanged") {
    const auto g = UniformGrid::centered(16.0, 1024);
    const auto a = momentum_law(GridWavefunction::discretize(StateModel(Coherent{0.0}), g));
    const auto b = momentum_law(GridWavefunction::discretize(StateModel(Coherent{1.5}), g));
    for (std::size_t k = 0; k < a.masses().size(); ++k) CHECK(std::abs(a.masses()[k] - b.masses()[k]) < 1e-12);
}

TEST_CASE("under-resolved grids are refused") {
    const auto coarse = UniformGrid::centered(3.0, 256);
    CHECK_THROWS_AS(momentum_law(GridWavefunction::discretize(StateModel(Coherent{0.0}), coarse)), Error);
    const auto narrow_p = UniformGrid::centered(200.0, 128);
    CHECK_THROWS_AS(momentum_law(GridWavefunction::discretize(StateModel(Coherent{0.0}), narrow_p)), Error);
}

TEST_CASE("uncertainty audit of minimum-uncertainty states") {
    CHECK(audit_uncertainty(GridWavefunction::discretize(StateModel(Coherent{0.0}))).product == Approx(1.0).epsilon(1e-6));
    for (double r : {0.25, 0.75, 1.25, 2.0}) {
        const auto a = audit_uncertainty(GridWavefunction::discretize(StateModel(Squeezed{r})));
        CHECK(a.product == Approx(1.0).epsilon(1e-6));
        CHECK(a.var_x == Approx(std::exp(2 * r)).epsilon(1e-6));
    }
    CHECK(audit_uncertainty(GridWavefunction::discretize(StateModel(Cat{1.0}))).product > 1.0);
}

TEST_CASE("restricted mixtures never trigger the criteria") {
    for (double cap : {1.0, 2.0, 4.0, 8.0}) {
        const auto rep = fuzz_restricted_mixtures(cap, 200, 1234 + static_cast<std::uint64_t>(cap));
        CAPTURE(cap);
        CHECK(rep.sound());
        CHECK(rep.max_var_x_ratio < 1.0);
        CHECK(rep.min_uncertainty_product >= 1.0 - 1e-6);
        CHECK(rep.worst_dominance >= -1e-9);
        CHECK(rep.min_delta_p > 2.0 / cap * (1 - 1e-6));
        CHECK(rep.assertions > rep.trials);
    }
    const auto four = fuzz_restricted_mixtures(4.0, 1000, 99);
    CHECK(four.sound());
    CHECK(four.min_delta_p > 0.5);
}

TEST_CASE("fuzz runs are reproducible") {
    const auto a = fuzz_restricted_mixtures(2.0, 50, 7), b = fuzz_restricted_mixtures(2.0, 50, 7);
    CHECK(a.worst_theorem1_product == b.worst_theorem1_product);
    CHECK(a.min_delta_p == b.min_delta_p);
    CHECK(a.components == b.components);
}

TEST_CASE("single component mixtures") {
    FuzzOptions one;
    one.max_components = 1;
    const auto rep = fuzz_restricted_mixtures(3.0, 100, 3, one);
    CHECK(rep.sound());
    CHECK(rep.components == 100);
    CHECK(rep.worst_dominance == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("concavity audit equality cases") {
    const auto j = sample_joint_p(StateModel(TwoModeSqueezed{0.6}), 5000, 1);
    const auto k = sample_joint_p(StateModel(TwoModeSqueezed{0.2}), 5000, 2);
    BootstrapOptions opts;
    opts.replicas = 50;
    const auto same = appendix_b_audit(j, j, 0.4, 0.2, opts);
    CHECK(std::abs(same.gap) < 1e-9);
    CHECK(same.holds);
    const auto all_left = appendix_b_audit(j, k, 1.0, 0.2, opts);
    CHECK(std::abs(all_left.gap) < 1e-9);
    CHECK(all_left.civ_merged == Approx(all_left.civ_left).epsilon(1e-12));
}

TEST_CASE("mixing differently correlated pairs raises the conditional variance") {
    // Opposite gains: merging shifts the conditional means apart.
    const auto l = sample_joint_p(StateModel(TwoModeSqueezed{0.8}), 100000, 5);
    std::vector<double> pa(l.pa().begin(), l.pa().end()), pb(l.pb().begin(), l.pb().end());
    for (auto& v : pb) v = -v;
    const JointSamples r(pa, pb);
    BootstrapOptions opts;
    opts.replicas = 40;
    const auto rep = appendix_b_audit(l, r, 0.5, 0.1, opts);
    CHECK(rep.holds);
    CHECK(rep.gap > 3.0 * rep.standard_error);
}
