#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sscopic/error.hpp"
#include "sscopic/states.hpp"

using namespace sscopic;
using doctest::Approx;

namespace {

const double kPi = std::acos(-1.0);

double sample_variance(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

}  // namespace

TEST_CASE("state validation") {
    CHECK_THROWS_AS(StateModel(Squeezed{-0.1}), Error);
    CHECK_THROWS_AS(StateModel(TwoModeSqueezed{-1.0}), Error);
    CHECK_THROWS_AS(StateModel(PhenomGaussian{0.5, 1.5}), Error);
    CHECK_NOTHROW(StateModel(PhenomGaussian{2.0, 0.5}));
}

TEST_CASE("x laws") {
    const auto c = pdf_x(StateModel(Coherent{2.5})).moments();
    CHECK(c.mean == Approx(5.0));
    CHECK(c.variance == Approx(1.0));
    CHECK(pdf_x(StateModel(Squeezed{1.3})).moments().variance == Approx(std::exp(2.6)).epsilon(1e-14));
    CHECK(pdf_x(StateModel(TwoModeSqueezed{0.7})).moments().variance == Approx(std::cosh(1.4)).epsilon(1e-14));
}

TEST_CASE("p laws") {
    for (double a : {0.1, 0.5, 1.0, 2.0}) {
        const double want = 1.0 - 4.0 * a * a * std::exp(-4.0 * a * a);
        CHECK(pdf_p(StateModel(Cat{a})).moments().variance == Approx(want).epsilon(1e-12));
    }
    CHECK(pdf_p(StateModel(Cat{0.5})).moments().variance == Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(pdf_p(StateModel(Cat{4.0})).moments().variance == Approx(1.0).epsilon(1e-12));
    const auto vac = pdf_p(StateModel(Squeezed{0.0})).moments();
    CHECK(vac.mean == Approx(0.0));
    CHECK(vac.variance == Approx(1.0));
}

TEST_CASE("squeezed states saturate the uncertainty bound") {
    for (double r : {0.0, 0.3, 1.0, 2.0, 3.5}) {
        const StateModel s(Squeezed{r});
        CHECK(pdf_x(s).moments().variance * pdf_p(s).moments().variance == Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("cat fringe law is a probability density") {
    using boost::math::quadrature::gauss_kronrod;
    for (double a : {0.2, 0.5, 1.3, 3.0}) {
        const auto d = pdf_p(StateModel(Cat{a}));
        for (double p = -8.0; p <= 8.0; p += 0.01) CHECK(d.pdf(p) >= 0.0);
        const double total = gauss_kronrod<double, 61>::integrate([&](double p) { return d.pdf(p); }, -40.0, 40.0, 20, 1e-14);
        CHECK(total == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("sum quadrature laws") {
    const auto [x0, p0] = sum_quadrature_laws(StateModel(TwoModeSqueezed{0.0}));
    CHECK(x0.moments().variance == Approx(1.0));
    CHECK(p0.moments().variance == Approx(1.0));
    const auto [x1, p1] = sum_quadrature_laws(StateModel(TwoModeSqueezed{1.0}));
    CHECK(x1.moments().variance == Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(p1.moments().variance == Approx(std::exp(-2.0)).epsilon(1e-14));
    for (double r : {0.2, 0.9, 2.4}) {
        const auto [x, p] = sum_quadrature_laws(StateModel(TwoModeSqueezed{r}));
        CHECK(x.moments().variance * p.moments().variance == Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(sum_quadrature_laws(StateModel(Squeezed{1.0})), Error);
}

TEST_CASE("density matrix elements") {
    const StateModel coh(Coherent{2.5}), cat(Cat{2.5});
    CHECK(std::abs(density_matrix_element(coh, 5.0, 5.0)) == Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-14));
    CHECK(std::abs(density_matrix_element(coh, 5.0, 10.0)) ==
          Approx(std::exp(-25.0 / 4.0) / std::sqrt(2.0 * kPi)).epsilon(1e-12));
    const double a = 2.5;
    CHECK(std::abs(density_matrix_element(cat, 5.0, -5.0)) ==
          Approx((1.0 - std::exp(-8.0 * a * a)) / (2.0 * std::sqrt(2.0 * kPi))).epsilon(1e-12));
}

TEST_CASE("density matrix diagonal is the x law and the matrix is Hermitian") {
    for (const StateModel s : {StateModel(Coherent{0.7}), StateModel(Cat{0.4}), StateModel(Cat{1.8}),
                               StateModel(Squeezed{0.9})}) {
        const auto law = pdf_x(s);
        for (double x = -6.0; x <= 6.0; x += 0.37) {
            CHECK(std::abs(density_matrix_element(s, x, x).real() - law.pdf(x)) < 1e-12);
            CHECK(std::abs(density_matrix_element(s, x, x).imag()) < 1e-12);
            for (double y = -4.0; y <= 4.0; y += 1.3) {
                const auto e = density_matrix_element(s, x, y), f = density_matrix_element(s, y, x);
                CHECK(std::abs(e - std::conj(f)) < 1e-14);
            }
        }
    }
}

TEST_CASE("two-mode inference closed form") {
    const auto r0 = tmss_inference(0.0);
    CHECK(r0.gain == Approx(0.0));
    CHECK(r0.variance == Approx(1.0));
    // The regression gain for cov = -sinh 2r, var = cosh 2r.
    const auto r1 = tmss_inference(1.0);
    CHECK(r1.gain == Approx(-std::tanh(2.0)).epsilon(1e-14));
    CHECK(r1.variance == Approx(1.0 / std::cosh(2.0)).epsilon(1e-14));
    CHECK(r1.variance == Approx(0.2658).epsilon(1e-3));
    for (double r : {0.1, 0.8, 2.0}) {
        const StateModel s(TwoModeSqueezed{r});
        CHECK(pdf_x(s).moments().variance * tmss_inference(r).variance == Approx(1.0).epsilon(1e-14));
        const auto m = tmss_joint_p_moments(r);
        const double residual = m.var_a - m.cov * m.cov / m.var_b;
        CHECK(residual == Approx(tmss_inference(r).variance).epsilon(1e-12));
    }
}

TEST_CASE("samplers reproduce their laws") {
    const auto sq = sample(StateModel(Squeezed{1.0}), Quadrature::X, 1000000, 1);
    CHECK(sample_variance(sq) == Approx(std::exp(2.0)).epsilon(0.01));
    const auto cat = sample(StateModel(Cat{0.5}), Quadrature::P, 1000000, 2);
    CHECK(sample_variance(cat) == Approx(1.0 - std::exp(-1.0)).epsilon(0.01));
    const auto catx = sample(StateModel(Cat{1.5}), Quadrature::X, 200000, 3);
    CHECK(sample_variance(catx) == Approx(1.0 + 9.0).epsilon(0.02));
    CHECK(sample(StateModel(Cat{0.5}), Quadrature::P, 1000, 9) == sample(StateModel(Cat{0.5}), Quadrature::P, 1000, 9));
    CHECK(sample(StateModel(Cat{0.5}), Quadrature::P, 1000, 9) != sample(StateModel(Cat{0.5}), Quadrature::P, 1000, 10));
}

TEST_CASE("joint sampler second moments within 3 standard errors") {
    const double r = 0.8;
    const std::size_t n = 1000000;
    const auto j = sample_joint_p(StateModel(TwoModeSqueezed{r}), n, 17);
    const auto m = tmss_joint_p_moments(r);
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < n; ++i) {
        saa += j.pa()[i] * j.pa()[i];
        sbb += j.pb()[i] * j.pb()[i];
        sab += j.pa()[i] * j.pb()[i];
    }
    saa /= n;
    sbb /= n;
    sab /= n;
    // Gaussian standard errors of second moments.
    const double se_a = m.var_a * std::sqrt(2.0 / n), se_b = m.var_b * std::sqrt(2.0 / n);
    const double se_ab = std::sqrt((m.var_a * m.var_b + m.cov * m.cov) / n);
    CHECK(std::abs(saa - m.var_a) < 3 * se_a);
    CHECK(std::abs(sbb - m.var_b) < 3 * se_b);
    CHECK(std::abs(sab - m.cov) < 3 * se_ab);

    const auto sx = sample_sum(StateModel(TwoModeSqueezed{1.0}), Quadrature::P, 200000, 5);
    CHECK(sample_variance(sx) == Approx(std::exp(-2.0)).epsilon(0.02));
}
