#include "oracles.hpp"
#include "wfrlab/divergences.hpp"
#include "wfrlab/errors.hpp"
#include "wfrlab/pde1d.hpp"

#include <doctest.h>

using namespace wfr;

namespace {

double max_diff(const DensityField& a, const DensityField& b) {
    double m = 0;
    for (int i = 0; i < a.grid().n_points(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double l1(const DensityField& a, const DensityField& b) {
    double s = 0;
    for (int i = 0; i < a.grid().n_points(); ++i) s += a.grid().weight(i) * std::abs(a[i] - b[i]);
    return s;
}

// Cov_nu(f, f'^2) for Gaussian nu = N(b, q), pi = N(mp, c) by Simpson quadrature.
double cov_oracle(double b, double q, double mp, double c) {
    auto f = [&](double x) { return oracle::gauss_logpdf(x, b, q) - oracle::gauss_logpdf(x, mp, c); };
    auto fp = [&](double x) { return -(x - b) / q + (x - mp) / c; };
    auto w = [&](double x) { return std::exp(oracle::gauss_logpdf(x, b, q)); };
    const double lo = b - 14 * std::sqrt(q), hi = b + 14 * std::sqrt(q);
    const int n = 40000;
    const double ef = oracle::simpson([&](double x) { return w(x) * f(x); }, lo, hi, n);
    const double eg = oracle::simpson([&](double x) { return w(x) * fp(x) * fp(x); }, lo, hi, n);
    const double efg = oracle::simpson([&](double x) { return w(x) * f(x) * fp(x) * fp(x); }, lo, hi, n);
    return efg - ef * eg;
}

const TargetSpec1D kMix = TargetSpec1D::mixture({{0.5, -4, 1}, {0.5, 4, 1}});

}  // namespace

TEST_CASE("grid and density construction") {
    CHECK_THROWS_AS(Grid1D(0, 1, 63), DomainError);
    CHECK_THROWS_AS(Grid1D(1, 0, 100), DomainError);
    const Grid1D g(-1, 1, 101);
    std::vector<double> v(101, 1.0);
    v[3] = -1e-3;
    const DensityField d(g, v);
    CHECK(d[3] == 0.0);
    CHECK(d.clamped_mass() > 0.0);
    CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(DensityField(g, std::vector<double>(101, 0.0)), DegenerateDensityError);
    CHECK_THROWS_AS(DensityField(g, std::vector<double>(100, 1.0)), DomainError);
}

TEST_CASE("TargetSpec1D") {
    CHECK_THROWS_AS(TargetSpec1D::mixture({{0.5, 0, 1}, {0.4, 1, 1}}), DomainError);
    CHECK_THROWS_AS(TargetSpec1D::mixture({{1.0, 0, -1}}), DomainError);
    const Grid1D g(-15, 15, 6001);
    std::vector<double> e(g.n_points());
    for (int i = 0; i < g.n_points(); ++i) e[i] = std::exp(kMix.log_density(g.x(i)));
    CHECK(trapezoid(g, e) == doctest::Approx(1.0).epsilon(1e-10));
    for (double x : {-5.0, -0.3, 0.0, 2.5, 7.0}) {
        const double h = 1e-5;
        const double fd = (kMix.log_density(x + h) - kMix.log_density(x - h)) / (2 * h);
        CHECK(kMix.score(x) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(kMix.log_density(-4.0) == doctest::Approx(std::log(0.5 * std::exp(oracle::gauss_logpdf(-4, -4, 1)) +
                                                            0.5 * std::exp(oracle::gauss_logpdf(-4, 4, 1)))));
}

TEST_CASE("fr_step_grid") {
    const TargetSpec1D t = TargetSpec1D::gaussian(1.0, 2.0);
    const Grid1D g = default_grid(t, 0.0, 0.5, 8001);
    const DensityField pih = discretize(t, g);
    CHECK(max_diff(fr_step_grid(t, pih, 0.7), pih) < 1e-12);
    const DensityField mu = discretize_gaussian(0.0, 0.5, g);
    CHECK(max_diff(fr_step_grid(t, mu, 60.0), pih) < 1e-10);
    const DensityField f = fr_step_grid(t, mu, 0.5);
    const double w = std::exp(-0.5), prec = w / 0.5 + (1 - w) / 2.0;
    CHECK(std::abs(f.variance() - 1.0 / prec) < 1e-6);
    CHECK(std::abs(f.mean() - (1 - w) / 2.0 / prec) < 1e-6);
    CHECK(std::abs(f.mass() - 1.0) < 1e-12);
}

TEST_CASE("w_step_grid") {
    const TargetSpec1D t = TargetSpec1D::gaussian(1.0, 2.0);
    const Grid1D g = default_grid(t, 0.0, 0.5, 8001);
    const DensityField mu = discretize_gaussian(0.0, 0.5, g);
    CHECK(max_diff(w_step_grid(t, mu, 0.0), mu) == 0.0);
    const DensityField w = w_step_grid(t, mu, 0.3);
    const double e = std::exp(-0.3 / 2.0);
    CHECK(std::abs(w.mean() - (1.0 + e * (0.0 - 1.0))) < 1e-4);
    CHECK(std::abs(w.variance() - (e * e * 0.5 + 2.0 * (1 - e * e))) < 1e-4);
    CHECK(std::abs(w.mass() - 1.0) < 1e-8);
    const DensityField pih = discretize(t, g);
    CHECK(max_diff(w_step_grid(t, pih, 0.5), pih) < 1e-6);
    CHECK_THROWS_AS(w_step_grid(t, mu, 0.3, 1), StepSizeError);
    CHECK(w_stability_bound(t, g) > 0.0);
}

TEST_CASE("wfr_reference_grid") {
    const TargetSpec1D t = TargetSpec1D::gaussian(1.0, 2.0);
    const Grid1D g = default_grid(t, 0.0, 0.5, 2001);
    const DensityField mu = discretize_gaussian(0.0, 0.5, g);
    CHECK(max_diff(wfr_reference_grid(t, mu, 0.0, 1e-4), mu) == 0.0);
    // Moment ODE of the exact flow, integrated independently.
    auto f = [](const oracle::Vec& y) {
        oracle::Vec o(2);
        o(0) = -(1 + y(1)) * (y(0) - 1.0) / 2.0;
        o(1) = 2 - y(1) + y(1) - y(1) * y(1) / 2.0;
        return o;
    };
    const oracle::Vec m = oracle::rk4(f, (oracle::Vec(2) << 0.0, 0.5).finished(), 1.0, 1e-4);
    const DensityField r = wfr_reference_grid(t, mu, 1.0, 1e-4);
    CHECK(std::abs(r.mean() - m(0)) < 1e-4);
    CHECK(std::abs(r.variance() - m(1)) < 1e-4);
    CHECK_THROWS_AS(wfr_reference_grid(t, mu, 1.0, 1e-2), DomainError);
}

TEST_CASE("wfr_reference_grid self-consistency on the mixture") {
    const Grid1D g = default_grid(kMix, 0.0, 0.5, 1001);
    const DensityField mu = discretize_gaussian(0.0, 0.5, g);
    CHECK(l1(wfr_reference_grid(kMix, mu, 2.0, 1e-4), wfr_reference_grid(kMix, mu, 2.0, 5e-5)) < 1e-5);
}

TEST_CASE("splitting error on the grid is first order") {
    for (const TargetSpec1D& t : {TargetSpec1D::gaussian(1.0, 2.0), kMix}) {
        const Grid1D g = default_grid(t, 0.0, 0.5, 1001);
        const DensityField mu = discretize_gaussian(0.0, 0.5, g);
        const DensityField ph = discretize(t, g);
        const double kr = kl_grid(wfr_reference_grid(t, mu, 2.0, 1e-4), ph);
        for (SplitOrder o : {SplitOrder::WThenFR, SplitOrder::FRThenW}) {
            double gaps[3];
            int i = 0;
            for (double gamma : {0.2, 0.1, 0.05})
                gaps[i++] = std::abs(kl_grid(iterate_split_grid(t, mu, o, gamma, static_cast<int>(std::lround(2 / gamma))), ph) - kr);
            for (int k = 0; k < 2; ++k) {
                CHECK(gaps[k] / gaps[k + 1] >= 1.6);
                CHECK(gaps[k] / gaps[k + 1] <= 2.4);
            }
        }
    }
}

TEST_CASE("cov_diagnostic") {
    const TargetSpec1D t = TargetSpec1D::gaussian(1.0, 3.0);
    const Grid1D g = default_grid(t, 0.0, 1.0, 4001);
    CHECK(std::abs(cov_diagnostic(discretize(t, g), t).value) < 1e-10);
    const TargetSpec1D pi4 = TargetSpec1D::gaussian(0.0, 4.0);
    double prev = 0;
    for (int n : {4001, 16001}) {
        const Grid1D gg = default_grid(pi4, 0.0, 1.0, n);
        const CovDiagnostic c = cov_diagnostic(discretize_gaussian(0.0, 1.0, gg), pi4);
        CHECK(c.reliable);
        if (n == 16001) CHECK(std::abs(c.value - prev) < 1e-6);
        prev = c.value;
    }
    CHECK(prev == doctest::Approx(cov_oracle(0.0, 1.0, 0.0, 4.0)).epsilon(1e-6));
    for (int k = 0; k < 20; ++k) {
        const double q = 0.2 + 0.2 * k, c = q * (1.5 + 0.1 * k), b = -2.0 + 0.3 * k;
        const TargetSpec1D tk = TargetSpec1D::gaussian(1.0, c);
        const double v = cov_diagnostic(discretize_gaussian(b, q, default_grid(tk, b, q, 4001)), tk).value;
        CHECK(v < 0.0);
        CHECK(v == doctest::Approx(cov_oracle(b, q, 1.0, c)).epsilon(1e-4));
    }
}

TEST_CASE("cov_diagnostic for even log-concave ratios") {
    const TargetSpec1D t = TargetSpec1D::gaussian(0.0, 1.0);
    const Grid1D g = default_grid(t, 0.0, 1.0, 4001);
    for (double a : {0.05, 0.2, 0.6})
        for (double q4 : {0.0, 0.01, 0.05}) {
            const DensityField nu =
                DensityField::from_log(g, [&](double x) { return t.log_density(x) - a * x * x - q4 * x * x * x * x; });
            CHECK(cov_diagnostic(nu, t).value < 0.0);
        }
}

TEST_CASE("kl_decay_rhs_wfr_split") {
    const TargetSpec1D t = TargetSpec1D::gaussian(20.0, 100.0);
    const Grid1D g = default_grid(t, 0.0, 1.0, 4001);
    const KlDecayRhs zero = kl_decay_rhs_wfr_split(discretize(t, g), t, 0.5);
    CHECK(std::abs(zero.fisher_term) < 1e-10);
    CHECK(std::abs(zero.variance_term) < 1e-10);
    CHECK(std::abs(zero.perturbation_term) < 1e-10);

    const DensityField mu = discretize_gaussian(0.0, 1.0, g);
    const DensityField ph = discretize(t, g);
    const double gm = 0.5, dg = 1e-3;
    const int ns = w_default_substeps(t, g, gm + dg);
    auto nu = [&](double x) { return fr_step_grid(t, w_step_grid(t, mu, x, ns), x); };
    const KlDecayRhs rhs = kl_decay_rhs_wfr_split(nu(gm), t, gm);
    CHECK(rhs.perturbation_term < 0.0);
    const double fd = (kl_grid(nu(gm + dg), ph) - kl_grid(nu(gm - dg), ph)) / (2 * dg);
    CHECK(std::abs(fd - rhs.total()) / std::abs(fd) < 5e-3);
}

TEST_CASE("frw_perturbation_grid") {
    const TargetSpec1D t = TargetSpec1D::gaussian(0.0, 1.0);
    {
        const DensityField m = discretize_gaussian(0.0, 1.05, default_grid(t, 0.0, 1.05, 2001));
        CHECK(std::abs(frw_perturbation_grid(frw_trajectory(t, m, 1e-4, 4), t, 1e-4, 4)) < 1e-6);
    }
    for (double c0 : {2.0, 4.0}) {
        const DensityField m = discretize_gaussian(0.0, c0, default_grid(t, 0.0, c0, 2001));
        CHECK(frw_perturbation_grid(frw_trajectory(t, m, 0.5, 8), t, 0.5, 8) > 0.0);
    }
    double v[2];
    int i = 0;
    for (int n : {4001, 8001}) {
        const DensityField m = discretize_gaussian(0.0, 0.5, default_grid(kMix, 0.0, 0.5, n));
        v[i++] = frw_perturbation_grid(frw_trajectory(kMix, m, 0.5, 8), kMix, 0.5, 8);
    }
    CHECK(std::abs(v[0] - v[1]) / std::abs(v[1]) < 1e-4);
    const DensityField m = discretize_gaussian(0.0, 0.5, default_grid(kMix, 0.0, 0.5, 1001));
    CHECK_THROWS_AS(frw_perturbation_grid(frw_trajectory(kMix, m, 0.5, 3), kMix, 0.5, 3), DomainError);
}
