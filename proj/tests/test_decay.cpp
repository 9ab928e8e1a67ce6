#include "oracles.hpp"
#include "wfrlab/decay.hpp"
#include "wfrlab/errors.hpp"

#include <doctest.h>

using namespace wfr;

namespace {

const GaussianDist kPiLeft = make_gaussian_1d(20, 100);
const GaussianDist kInitLeft = make_gaussian_1d(0, 1);
const GaussianDist kPiRight = make_gaussian_1d(20, 1);
const GaussianDist kInitRight = make_gaussian_1d(0, 100);

DecaySetup setup(const GaussianDist& pi, const GaussianDist& init, double g) { return DecaySetup(WfrContext(pi), init, g); }

double scalar(const SymMatrix& m) { return m.mat()(0, 0); }

DecaySetup setup_10d() {
    Mat cp = Mat::Zero(10, 10);
    for (int i = 0; i < 10; ++i) cp(i, i) = i + 1.0;
    return setup(make_gaussian(Vec::Ones(10), cp), make_gaussian(Vec::Zero(10), cp + Mat::Identity(10, 10)), 0.7);
}

}  // namespace

TEST_CASE("omega in 1D") {
    const DecaySetup s = setup(make_gaussian_1d(0, 1), make_gaussian_1d(1, 2), 0.7);
    CHECK(scalar(omega(SchemeKind::Exact, s)) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    const DecaySetup tiny = setup(make_gaussian_1d(0, 1), make_gaussian_1d(1, 2), 1e-7);
    CHECK(std::abs(scalar(omega(SchemeKind::SplitWFR, tiny)) - 1.0 / 3.0) < 1e-6);

    const DecaySetup left = setup(kPiLeft, kInitLeft, 0.7);
    const double lam = 1.0 / 100 + 0.5;
    const double beta = std::expm1(0.7) / std::expm1(2 * 0.7 * lam);
    CHECK(scalar(omega(SchemeKind::SplitWFR, left)) == doctest::Approx(beta).epsilon(1e-13));
    CHECK(scalar(omega(SchemeKind::SplitFRW, left)) == doctest::Approx(beta * std::exp(2 * 0.7 / 100)).epsilon(1e-13));
}

TEST_CASE("omega limits as the step shrinks") {
    double prev = 1.0;
    for (int k = 2; k <= 6; ++k) {
        const DecaySetup s = setup(kPiLeft, kInitLeft, std::pow(10.0, -k));
        const double o = scalar(omega(SchemeKind::Exact, s));
        const double e = std::max(std::abs(scalar(omega(SchemeKind::SplitWFR, s)) - o),
                                  std::abs(scalar(omega(SchemeKind::SplitFRW, s)) - o));
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("j_n") {
    const DecaySetup s = setup(kPiLeft, kInitLeft, 0.7);
    const SymMatrix b = omega(SchemeKind::Exact, s);
    CHECK(scalar(j_n(b, 0, s)) == doctest::Approx(-99.0).epsilon(1e-14));
    const double lam = 1.0 / 100 + 0.5, e0 = -99.0, bb = scalar(b);
    for (int n : {1, 3, 10}) {
        const double decay = std::exp(-2 * n * 0.7 * lam);
        const double expect = decay / (1.0 / e0 + bb / 100.0 * (1 - decay));
        CHECK(scalar(j_n(b, n, s)) == doctest::Approx(expect).epsilon(1e-12));
    }
    const WfrContext ctx(kPiLeft);
    CHECK(std::abs(scalar(j_n(b, 3, s)) - (wfr_exact(ctx, kInitLeft, 2.1).cov.mat()(0, 0) - 100.0)) < 1e-9);
    const auto traj = iterate_split(ctx, kInitLeft, SplitOrder::WThenFR, 0.7, 6);
    CHECK(std::abs(scalar(j_n(omega(SchemeKind::SplitWFR, s), 3, s)) - (traj[3].dist.cov.mat()(0, 0) - 100.0)) < 1e-9);
    CHECK(std::abs(scalar(j_n(omega(SchemeKind::SplitWFR, s), 6, s)) - (traj[6].dist.cov.mat()(0, 0) - 100.0)) < 1e-9);
}

TEST_CASE("phi_n reproduces the trajectory KL") {
    for (const auto& [pi, init] : {std::pair{kPiLeft, kInitLeft}, std::pair{kPiRight, kInitRight}}) {
        const DecaySetup s = setup(pi, init, 0.7);
        const WfrContext ctx(pi);
        CHECK(phi_n(SymMatrix::zero(1), 5, s) >= 0.0);
        const auto wfr = iterate_split(ctx, init, SplitOrder::WThenFR, 0.7, 30);
        const auto frw = iterate_split(ctx, init, SplitOrder::FRThenW, 0.7, 30);
        for (int n = 1; n <= 30; ++n) {
            CHECK(std::abs(phi_n(j_n(omega(SchemeKind::Exact, s), n, s), n, s) -
                           kl_gaussian(wfr_exact(ctx, init, n * 0.7), pi)) < 1e-9);
            CHECK(std::abs(phi_n(j_n(omega(SchemeKind::SplitWFR, s), n, s), n, s) - kl_gaussian(wfr[n].dist, pi)) < 1e-9);
            CHECK(std::abs(phi_n(j_n(omega(SchemeKind::SplitFRW, s), n, s), n, s) - kl_gaussian(frw[n].dist, pi)) < 1e-9);
        }
    }
}

TEST_CASE("phi_n of the zero gap with a centered start is zero") {
    const DecaySetup s = setup(make_gaussian_1d(0, 2), make_gaussian_1d(0, 3), 0.5);
    CHECK(phi_n(SymMatrix::zero(1), 4, s) == 0.0);
    CHECK_THROWS_AS(phi_n(SymMatrix(Mat::Constant(1, 1, -4.0)), 4, s), DomainError);
}

TEST_CASE("phi_n_scaled agrees with phi_n where both are representable") {
    const DecaySetup s = setup_10d();
    for (SchemeKind k : {SchemeKind::Exact, SchemeKind::SplitWFR, SchemeKind::SplitFRW})
        for (int n : {1, 10, 50}) {
            const SymMatrix b = omega(k, s);
            CHECK(phi_n_scaled(b, n, s).value() == doctest::Approx(phi_n(j_n(b, n, s), n, s)).epsilon(1e-9));
        }
}

TEST_CASE("classify_definiteness") {
    CHECK(classify_definiteness(setup(kPiLeft, make_gaussian_1d(0, 101), 0.7)).kind == DefinitenessCase::Positive);
    const DecaySetup neg = setup(kPiLeft, kInitLeft, 0.7);
    const Definiteness d = classify_definiteness(neg);
    CHECK(d.kind == DefinitenessCase::Negative);
    // E0^{-1} C_pi = -100/99 against each scalar Omega
    for (SchemeKind k : {SchemeKind::Exact, SchemeKind::SplitWFR, SchemeKind::SplitFRW})
        CHECK(-100.0 / 99.0 + scalar(omega(k, neg)) < 0.0);
    const DecaySetup mixed(WfrContext(make_gaussian(Vec::Zero(2), Mat::Identity(2, 2) * 2.0)),
                           make_gaussian(Vec::Ones(2), (Vec(2) << 3.0, 1.0).finished().asDiagonal()), 0.7);
    CHECK(classify_definiteness(mixed).kind == DefinitenessCase::Neither);
    CHECK_THROWS_AS(asymptotic_ratio(SchemeKind::SplitWFR, mixed), DomainError);
}

TEST_CASE("asymptotic_ratio direction and invariance") {
    CHECK(asymptotic_ratio(SchemeKind::SplitWFR, setup(kPiLeft, kInitLeft, 0.7)) < 1.0);
    CHECK(asymptotic_ratio(SchemeKind::SplitFRW, setup(kPiRight, kInitRight, 0.7)) < 1.0);
    for (SchemeKind k : {SchemeKind::SplitWFR, SchemeKind::SplitFRW}) {
        const double r5 = asymptotic_ratio(k, setup(kPiLeft, make_gaussian_1d(15, 1), 0.7));
        const double r50 = asymptotic_ratio(k, setup(kPiLeft, make_gaussian_1d(70, 1), 0.7));
        CHECK(std::abs(r5 - r50) < 1e-10);
    }
    CHECK_THROWS_AS(asymptotic_ratio(SchemeKind::Exact, setup(kPiLeft, kInitLeft, 0.7)), DomainError);
    CHECK_THROWS_AS(asymptotic_ratio(SchemeKind::SplitWFR, setup(kPiLeft, make_gaussian_1d(20, 1), 0.7)),
                    DegenerateRatioError);
}

TEST_CASE("empirical ratio converges to the asymptotic ratio") {
    for (const DecaySetup& s : {setup(kPiLeft, kInitLeft, 0.7), setup(kPiRight, kInitRight, 0.7), setup_10d()})
        for (SchemeKind k : {SchemeKind::SplitWFR, SchemeKind::SplitFRW})
            CHECK(std::abs(kl_ratio(k, 400, s) - asymptotic_ratio(k, s)) < 1e-4);
}

TEST_CASE("definiteness of J_n is preserved") {
    const DecaySetup pos = setup_10d();
    const DecaySetup neg = setup(make_gaussian_1d(0, 4), make_gaussian_1d(1, 1), 0.7);
    REQUIRE(classify_definiteness(neg).kind == DefinitenessCase::Negative);
    for (SchemeKind k : {SchemeKind::Exact, SchemeKind::SplitWFR, SchemeKind::SplitFRW})
        for (int n = 1; n <= 100; ++n) {
            CHECK(min_eig(j_n(omega(k, pos), n, pos)) > 0.0);
            CHECK(max_eig(j_n(omega(k, neg), n, neg)) < 0.0);
        }
}

TEST_CASE("bound_min_rule") {
    const DecaySetup s = setup(kPiLeft, kInitLeft, 1.0);
    const WfrContext ctx(kPiLeft);
    CHECK(bound_min_rule(s, 0.0) == doctest::Approx(kl_gaussian(kInitLeft, kPiLeft)));
    CHECK(bound_min_rule(s, 2.0) - kl_gaussian(wfr_exact(ctx, kInitLeft, 2.0), kPiLeft) > 0.0);
    CHECK(bound_min_rule(s, 60.0) < 1e-8);
    CHECK(kl_gaussian(wfr_exact(ctx, kInitLeft, 60.0), kPiLeft) < 1e-8);
    for (int i = 0; i < 200; ++i) {
        const double t = 20.0 * i / 199.0;
        CHECK(bound_min_rule(s, t) >= kl_gaussian(wfr_exact(ctx, kInitLeft, t), kPiLeft));
    }
}

TEST_CASE("bound_sharp") {
    const DecaySetup s = setup(kPiLeft, kInitLeft, 1.0);
    // log pi - log mu0 = a x^2 + b x + c, minimized in closed form.
    const double a = 0.5 - 0.5 / 100, b = 20.0 / 100, c = -0.5 * std::log(100.0) - 0.5 * 400.0 / 100;
    const double m = -(c - b * b / (4 * a));
    REQUIRE(sharp_bound_m(s).has_value());
    CHECK(*sharp_bound_m(s) == doctest::Approx(m).epsilon(1e-12));
    CHECK(m == doctest::Approx(4.3228).epsilon(1e-4));
    const double t0 = std::log(m / 1e-3);
    CHECK(*sharp_bound_t0(s, 0.1) == doctest::Approx(t0).epsilon(1e-12));
    CHECK(*bound_sharp(s, t0, 0.1) == doctest::Approx(kl_gaussian(kInitLeft, kPiLeft)).epsilon(1e-12));
    CHECK_FALSE(bound_sharp(s, t0 - 0.1, 0.1).has_value());
    const WfrContext ctx(kPiLeft);
    for (double t = t0; t <= 40.0; t += 0.1) CHECK(*bound_sharp(s, t, 0.1) >= kl_gaussian(wfr_exact(ctx, kInitLeft, t), kPiLeft));
    // The figure's t_0 = 6.9 corresponds to M = 1.
    CHECK(*sharp_bound_t0(s, 0.1, 1.0) == doctest::Approx(std::log(1000.0)));
    for (double t = std::log(1000.0); t <= 12.0; t += 0.05)
        CHECK(*bound_sharp(s, t, 0.1, 1.0) >= kl_gaussian(wfr_exact(ctx, kInitLeft, t), kPiLeft));
    CHECK_FALSE(sharp_bound_m(setup(kPiRight, kInitRight, 1.0)).has_value());
    CHECK_FALSE(bound_sharp(setup(kPiRight, kInitRight, 1.0), 50.0, 0.1).has_value());
    CHECK_THROWS_AS(bound_sharp(s, 10.0, 1.5), DomainError);
}

TEST_CASE("jeffreys_bound") {
    const DecaySetup s = setup(kPiLeft, kInitLeft, 1.0);
    const ConvexityConstants k = gaussian_constants(kPiLeft, kInitLeft);
    const double j0 = divergence_report(kInitLeft, kPiLeft).jeffreys;
    CHECK(jeffreys_bound(s, k, 0.0) == j0);
    const WfrContext ctx(kPiLeft);
    CHECK(jeffreys_bound(s, k, 5.0) >= divergence_report(wfr_exact(ctx, kInitLeft, 5.0), kPiLeft).jeffreys);
    CHECK(jeffreys_bound(s, k, 40.0) / j0 <= std::exp(-40.0));
    for (int i = 0; i <= 200; ++i) {
        const double t = 20.0 * i / 200.0;
        const double exact = divergence_report(wfr_exact(ctx, kInitLeft, t), kPiLeft).jeffreys;
        CHECK(jeffreys_bound(s, k, t) >= exact);
        CHECK(jeffreys_bound_fixed(s, k, t) >= exact);
    }
}
