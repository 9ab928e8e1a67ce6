#include "wfrlab/validate.hpp"

#include "wfrlab/config.hpp"
#include "wfrlab/decay.hpp"
#include "wfrlab/divergences.hpp"
#include "wfrlab/errors.hpp"
#include "wfrlab/gaussian_flows.hpp"
#include "wfrlab/logconcavity.hpp"
#include "wfrlab/pde1d.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>

namespace wfr {

namespace {

using Rng = std::mt19937_64;

class Suite {
public:
    Suite(std::string name, std::vector<CheckResult>& out) : name_(std::move(name)), out_(out) {}

    /// Pass when residual <= tol.
    void le(const std::string& check, double residual, double tol, std::string detail = {}) {
        out_.push_back({name_, check, residual, tol, residual <= tol, std::move(detail)});
    }
    /// Boolean property; residual is the number of violating cases.
    void count(const std::string& check, int violations, std::string detail = {}) {
        out_.push_back({name_, check, static_cast<double>(violations), 0.0, violations == 0, std::move(detail)});
    }

private:
    std::string name_;
    std::vector<CheckResult>& out_;
};

Mat random_sym(Rng& rng, int d, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = u(rng);
    return 0.5 * (a + a.transpose());
}

Mat random_spd(Rng& rng, int d, double floor) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat b(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) b(i, j) = u(rng);
    return b * b.transpose() / d + floor * Mat::Identity(d, d);
}

Vec random_vec(Rng& rng, int d, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = u(rng);
    return v;
}

double dist(const GaussianDist& a, const GaussianDist& b) {
    return std::max((a.mean - b.mean).cwiseAbs().maxCoeff(), max_abs(a.cov.mat() - b.cov.mat()));
}

struct Pair {
    GaussianDist target, init;
};

Pair fig1_left() { return {make_gaussian_1d(20, 100), make_gaussian_1d(0, 1)}; }
Pair fig1_right() { return {make_gaussian_1d(20, 1), make_gaussian_1d(0, 100)}; }

Pair instance_10d() {
    Mat cp = Mat::Zero(10, 10);
    for (int i = 0; i < 10; ++i) cp(i, i) = i + 1.0;
    return {make_gaussian(Vec::Ones(10), cp), make_gaussian(Vec::Zero(10), cp + Mat::Identity(10, 10))};
}

std::string fmt(double v) { return format_double(v); }

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

void suite_linalg(std::vector<CheckResult>& out, Rng& rng) {
    Suite s("linalg", out);
    std::uniform_real_distribution<double> st(-2.0, 2.0);
    double semi = 0, comm = 0, inv = 0, ld = 0;
    for (int k = 0; k < 30; ++k) {
        const int d = 1 + k % 6;
        const SymMatrix a(random_sym(rng, d, 0.5));
        const double x = st(rng), y = st(rng);
        semi = std::max(semi, max_abs(sym_expm(a, x).mat() * sym_expm(a, y).mat() - sym_expm(a, x + y).mat()));
        const Mat e = sym_expm(a, x).mat();
        comm = std::max(comm, max_abs(a.mat() * e - e * a.mat()));
        const SpdMatrix p{SymMatrix(random_spd(rng, d, 0.3))};
        inv = std::max(inv, max_abs(spd_inverse(spd_inverse(p)).mat() - p.mat()));
        ld = std::max(ld, std::abs(logdet(p) + logdet(spd_inverse(p))));
    }
    s.le("expm-semigroup", semi, 1e-10);
    s.le("expm-commutes", comm, 1e-10);
    s.le("inverse-involution", inv, 1e-10);
    s.le("logdet-inverse", ld, 1e-10);
}

void suite_composition(std::vector<CheckResult>& out, Rng& rng) {
    Suite s("gaussian-composition", out);
    const int dims[3] = {1, 2, 5};
    const double gammas[3] = {0.1, 0.7, 2.0};
    double wfr = 0, frw = 0, mt = 0;
    for (int k = 0; k < 50; ++k) {
        const int d = dims[k % 3];
        const double g = gammas[(k / 3) % 3];
        const WfrContext ctx(make_gaussian(random_vec(rng, d, 2.0), random_spd(rng, d, 0.2)));
        const GaussianDist v = make_gaussian(random_vec(rng, d, 2.0), random_spd(rng, d, 0.2));
        const GaussianDist sw = split_step(ctx, v, SplitOrder::WThenFR, g);
        const GaussianDist sf = split_step(ctx, v, SplitOrder::FRThenW, g);
        wfr = std::max(wfr, dist(fr_step(ctx, w_step(ctx, v, g), g), sw));
        frw = std::max(frw, dist(w_step(ctx, fr_step(ctx, v, g), g), sf));
        if (!is_degenerate(ctx, v)) {
            mt = std::max(mt, dist(general_mt_solution(ctx, v, MtSpec::split_wfr(g), g), sw));
            mt = std::max(mt, dist(general_mt_solution(ctx, v, MtSpec::split_frw(g), g), sf));
        }
    }
    s.le("wfr-equals-composition", wfr, 1e-10, "50 random configurations, d in {1,2,5}");
    s.le("frw-equals-composition", frw, 1e-10, "50 random configurations, d in {1,2,5}");
    s.le("general-mt-equals-split", mt, 1e-9);
}

void suite_gaussian_flows(std::vector<CheckResult>& out, Rng& rng) {
    Suite s("gaussian-flows", out);
    // Mean universality.
    double uni = 0;
    for (int k = 0; k < 20; ++k) {
        const int d = 1 + k % 4;
        const Mat cp = random_spd(rng, d, 0.3);
        const WfrContext ctx(make_gaussian(random_vec(rng, d, 2.0), cp));
        const GaussianDist v = make_gaussian(random_vec(rng, d, 2.0), cp + random_spd(rng, d, 0.2));
        const Vec eps = v.mean - ctx.target().mean;
        const Mat gap_inv = (v.cov.mat() - cp).inverse();
        for (double t : {0.3, 1.0, 2.0}) {
            const SymMatrix grow = sym_expm(ctx.c_pi_inv().sym(), t);
            for (const GaussianDist& r : {wfr_exact(ctx, v, t), general_mt_solution(ctx, v, MtSpec::split_wfr(t), t),
                                          general_mt_solution(ctx, v, MtSpec::split_frw(t), t)}) {
                const Vec pred = (r.cov.mat() - cp) * grow.mat() * gap_inv * eps;
                uni = std::max(uni, (r.mean - ctx.target().mean - pred).cwiseAbs().maxCoeff() /
                                        std::max(1.0, eps.cwiseAbs().maxCoeff()));
            }
        }
    }
    s.le("mean-universality", uni, 1e-9);

    // pi-invariance.
    double inv = 0;
    for (int k = 0; k < 10; ++k) {
        const int d = 1 + k % 5;
        const WfrContext ctx(make_gaussian(random_vec(rng, d, 3.0), random_spd(rng, d, 0.2)));
        const GaussianDist& p = ctx.target();
        for (double t : {0.1, 0.7, 2.0}) {
            inv = std::max({inv, dist(wfr_exact(ctx, p, t), p), dist(w_step(ctx, p, t), p), dist(fr_step(ctx, p, t), p),
                            dist(split_step(ctx, p, SplitOrder::WThenFR, t), p),
                            dist(split_step(ctx, p, SplitOrder::FRThenW, t), p)});
        }
    }
    s.le("pi-invariance", inv, 1e-12);

    // First-order splitting convergence.
    for (const auto& [label, pair] : std::vector<std::pair<std::string, Pair>>{
             {"fig1-left", fig1_left()}, {"fig1-right", fig1_right()}, {"10d", instance_10d()}}) {
        const WfrContext ctx(pair.target);
        const GaussianDist exact = wfr_exact(ctx, pair.init, 2.0);
        for (SplitOrder o : {SplitOrder::WThenFR, SplitOrder::FRThenW}) {
            double prev = 0, lo = 1e300, hi = 0;
            for (double g : {0.2, 0.1, 0.05}) {
                const int n = static_cast<int>(std::lround(2.0 / g));
                const double e = dist(iterate_split(ctx, pair.init, o, g, n).back().dist, exact);
                if (prev > 0) {
                    lo = std::min(lo, prev / e);
                    hi = std::max(hi, prev / e);
                }
                prev = e;
            }
            const double off = std::max(1.6 - lo, hi - 2.4);
            s.le(std::string("first-order-") + (o == SplitOrder::WThenFR ? "wfr-" : "frw-") + label, std::max(0.0, off),
                 0.0, "halving ratios in [" + fmt(lo) + ", " + fmt(hi) + "]");
        }
    }

    // Closed forms vs RK4 oracle.
    double ode = 0;
    for (const Pair& pair : {fig1_left(), fig1_right()}) {
        const WfrContext ctx(pair.target);
        for (double t : {0.5, 2.0}) {
            ode = std::max(ode, dist(moment_ode_integrate(ctx, pair.init, MtSpec::zero(), t, 1e-4),
                                     wfr_exact(ctx, pair.init, t)));
            for (const MtSpec& m : {MtSpec::split_wfr(t), MtSpec::split_frw(t)}) {
                const GaussianDist closed = general_mt_solution(ctx, pair.init, m, t);
                const SplitOrder o = m.kind == MtKind::WfrSplitWFR ? SplitOrder::WThenFR : SplitOrder::FRThenW;
                ode = std::max({ode, dist(moment_ode_integrate(ctx, pair.init, m, t, 1e-4), closed),
                                dist(split_step(ctx, pair.init, o, t), closed)});
            }
        }
    }
    s.le("ode-oracle", ode, 1e-6, "RK4 dt=1e-4, t in {0.5, 2}");
}

void suite_divergences(std::vector<CheckResult>& out, Rng& rng, std::uint64_t seed) {
    Suite s("divergences", out);
    int bad = 0;
    double self = 0, jeff = 0;
    for (int k = 0; k < 40; ++k) {
        const int d = 1 + k % 5;
        const GaussianDist a = make_gaussian(random_vec(rng, d, 2.0), random_spd(rng, d, 0.2));
        const GaussianDist b = make_gaussian(random_vec(rng, d, 2.0), random_spd(rng, d, 0.2));
        bad += !(kl_gaussian(a, b) > 0.0);
        self = std::max(self, kl_gaussian(a, a));
        const DivergenceReport r = divergence_report(a, b);
        jeff = std::max(jeff, std::abs(r.jeffreys - r.kl_forward - r.kl_reverse));
    }
    s.count("kl-positive", bad, "40 random distinct pairs");
    s.le("kl-zero-at-equality", self, 1e-12);
    s.le("jeffreys-sum", jeff, 1e-12);

    // Grid KL converges monotonically toward the closed form.
    const GaussianDist a = make_gaussian_1d(0.3, 0.7), b = make_gaussian_1d(-0.5, 1.6);
    const double exact = kl_gaussian(a, b);
    double prev = 1e300;
    int non_mono = 0;
    double gap = 0;
    std::string gaps;
    for (int n : {1001, 4001, 16001}) {
        const Grid1D g = default_kl_grid(a, b, n);
        gap = std::abs(kl_grid(discretize_gaussian(0.3, 0.7, g), discretize_gaussian(-0.5, 1.6, g)) - exact);
        // Trapezoid error on Gaussians is spectrally small; below 1e-12 only rounding remains.
        non_mono += gap > prev + 1e-12;
        prev = gap;
        gaps += (gaps.empty() ? "" : " ") + fmt(gap);
    }
    s.count("grid-kl-monotone", non_mono, "gaps " + gaps);
    s.le("grid-kl-final-gap", gap, 1e-6, "16001 points");

    // Monte Carlo oracle for KL and Fisher information (3D).
    Rng mc(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const GaussianDist p = make_gaussian((Vec(3) << 0.5, -1.0, 0.2).finished(),
                                         (Mat(3, 3) << 1.2, 0.3, 0.0, 0.3, 0.8, 0.1, 0.0, 0.1, 0.5).finished());
    const GaussianDist q = make_gaussian((Vec(3) << 0.0, 0.0, 1.0).finished(),
                                         (Mat(3, 3) << 2.0, -0.2, 0.1, -0.2, 1.0, 0.0, 0.1, 0.0, 1.5).finished());
    const Mat lp = p.cov.mat().llt().matrixL();
    const Mat pp = p.cov.mat().inverse(), pq = q.cov.mat().inverse();
    const double norm = 0.5 * (std::log(q.cov.mat().determinant()) - std::log(p.cov.mat().determinant()));
    const int n = 200000;
    double s1 = 0, s2 = 0, f1 = 0, f2 = 0;
    for (int i = 0; i < n; ++i) {
        Vec e(3);
        for (int j = 0; j < 3; ++j) e(j) = z(mc);
        const Vec x = p.mean + lp * e;
        const Vec dp = x - p.mean, dq = x - q.mean;
        const double l = norm - 0.5 * dp.dot(pp * dp) + 0.5 * dq.dot(pq * dq);
        const double f = (-pp * dp + pq * dq).squaredNorm();
        s1 += l;
        s2 += l * l;
        f1 += f;
        f2 += f * f;
    }
    const double kl_mc = s1 / n, kl_se = std::sqrt((s2 / n - kl_mc * kl_mc) / n);
    const double fi_mc = f1 / n, fi_se = std::sqrt((f2 / n - fi_mc * fi_mc) / n);
    s.le("kl-monte-carlo", std::abs(kl_gaussian(p, q) - kl_mc) / kl_se, 5.0,
         "z-score, n=200000, seed=" + std::to_string(seed));
    s.le("fisher-monte-carlo", std::abs(fisher_info_gaussian(p, q) - fi_mc) / fi_se, 5.0,
         "z-score, n=200000, seed=" + std::to_string(seed));
}

void suite_decay(std::vector<CheckResult>& out) {
    Suite s("decay", out);
    const SchemeKind kinds[3] = {SchemeKind::Exact, SchemeKind::SplitWFR, SchemeKind::SplitFRW};

    double lemma = 0;
    for (const Pair& pair : {fig1_left(), fig1_right()}) {
        const double g = 0.7;
        const WfrContext ctx(pair.target);
        const DecaySetup st(ctx, pair.init, g);
        for (SchemeKind k : kinds) {
            const SymMatrix om = omega(k, st);
            std::vector<GaussianDist> traj;
            if (k == SchemeKind::Exact) {
                for (int n = 1; n <= 30; ++n) traj.push_back(wfr_exact(ctx, pair.init, n * g));
            } else {
                const auto it = iterate_split(ctx, pair.init, k == SchemeKind::SplitWFR ? SplitOrder::WThenFR
                                                                                         : SplitOrder::FRThenW, g, 30);
                for (int n = 1; n <= 30; ++n) traj.push_back(it[n].dist);
            }
            for (int n = 1; n <= 30; ++n)
                lemma = std::max(lemma, std::abs(phi_n(j_n(om, n, st), n, st) - kl_gaussian(traj[n - 1], pair.target)));
        }
    }
    s.le("phi-jn-equals-kl", lemma, 1e-9, "n=1..30, three kinds, both 1D configurations");

    {
        const Pair pair = fig1_left();
        const WfrContext ctx(pair.target);
        double prev_b = 1e300, prev_a = 1e300;
        int non_mono = 0;
        double last = 0;
        for (int k = 2; k <= 6; ++k) {
            const DecaySetup st(ctx, pair.init, std::pow(10.0, -k));
            const Mat o = omega(SchemeKind::Exact, st).mat();
            const double eb = max_abs(omega(SchemeKind::SplitWFR, st).mat() - o);
            const double ea = max_abs(omega(SchemeKind::SplitFRW, st).mat() - o);
            non_mono += eb >= prev_b || ea >= prev_a;
            prev_b = eb;
            prev_a = ea;
            last = std::max(eb, ea);
        }
        s.count("omega-limit-monotone", non_mono, "gamma = 1e-2 .. 1e-6");
        s.le("omega-limit-final", last, 1e-5, "gamma = 1e-6");
    }

    for (const auto& [label, pair] : std::vector<std::pair<std::string, Pair>>{
             {"fig1-left", fig1_left()}, {"fig1-right", fig1_right()}, {"10d", instance_10d()}}) {
        const DecaySetup st(WfrContext(pair.target), pair.init, 0.7);
        double worst = 0;
        for (SchemeKind k : {SchemeKind::SplitWFR, SchemeKind::SplitFRW})
            worst = std::max(worst, std::abs(kl_ratio(k, 400, st) - asymptotic_ratio(k, st)));
        s.le("ratio-convergence-" + label, worst, 1e-4, "n=400, gamma=0.7");
    }

    {
        double worst = 0;
        for (const Pair& base : {fig1_left(), fig1_right()}) {
            const WfrContext ctx(base.target);
            for (SchemeKind k : {SchemeKind::SplitWFR, SchemeKind::SplitFRW}) {
                const double r5 = asymptotic_ratio(k, DecaySetup(ctx, make_gaussian_1d(15, base.init.cov.mat()(0, 0)), 0.7));
                const double r50 = asymptotic_ratio(k, DecaySetup(ctx, make_gaussian_1d(-30, base.init.cov.mat()(0, 0)), 0.7));
                worst = std::max(worst, std::abs(r5 - r50));
            }
        }
        s.le("ratio-eps0-invariance", worst, 1e-10, "eps0 in {5, 50}");
    }

    // J_n keeps the definiteness of E_0.
    {
        int bad_pos = 0, bad_neg = 0;
        const Pair pos = instance_10d();
        const DecaySetup sp(WfrContext(pos.target), pos.init, 0.7);
        const Pair neg{make_gaussian_1d(0, 4), make_gaussian_1d(1, 1)};
        const DecaySetup sn(WfrContext(neg.target), neg.init, 0.7);
        const bool neg_case = classify_definiteness(sn).kind == DefinitenessCase::Negative;
        for (SchemeKind k : kinds)
            for (int n = 1; n <= 100; ++n) {
                bad_pos += !(min_eig(j_n(omega(k, sp), n, sp)) > 0.0);
                if (neg_case) bad_neg += !(max_eig(j_n(omega(k, sn), n, sn)) < 0.0);
            }
        s.count("jn-positive-case", bad_pos, "10D instance, n <= 100");
        s.count("jn-negative-case", neg_case ? bad_neg : 1,
                neg_case ? "C_pi=4, C_0=1, n <= 100" : "setup not classified as the negative case");
    }

    // Decay bounds.
    int min_rule = 0;
    for (const Pair& pair : {fig1_left(), fig1_right()}) {
        const DecaySetup st(WfrContext(pair.target), pair.init, 1.0);
        for (int i = 0; i < 200; ++i) {
            const double t = 20.0 * i / 199.0;
            min_rule += bound_min_rule(st, t) < kl_gaussian(wfr_exact(st.ctx(), pair.init, t), pair.target);
        }
    }
    s.count("min-rule-dominates", min_rule, "200 points in [0,20], both 1D configurations");

    const Pair f4 = fig1_left();
    const DecaySetup s4(WfrContext(f4.target), f4.init, 1.0);
    int sharp = 0, sharp_pts = 0;
    const auto t0 = sharp_bound_t0(s4, 0.1);
    for (int i = 0; i <= 400; ++i) {
        const double t = 40.0 * i / 400.0;
        const auto b = bound_sharp(s4, t, 0.1);
        if (!b) continue;
        ++sharp_pts;
        sharp += *b < kl_gaussian(wfr_exact(s4.ctx(), f4.init, t), f4.target);
    }
    s.count("sharp-bound-dominates", sharp_pts > 0 ? sharp : 1,
            "delta=0.1, t0=" + (t0 ? fmt(*t0) : std::string("none")) + ", " + std::to_string(sharp_pts) + " points");
    const ConvexityConstants k = gaussian_constants(f4.target, f4.init);
    double margin = 0;
    for (int i = 0; i <= 200; ++i) {
        const double t = 20.0 * i / 200.0;
        const double exact = divergence_report(wfr_exact(s4.ctx(), f4.init, t), f4.target).jeffreys;
        margin = std::max({margin, exact - jeffreys_bound(s4, k, t), exact - jeffreys_bound_fixed(s4, k, t)});
    }
    s.le("jeffreys-bound-dominates", margin, 0.0, "largest exact - bound on [0,20]");
}

void suite_logconcavity(std::vector<CheckResult>& out) {
    Suite s("logconcavity", out);
    const GaussianDist init = make_gaussian_1d(0, 1);
    for (double c_pi : {100.0, 5.0, 2.1}) {
        const GaussianDist target = make_gaussian_1d(0, c_pi);
        const ConvexityConstants k = gaussian_constants(target, init);
        if (!k.admissible) {
            s.count("wfr-alpha-lower-bound-cpi-" + label(c_pi), 1, "configuration reported inadmissible");
            continue;
        }
        const WfrAlphaCurve curve = make_wfr_alpha_curve(k);
        const WfrContext ctx(target);
        double excess = -1e300, at = 0;
        for (int i = 0; i < 500; ++i) {
            const double t = 20.0 * i / 499.0;
            const double e = wfr_alpha(curve, t) - true_alpha_gaussian(ctx, init, t);
            if (e > excess) {
                excess = e;
                at = t;
            }
        }
        s.le("wfr-alpha-lower-bound-cpi-" + label(c_pi), excess, 1e-10,
             "max(alpha_theorem - alpha_true) on 500 points in [0,20], at t=" + fmt(at));
        s.le("riccati-rk4-cpi-" + label(c_pi), riccati_check(curve, 20.0, 1e-3), 1e-8);

        int mono = 0, cross = 0;
        const double limit = 0.5 * k.alpha_pi + curve.c_inf_1;
        const double dir = k.c0 > curve.c_inf_1 ? -1.0 : 1.0;
        double prev = wfr_alpha(curve, 0.0);
        for (int i = 1; i <= 400; ++i) {
            const double v = wfr_alpha(curve, 0.05 * i);
            mono += dir * (v - prev) < -1e-15;
            cross += dir * (v - limit) > 1e-12;
            prev = v;
        }
        s.count("wfr-alpha-monotone-cpi-" + label(c_pi), mono + cross, "limit " + fmt(limit));

        int fr_bad = 0;
        double fprev = fr_alpha(k, 0.0);
        const double lo = std::min(k.alpha_0, k.alpha_pi), hi = std::max(k.alpha_0, k.alpha_pi);
        const double fdir = k.alpha_pi > k.alpha_0 ? 1.0 : -1.0;
        for (int i = 1; i <= 400; ++i) {
            const double v = fr_alpha(k, 0.05 * i);
            fr_bad += fdir * (v - fprev) < -1e-15 || v < lo - 1e-15 || v > hi + 1e-15;
            fprev = v;
        }
        s.count("fr-alpha-monotone-cpi-" + label(c_pi), fr_bad);

        // W-flow horizon curve against RK4 of dc/dt = -c^2 - b^2 up to 0.9 t*.
        const WHorizon w = w_horizon(k);
        const double t_end = std::min(20.0, 0.9 * w.t_star);
        const int n = static_cast<int>(std::ceil(t_end / 1e-4));
        const double h = t_end / n, b2 = w.b * w.b;
        auto f = [b2](double c) { return -c * c - b2; };
        double c = w.c0, worst = 0;
        for (int i = 1; i <= n; ++i) {
            const double k1 = f(c), k2 = f(c + 0.5 * h * k1), k3 = f(c + 0.5 * h * k2), k4 = f(c + h * k3);
            c += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            worst = std::max(worst, std::abs(c - w.c(i * h)));
        }
        s.le("w-horizon-rk4-cpi-" + label(c_pi), worst, 1e-8, "t in [0, " + fmt(t_end) + "]");
    }
    const ConvexityConstants k2 = gaussian_constants(make_gaussian_1d(0, 2), init);
    s.count("cpi-2-inadmissible", k2.admissible ? 1 : 0,
            "b^2=" + fmt(k2.b * k2.b) + ", alpha_pi/2=" + fmt(0.5 * k2.alpha_pi));
}

void suite_grid(std::vector<CheckResult>& out) {
    Suite s("grid", out);
    const TargetSpec1D tgt = TargetSpec1D::gaussian(1.0, 2.0);
    const Grid1D g = default_grid(tgt, 0.0, 0.5, 8001);
    const DensityField mu = discretize_gaussian(0.0, 0.5, g);
    const WfrContext ctx(make_gaussian_1d(1.0, 2.0));
    const GaussianDist mg = make_gaussian_1d(0.0, 0.5);
    const double gm = 0.3;
    auto moments = [](const DensityField& f, const GaussianDist& d) {
        return std::max(std::abs(f.mean() - d.mean(0)), std::abs(f.variance() - d.cov.mat()(0, 0)));
    };
    const DensityField w = w_step_grid(tgt, mu, gm);
    const DensityField f = fr_step_grid(tgt, mu, gm);
    const DensityField sw = split_step_grid(tgt, mu, SplitOrder::WThenFR, gm);
    const DensityField sf = split_step_grid(tgt, mu, SplitOrder::FRThenW, gm);
    s.le("gaussian-consistency",
         std::max({moments(w, w_step(ctx, mg, gm)), moments(f, fr_step(ctx, mg, gm)),
                   moments(sw, split_step(ctx, mg, SplitOrder::WThenFR, gm)),
                   moments(sf, split_step(ctx, mg, SplitOrder::FRThenW, gm))}),
         1e-4, "8001 points, gamma=0.3, pi=N(1,2), mu0=N(0,0.5)");
    double mass = 0;
    for (const DensityField* d : {&w, &f, &sw, &sf}) mass = std::max({mass, std::abs(d->mass() - 1.0), d->clamped_mass()});
    s.le("mass-conservation", mass, 1e-8);
    const DensityField pih = discretize(tgt, g);
    const DensityField ps = split_step_grid(tgt, pih, SplitOrder::WThenFR, 0.5);
    double drift = 0;
    for (int i = 0; i < g.n_points(); ++i) drift = std::max(drift, std::abs(ps[i] - pih[i]));
    s.le("pi-stationary", drift, 1e-10);

    const TargetSpec1D mix = TargetSpec1D::mixture({{0.5, -4, 1}, {0.5, 4, 1}});
    for (const auto& [label, t] : std::vector<std::pair<std::string, TargetSpec1D>>{{"gaussian", tgt}, {"mixture", mix}}) {
        const Grid1D gg = default_grid(t, 0.0, 0.5, 1001);
        const DensityField start = discretize_gaussian(0.0, 0.5, gg);
        const DensityField ph = discretize(t, gg);
        const double kr = kl_grid(wfr_reference_grid(t, start, 2.0, 1e-4), ph);
        for (SplitOrder o : {SplitOrder::WThenFR, SplitOrder::FRThenW}) {
            double prev = 0, lo = 1e300, hi = 0;
            for (double gamma : {0.2, 0.1, 0.05}) {
                const double gap =
                    std::abs(kl_grid(iterate_split_grid(t, start, o, gamma, static_cast<int>(std::lround(2.0 / gamma))), ph) - kr);
                if (prev > 0) {
                    lo = std::min(lo, prev / gap);
                    hi = std::max(hi, prev / gap);
                }
                prev = gap;
            }
            s.le(std::string("first-order-") + (o == SplitOrder::WThenFR ? "wfr-" : "frw-") + label,
                 std::max(0.0, std::max(1.6 - lo, hi - 2.4)), 0.0, "halving ratios in [" + fmt(lo) + ", " + fmt(hi) + "]");
        }
    }
}

void suite_diagnostics(std::vector<CheckResult>& out) {
    Suite s("diagnostics", out);
    int pos = 0;
    for (int k = 0; k < 20; ++k) {
        const double q = 0.2 + 0.2 * k, c = q * (1.5 + 0.1 * k), b = -2.0 + 0.3 * k;
        const TargetSpec1D t = TargetSpec1D::gaussian(1.0, c);
        pos += !(cov_diagnostic(discretize_gaussian(b, q, default_grid(t, b, q, 4001)), t).value < 0.0);
    }
    s.count("cov-negative-gaussian", pos, "20 cases with Q < C_pi");

    int cheb = 0;
    const TargetSpec1D std_normal = TargetSpec1D::gaussian(0.0, 1.0);
    for (int k = 0; k < 12; ++k) {
        const double a = 0.05 + 0.1 * (k % 4), q4 = 0.01 * (k / 4);
        const Grid1D g = default_grid(std_normal, 0.0, 1.0, 4001);
        const DensityField nu = DensityField::from_log(
            g, [&](double x) { return std_normal.log_density(x) - a * x * x - q4 * x * x * x * x; });
        cheb += !(cov_diagnostic(nu, std_normal).value < 0.0);
    }
    s.count("cov-negative-even-ratio", cheb, "12 centered even log-concave ratios");

    int neg62 = 0;
    for (double c0 : {2.0, 4.0}) {
        const TargetSpec1D t = TargetSpec1D::gaussian(0.0, 1.0);
        const DensityField m = discretize_gaussian(0.0, c0, default_grid(t, 0.0, c0, 2001));
        neg62 += !(frw_perturbation_grid(frw_trajectory(t, m, 0.5, 8), t, 0.5, 8) > 0.0);
    }
    s.count("frw-perturbation-positive", neg62, "centered, C_0 in {2, 4}, C_pi = 1");

    // KL derivative in gamma against the decomposition.
    double worst = 0;
    const TargetSpec1D mix = TargetSpec1D::mixture({{0.5, -4, 1}, {0.5, 4, 1}});
    for (const auto& [t, m0, c0, n] : std::vector<std::tuple<TargetSpec1D, double, double, int>>{
             {TargetSpec1D::gaussian(20, 100), 0.0, 1.0, 4001}, {mix, 0.0, 0.5, 2001}}) {
        const Grid1D g = default_grid(t, m0, c0, n);
        const DensityField mu = discretize_gaussian(m0, c0, g);
        const DensityField ph = discretize(t, g);
        const double gm = 0.5, dg = 1e-3;
        const int ns = w_default_substeps(t, g, gm + dg);
        auto nu = [&](double x) { return fr_step_grid(t, w_step_grid(t, mu, x, ns), x); };
        const double fd = (kl_grid(nu(gm + dg), ph) - kl_grid(nu(gm - dg), ph)) / (2 * dg);
        const double rhs = kl_decay_rhs_wfr_split(nu(gm), t, gm).total();
        worst = std::max(worst, std::abs(fd - rhs) / std::abs(fd));
    }
    s.le("kl-derivative-decomposition", worst, 5e-3, "relative, central difference 1e-3 at gamma=0.5");
}

void suite_series(std::vector<CheckResult>& out) {
    Suite s("series", out);
    const Mat cp = (Mat(3, 3) << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0).finished();
    const WfrContext ctx(make_gaussian(Vec::Zero(3), cp));
    const auto [partial, closed] = gfrw_series_check(ctx, 0.4, 40);
    s.le("gfrw-partial-sum", max_abs(partial.mat() - closed.mat()), 1e-10, "k_max=40, d=3, gamma=0.4");
}

using SuiteFn = std::function<void(std::vector<CheckResult>&, Rng&, std::uint64_t)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r = {
        {"linalg", [](auto& o, Rng& g, std::uint64_t) { suite_linalg(o, g); }},
        {"gaussian-composition", [](auto& o, Rng& g, std::uint64_t) { suite_composition(o, g); }},
        {"gaussian-flows", [](auto& o, Rng& g, std::uint64_t) { suite_gaussian_flows(o, g); }},
        {"divergences", [](auto& o, Rng& g, std::uint64_t seed) { suite_divergences(o, g, seed); }},
        {"decay", [](auto& o, Rng&, std::uint64_t) { suite_decay(o); }},
        {"logconcavity", [](auto& o, Rng&, std::uint64_t) { suite_logconcavity(o); }},
        {"grid", [](auto& o, Rng&, std::uint64_t) { suite_grid(o); }},
        {"diagnostics", [](auto& o, Rng&, std::uint64_t) { suite_diagnostics(o); }},
        {"series", [](auto& o, Rng&, std::uint64_t) { suite_series(o); }},
    };
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
}

std::vector<CheckResult> run_suites(const std::string& suite, std::uint64_t seed) {
    std::vector<CheckResult> out;
    bool found = suite.empty();
    for (const auto& [name, fn] : registry()) {
        if (!suite.empty() && name != suite) continue;
        found = true;
        // Each suite draws from its own stream so filtering does not change results.
        Rng rng(seed ^ fnv1a(name));
        try {
            fn(out, rng, seed);
        } catch (const std::exception& e) {
            out.push_back({name, "unexpected-exception", 1.0, 0.0, false, e.what()});
        }
    }
    if (!found) throw ConfigError("unknown suite '" + suite + "'");
    return out;
}

bool is_known_discrepancy(const CheckResult& c) {
    return c.suite == "logconcavity" && c.name.rfind("wfr-alpha-lower-bound-", 0) == 0;
}

std::string validate_text(const std::vector<CheckResult>& checks, std::uint64_t seed) {
    std::string s = "# wfr-split-lab validate\n# seed: " + std::to_string(seed) + "\n";
    s += "suite,check,status,residual,tolerance,detail\n";
    int failed = 0;
    for (const auto& c : checks) {
        failed += !c.passed;
        s += c.suite + "," + c.name + "," + (c.passed ? "pass" : "FAIL") + "," + format_double(c.residual) + "," +
             format_double(c.tolerance) + ",\"" + c.detail + (!c.passed && is_known_discrepancy(c) ? " (known discrepancy)" : "") +
             "\"\n";
    }
    s += "# " + std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " checks passed\n";
    return s;
}

std::string validate_json(const std::vector<CheckResult>& checks, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["experiment"] = "validate";
    j["seed"] = seed;
    j["checks"] = nlohmann::ordered_json::array();
    int failed = 0;
    for (const auto& c : checks) {
        failed += !c.passed;
        nlohmann::ordered_json x;
        x["suite"] = c.suite;
        x["check"] = c.name;
        x["passed"] = c.passed;
        x["residual"] = c.residual;
        x["tolerance"] = c.tolerance;
        x["known_discrepancy"] = is_known_discrepancy(c);
        x["detail"] = c.detail;
        j["checks"].push_back(std::move(x));
    }
    j["passed"] = failed == 0;
    j["n_checks"] = checks.size();
    j["n_failed"] = failed;
    return j.dump(2) + "\n";
}

}  // namespace wfr
