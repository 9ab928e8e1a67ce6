#include "wfrlab/gaussian_flows.hpp"

#include "wfrlab/errors.hpp"

#include <cmath>
#include <string>

namespace wfr {

WfrContext::WfrContext(GaussianDist target)
    : target_(std::move(target)),
      c_pi_inv_(spd_inverse(target_.cov)),
      gamma_(SymMatrix(c_pi_inv_.mat() + 0.5 * Mat::Identity(target_.dim(), target_.dim()))) {
    // C_pi eigenvalues ascend, so reverse them to make Gamma's ascend.
    const int d = dim();
    const Vec& s = target_.cov.eigenvalues();
    const Mat& v = target_.cov.eigenvectors();
    sigma_.resize(d);
    c_.resize(d);
    lambda_.resize(d);
    basis_.resize(d, d);
    for (int i = 0; i < d; ++i) {
        sigma_(i) = s(d - 1 - i);
        c_(i) = 1.0 / sigma_(i);
        lambda_(i) = c_(i) + 0.5;
        basis_.col(i) = v.col(d - 1 - i);
    }
}

Mat WfrContext::spectral(const std::function<double(int)>& f) const {
    Vec diag(dim());
    for (int i = 0; i < dim(); ++i) diag(i) = f(i);
    return basis_ * diag.asDiagonal() * basis_.transpose();
}

MtSpec MtSpec::split_wfr(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("MtSpec: gamma_step must be > 0");
    return {MtKind::WfrSplitWFR, gamma};
}

MtSpec MtSpec::split_frw(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("MtSpec: gamma_step must be > 0");
    return {MtKind::WfrSplitFRW, gamma};
}

namespace {

void check_pair(const WfrContext& ctx, const GaussianDist& v, double t, const char* what) {
    if (v.dim() != ctx.dim()) throw DomainError(std::string(what) + ": dimension mismatch with target");
    if (!std::isfinite(t)) throw NumericInputError(std::string(what) + ": non-finite time");
    if (t < 0.0) throw DomainError(std::string(what) + ": time must be >= 0");
}

GaussianDist finish(const Vec& mean, const Mat& cov, const char* what) {
    try {
        return GaussianDist(mean, SpdMatrix(cov));
    } catch (const SingularMatrixError& e) {
        throw NumericInputError(std::string(what) + ": covariance lost positive definiteness: " + e.what());
    }
}

// C_pi, e^{-(1+C_pi^-1) t}(m0 - m_pi) + m_pi: the flow started on the target covariance.
GaussianDist degenerate_flow(const WfrContext& ctx, const GaussianDist& init, double t) {
    const Vec& c = ctx.c_values();
    const Mat decay = ctx.spectral([&](int i) { return std::exp(-t * (1.0 + c(i))); });
    const Vec mean = ctx.target().mean + decay * (init.mean - ctx.target().mean);
    return GaussianDist(mean, ctx.target().cov);
}

// C_pi + e^{-Gamma t} W^{-1} e^{-Gamma t}, W = V^T E0^{-1} V + diag(extra) in the context basis.
// The mean follows m_pi + e^{-t/2} e^{-Gamma t} W^{-1} E0^{-1} eps0.
GaussianDist resolvent_flow(const WfrContext& ctx, const GaussianDist& init, double t, const Vec& extra,
                            const char* what) {
    const Mat& v = ctx.basis();
    const Vec& lam = ctx.gamma_eigenvalues();
    const Mat e0 = v.transpose() * (init.cov.mat() - ctx.target().cov.mat()) * v;
    const SymMatrix e0inv = sym_inverse(SymMatrix(e0), "initial covariance gap C_0 - C_pi");
    const Mat w = e0inv.mat() + Mat(extra.asDiagonal());
    const SymMatrix winv = sym_inverse(SymMatrix(w), what);
    const Vec damp = (-t * lam).array().exp();
    const Mat gap = damp.asDiagonal() * winv.mat() * damp.asDiagonal();
    const Mat cov = ctx.target().cov.mat() + v * gap * v.transpose();
    const Vec eps = v.transpose() * (init.mean - ctx.target().mean);
    const Vec dm = std::exp(-0.5 * t) * (damp.asDiagonal() * (winv.mat() * (e0inv.mat() * eps)));
    return finish(ctx.target().mean + v * dm, cov, what);
}

}  // namespace

bool is_degenerate(const WfrContext& ctx, const GaussianDist& init) {
    return max_abs(init.cov.mat() - ctx.target().cov.mat()) < 1e-10 * max_abs(ctx.target().cov.mat());
}

Vec z_m_diag(const WfrContext& ctx, MtKind kind, double t) {
    const int d = ctx.dim();
    const Vec& lam = ctx.gamma_eigenvalues();
    const Vec& c = ctx.c_values();
    const Vec& sig = ctx.sigma_values();
    Vec z = Vec::Zero(d);
    for (int i = 0; i < d; ++i) {
        // (1 - e^{-2 lambda t}) / (2 lambda)
        const double a = -std::expm1(-2.0 * lam(i) * t) / (2.0 * lam(i));
        switch (kind) {
            case MtKind::Zero:
                break;
            case MtKind::WfrSplitWFR:
                z(i) = 2.0 * (-std::expm1(-2.0 * c(i) * t) / (2.0 * c(i)) - a);
                break;
            case MtKind::WfrSplitFRW:
                z(i) = -sig(i) * (-std::expm1(-t) - a);
                break;
        }
    }
    return z;
}

GaussianDist wfr_exact(const WfrContext& ctx, const GaussianDist& init, double t) {
    check_pair(ctx, init, t, "wfr_exact");
    if (t == 0.0) return init;
    if (is_degenerate(ctx, init)) return degenerate_flow(ctx, init, t);
    return general_mt_solution(ctx, init, MtSpec::zero(), t);
}

GaussianDist general_mt_solution(const WfrContext& ctx, const GaussianDist& init, const MtSpec& spec, double t) {
    check_pair(ctx, init, t, "general_mt_solution");
    if (spec.kind != MtKind::Zero && !(spec.gamma_step > 0.0))
        throw DomainError("general_mt_solution: gamma_step must be > 0 for split kinds");
    if (t == 0.0) return init;
    if (is_degenerate(ctx, init)) return degenerate_flow(ctx, init, t);
    const Vec& lam = ctx.gamma_eigenvalues();
    const Vec& c = ctx.c_values();
    const Vec& sig = ctx.sigma_values();
    const Vec z = z_m_diag(ctx, spec.kind, t);
    Vec extra(ctx.dim());
    for (int i = 0; i < ctx.dim(); ++i) {
        // K - e^{-Gamma t} K e^{-Gamma t} - C_pi^-1 Z C_pi^-1, K = (2I + C_pi)^-1
        extra(i) = -std::expm1(-2.0 * lam(i) * t) / (2.0 + sig(i)) - c(i) * c(i) * z(i);
    }
    return resolvent_flow(ctx, init, t, extra, "general_mt_solution resolvent");
}

GaussianDist w_step(const WfrContext& ctx, const GaussianDist& v, double t) {
    check_pair(ctx, v, t, "w_step");
    if (t == 0.0) return v;
    const Mat& b = ctx.basis();
    const Vec& c = ctx.c_values();
    const Vec& sig = ctx.sigma_values();
    const Vec damp = (-t * c).array().exp();
    Mat cov_b = damp.asDiagonal() * (b.transpose() * v.cov.mat() * b) * damp.asDiagonal();
    for (int i = 0; i < ctx.dim(); ++i) cov_b(i, i) += -sig(i) * std::expm1(-2.0 * t * c(i));
    const Vec eps = damp.asDiagonal() * (b.transpose() * (v.mean - ctx.target().mean));
    return finish(ctx.target().mean + b * eps, b * cov_b * b.transpose(), "w_step");
}

GaussianDist fr_step(const WfrContext& ctx, const GaussianDist& v, double t) {
    check_pair(ctx, v, t, "fr_step");
    if (t == 0.0) return v;
    const double keep = std::exp(-t);
    const double pull = -std::expm1(-t);
    const Mat p0 = spd_inverse(v.cov).mat();
    const SpdMatrix prec(SymMatrix(pull * ctx.c_pi_inv().mat() + keep * p0));
    const SpdMatrix cov = spd_inverse(prec);
    const Vec dm = cov.mat() * (keep * (p0 * (v.mean - ctx.target().mean)));
    return GaussianDist(ctx.target().mean + dm, cov);
}

GaussianDist split_step(const WfrContext& ctx, const GaussianDist& v, SplitOrder order, double gamma) {
    check_pair(ctx, v, gamma, "split_step");
    if (!(gamma > 0.0)) throw DomainError("split_step: gamma must be > 0");
    if (is_degenerate(ctx, v)) return degenerate_flow(ctx, v, gamma);
    const Vec& lam = ctx.gamma_eigenvalues();
    const Vec& c = ctx.c_values();
    const double g1 = std::expm1(gamma);
    Vec extra(ctx.dim());
    for (int i = 0; i < ctx.dim(); ++i) {
        if (order == SplitOrder::WThenFR)
            // (e^g - 1) e^{-Gamma g} C_pi^-1 e^{-Gamma g}
            extra(i) = g1 * c(i) * std::exp(-2.0 * gamma * lam(i));
        else
            // (e^g - 1) e^{-Gamma g} C_pi^-1 e^{2 g C_pi^-1} e^{-Gamma g} = (1 - e^{-g}) C_pi^-1
            extra(i) = -std::expm1(-gamma) * c(i);
    }
    return resolvent_flow(ctx, v, gamma, extra, "split_step resolvent");
}

std::vector<TrajectoryPoint> iterate_split(const WfrContext& ctx, const GaussianDist& init, SplitOrder order,
                                           double gamma, int n) {
    if (n < 1) throw DomainError("iterate_split: n must be >= 1");
    std::vector<TrajectoryPoint> out;
    out.reserve(n + 1);
    GaussianDist cur = init;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) cur = split_step(ctx, cur, order, gamma);
        out.push_back({k, k * gamma, cur, divergence_report(cur, ctx.target())});
    }
    return out;
}

Mat m_matrix(const WfrContext& ctx, MtKind kind, double s) {
    const int d = ctx.dim();
    switch (kind) {
        case MtKind::Zero:
            return Mat::Zero(d, d);
        case MtKind::WfrSplitWFR:
            return std::expm1(s) * Mat::Identity(d, d);
        case MtKind::WfrSplitFRW: {
            const Vec& c = ctx.c_values();
            const Vec& sig = ctx.sigma_values();
            return ctx.spectral([&](int i) { return -0.5 * sig(i) * std::expm1(2.0 * s * c(i)); });
        }
    }
    return Mat::Zero(d, d);
}

namespace {

struct Moments {
    Vec m;
    Mat c;
};

Moments moment_rhs(const WfrContext& ctx, MtKind kind, double s, const Moments& x) {
    const int d = ctx.dim();
    const Mat id = Mat::Identity(d, d);
    const Mat& ci = ctx.c_pi_inv().mat();
    const Mat& cp = ctx.target().cov.mat();
    const Mat m = m_matrix(ctx, kind, s);
    const Mat a = id - 0.5 * cp + 2.0 * m;
    const Mat left = x.c * ci * (id - 2.0 * m * ci);
    Moments r;
    r.c = -left * x.c - a * ci * x.c - x.c * ci * a + 2.0 * (id + m);
    r.m = -(left + (id + 2.0 * m) * ci) * (x.m - ctx.target().mean);
    return r;
}

Moments axpy(const Moments& x, double h, const Moments& k) { return {x.m + h * k.m, x.c + h * k.c}; }

}  // namespace

GaussianDist moment_ode_integrate(const WfrContext& ctx, const GaussianDist& init, const MtSpec& spec, double t,
                                  double dt) {
    check_pair(ctx, init, t, "moment_ode_integrate");
    if (!(dt > 0.0)) throw DomainError("moment_ode_integrate: dt must be > 0");
    if (t / dt > 1e7) throw DomainError("moment_ode_integrate: t/dt exceeds 1e7");
    if (t == 0.0) return init;
    const long n = static_cast<long>(std::ceil(t / dt - 1e-9));
    const double h = t / static_cast<double>(n);
    Moments x{init.mean, init.cov.mat()};
    for (long k = 0; k < n; ++k) {
        const double s = k * h;
        const Moments k1 = moment_rhs(ctx, spec.kind, s, x);
        const Moments k2 = moment_rhs(ctx, spec.kind, s + 0.5 * h, axpy(x, 0.5 * h, k1));
        const Moments k3 = moment_rhs(ctx, spec.kind, s + 0.5 * h, axpy(x, 0.5 * h, k2));
        const Moments k4 = moment_rhs(ctx, spec.kind, s + h, axpy(x, h, k3));
        x.m += h / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);
        x.c += h / 6.0 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
        x.c = 0.5 * (x.c + x.c.transpose());
        if (!x.c.allFinite() || Eigen::LLT<Mat>(x.c).info() != Eigen::Success)
            throw StepSizeError("moment_ode_integrate: covariance lost positive definiteness at t=" +
                                std::to_string(s + h) + "; use a smaller dt");
    }
    return GaussianDist(x.m, SpdMatrix(x.c));
}

std::pair<SymMatrix, SymMatrix> gfrw_series_check(const WfrContext& ctx, double gamma, int k_max) {
    if (k_max < 1) throw DomainError("gfrw_series_check: k_max must be >= 1");
    const int d = ctx.dim();
    const Mat two_ci = 2.0 * ctx.c_pi_inv().mat();
    Mat term = gamma * Mat::Identity(d, d);
    Mat sum = term;
    for (int k = 2; k <= k_max; ++k) {
        term = (gamma / k) * term * two_ci;
        sum += term;
    }
    const Vec& c = ctx.c_values();
    const Vec& sig = ctx.sigma_values();
    const Mat closed = ctx.spectral([&](int i) { return 0.5 * sig(i) * std::expm1(2.0 * gamma * c(i)); });
    return {SymMatrix(sum), SymMatrix(closed)};
}

}  // namespace wfr
