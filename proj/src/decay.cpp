#include "wfrlab/decay.hpp"

#include "wfrlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wfr {

DecaySetup::DecaySetup(WfrContext ctx, const GaussianDist& init, double gamma)
    : ctx_(std::move(ctx)),
      init_(init),
      e0_(SymMatrix(init.cov.mat() - ctx_.target().cov.mat())),
      eps0_(init.mean - ctx_.target().mean),
      gamma_(gamma),
      sign_(0) {
    if (init.dim() != ctx_.dim()) throw DomainError("DecaySetup: dimension mismatch");
    if (!(gamma > 0.0)) throw DomainError("DecaySetup: gamma must be > 0");
    const Vec ev = sym_eig(e0_).values;
    const double tol = 1e-10 * max_abs(e0_.mat());
    if (ev(0) > tol) sign_ = 1;
    else if (ev(ev.size() - 1) < -tol) sign_ = -1;
}

namespace {

void require_definite(const DecaySetup& s, const char* what) {
    if (s.signature() == 0)
        throw DomainError(std::string(what) + ": E_0 must be strictly definite (mixed signature or singular)");
}

// Omega_kind eigenvalues in the context basis.
Vec omega_diag(SchemeKind kind, const DecaySetup& s) {
    const Vec& lam = s.ctx().gamma_eigenvalues();
    const Vec& c = s.ctx().c_values();
    const double g = s.gamma();
    Vec w(lam.size());
    for (int i = 0; i < w.size(); ++i) {
        switch (kind) {
            case SchemeKind::Exact:
                w(i) = 0.5 / lam(i);
                break;
            case SchemeKind::SplitWFR:
                w(i) = std::expm1(g) / std::expm1(2.0 * g * lam(i));
                break;
            case SchemeKind::SplitFRW:
                w(i) = std::expm1(g) / std::expm1(2.0 * g * lam(i)) * std::exp(2.0 * g * c(i));
                break;
        }
    }
    return w;
}

// Inverse of a square matrix that is symmetric in the commuting cases.
Mat general_inverse(const Mat& x, const char* what) {
    if (max_abs(x - x.transpose()) <= 1e-12 * max_abs(x)) return sym_inverse(SymMatrix(x), what).mat();
    const Eigen::JacobiSVD<Mat> svd(x);
    const Vec sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= 1e-12 * sv(0))
        throw SingularConfigurationError(std::string(what) + " is singular", sv(sv.size() - 1));
    return x.fullPivLu().inverse();
}

// (mu - log1p(mu)) / s^4 for mu = s^2 * mu_t.
double scaled_log_gap(double mu_t, double s2) {
    const double mu = s2 * mu_t;
    if (!(1.0 + mu > 0.0)) throw DomainError("phi_n: I + C_pi^-1 A has non-positive determinant");
    if (std::abs(mu) < 1e-3) {
        double acc = 0.0;
        double p = 1.0;
        for (int k = 2; k <= 14; ++k) {
            acc += ((k % 2 == 0) ? 1.0 : -1.0) * p / k;
            p *= mu;
        }
        return mu_t * mu_t * acc;
    }
    return (mu - std::log1p(mu)) / (s2 * s2);
}

}  // namespace

SymMatrix omega(SchemeKind kind, const DecaySetup& s) {
    const Vec w = omega_diag(kind, s);
    return SymMatrix(s.ctx().spectral([&](int i) { return w(i); }));
}

SymMatrix j_n(const SymMatrix& b, int n, const DecaySetup& s) {
    require_definite(s, "j_n");
    if (n < 0) throw DomainError("j_n: n must be >= 0");
    if (b.dim() != s.ctx().dim()) throw DomainError("j_n: dimension mismatch");
    const WfrContext& ctx = s.ctx();
    const double tau = n * s.gamma();
    const Vec& lam = ctx.gamma_eigenvalues();
    const Mat t = ctx.spectral([&](int i) { return std::exp(-tau * lam(i)); });
    const Mat one_minus = ctx.spectral([&](int i) { return -std::expm1(-2.0 * tau * lam(i)); });
    const Mat e0inv = sym_inverse(s.e0(), "E_0").mat();
    const Mat x = e0inv + b.mat() * ctx.c_pi_inv().mat() * one_minus;
    return SymMatrix(t * general_inverse(x, "J_n resolvent") * t);
}

double phi_n(const SymMatrix& a, int n, const DecaySetup& s) {
    require_definite(s, "phi_n");
    if (n < 0) throw DomainError("phi_n: n must be >= 0");
    const WfrContext& ctx = s.ctx();
    const Eigen::LLT<Mat> llt(ctx.target().cov.mat());
    const Mat w = llt.matrixL().solve(llt.matrixL().solve(a.mat()).transpose());
    const Vec mu = sym_eig(SymMatrix(w)).values;
    double cov_term = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
        if (!(1.0 + mu(i) > 0.0)) throw DomainError("phi_n: I + C_pi^-1 A has non-positive determinant");
        cov_term += mu(i) - std::log1p(mu(i));
    }
    const Vec& c = ctx.c_values();
    const double tau = n * s.gamma();
    const Mat grow = ctx.spectral([&](int i) { return std::exp(tau * c(i)); });
    const Vec v = grow * (sym_inverse(s.e0(), "E_0").mat() * s.eps0());
    const Vec z = llt.matrixL().solve(a.mat() * v);
    return 0.5 * (cov_term + z.squaredNorm());
}

double ScaledValue::value() const { return mantissa * std::exp(log_scale); }

ScaledValue phi_n_scaled(const SymMatrix& b, int n, const DecaySetup& s) {
    require_definite(s, "phi_n_scaled");
    if (n < 0) throw DomainError("phi_n_scaled: n must be >= 0");
    const WfrContext& ctx = s.ctx();
    const Mat& v = ctx.basis();
    const Vec& lam = ctx.gamma_eigenvalues();
    const Vec& c = ctx.c_values();
    const double tau = n * s.gamma();
    const int d = ctx.dim();

    const Mat e0inv = v.transpose() * sym_inverse(s.e0(), "E_0").mat() * v;
    const Mat bb = v.transpose() * b.mat() * v;
    Vec one_minus(d), tt(d), sq_c(d);
    for (int i = 0; i < d; ++i) {
        one_minus(i) = -std::expm1(-2.0 * tau * lam(i));
        tt(i) = std::exp(-tau * (lam(i) - lam(0)));
        sq_c(i) = std::sqrt(c(i));
    }
    const Mat x = e0inv + bb * c.asDiagonal() * one_minus.asDiagonal();
    Mat k = general_inverse(x, "J_n resolvent");
    k = 0.5 * (k + k.transpose());

    const double s2 = std::exp(-2.0 * tau * lam(0));
    const Mat a_t = tt.asDiagonal() * k * tt.asDiagonal();
    const Vec mu_t = sym_eig(SymMatrix(sq_c.asDiagonal() * a_t * sq_c.asDiagonal())).values;
    double cov_t = 0.0;
    for (int i = 0; i < d; ++i) cov_t += scaled_log_gap(mu_t(i), s2);

    const Vec eh = e0inv * (v.transpose() * s.eps0());
    const Vec q = sq_c.asDiagonal() * (tt.asDiagonal() * (k * eh));
    const double r = std::exp(-2.0 * tau * c(0));

    ScaledValue out;
    out.log_scale = -tau * (1.0 + 2.0 * lam(0));
    out.mantissa = 0.5 * (q.squaredNorm() + cov_t * r);
    return out;
}

double kl_ratio(SchemeKind kind, int n, const DecaySetup& s) {
    const ScaledValue num = phi_n_scaled(omega(kind, s), n, s);
    const ScaledValue den = phi_n_scaled(omega(SchemeKind::Exact, s), n, s);
    if (!(den.mantissa > 0.0)) throw DegenerateRatioError("kl_ratio: exact KL vanishes");
    return num.mantissa / den.mantissa;
}

Definiteness classify_definiteness(const DecaySetup& s) {
    Definiteness d;
    d.e0_positive = s.signature() > 0;
    if (s.signature() != 0) {
        const Mat x = sym_inverse(s.e0(), "E_0").mat() * s.ctx().target().cov.mat();
        auto below = [&](SchemeKind kind) {
            const SymMatrix y(x + omega(kind, s).mat());
            return max_eig(y) < -1e-10 * max_abs(y.mat());
        };
        d.below_omega = below(SchemeKind::Exact);
        d.below_omega_beta = below(SchemeKind::SplitWFR);
        d.below_omega_alpha = below(SchemeKind::SplitFRW);
    }
    if (d.e0_positive) d.kind = DefinitenessCase::Positive;
    else if (d.below_omega && d.below_omega_beta && d.below_omega_alpha) d.kind = DefinitenessCase::Negative;
    return d;
}

double asymptotic_ratio(SchemeKind kind, const DecaySetup& s) {
    if (kind == SchemeKind::Exact) throw DomainError("asymptotic_ratio: kind must be a split scheme");
    if (classify_definiteness(s).kind == DefinitenessCase::Neither)
        throw DomainError("asymptotic_ratio: E_0 is neither positive definite nor below -Omega");
    if (s.eps0().squaredNorm() == 0.0)
        throw DegenerateRatioError("asymptotic_ratio: eps_0 = 0 makes both quadratic forms vanish");
    const WfrContext& ctx = s.ctx();
    const Mat& cp = ctx.target().cov.mat();
    const Mat e0inv = sym_inverse(s.e0(), "E_0").mat();
    const Vec eh = e0inv * s.eps0();
    const Mat d0 = eh * eh.transpose() * cp;
    const Vec& lam = ctx.gamma_eigenvalues();

    auto form = [&](SchemeKind k) {
        const Mat xinv = general_inverse(e0inv * cp + omega(k, s).mat(), "E_0^-1 C_pi + Omega");
        const Mat m = xinv * d0 * xinv;
        double acc = 0.0;
        for (int i = 0; i < lam.size() && lam(i) - lam(0) <= 1e-10 * lam(0); ++i) {
            const Vec p = ctx.basis().col(i);
            acc += p.dot(m * p);
        }
        return std::pair{acc, max_abs(xinv) * max_abs(xinv) * max_abs(d0)};
    };
    const auto [num, num_scale] = form(kind);
    const auto [den, den_scale] = form(SchemeKind::Exact);
    if (!(std::abs(den) > 1e-14 * den_scale))
        throw DegenerateRatioError("asymptotic_ratio: the leading quadratic form vanishes");
    (void)num_scale;
    return num / den;
}

double bound_min_rule(const DecaySetup& s, double t) {
    const WfrContext& ctx = s.ctx();
    const double fr = kl_gaussian(fr_step(ctx, s.init(), t), ctx.target());
    const double w = kl_gaussian(w_step(ctx, s.init(), t), ctx.target());
    return std::min(fr, w);
}

std::optional<double> sharp_bound_m(const DecaySetup& s) {
    // log(pi/mu_0)(x) = 1/2 x^T H x - x^T g + const with H = C_0^-1 - C_pi^-1.
    const WfrContext& ctx = s.ctx();
    const GaussianDist& pi = ctx.target();
    const GaussianDist& mu = s.init();
    const Mat p0 = spd_inverse(mu.cov).mat();
    const Mat pp = ctx.c_pi_inv().mat();
    const SymMatrix h(p0 - pp);
    const SymEig he = sym_eig(h);
    const double scale = std::max(max_abs(p0), max_abs(pp));
    if (he.values(0) <= 1e-12 * scale) return std::nullopt;
    const Vec g = p0 * mu.mean - pp * pi.mean;
    const Vec x = he.vectors * (he.values.cwiseInverse().asDiagonal() * (he.vectors.transpose() * g));
    const Vec dp = x - pi.mean;
    const Vec d0 = x - mu.mean;
    const double log_ratio = -0.5 * dp.dot(pp * dp) + 0.5 * d0.dot(p0 * d0) - 0.5 * logdet(pi.cov) + 0.5 * logdet(mu.cov);
    return std::max(0.0, -log_ratio);
}

std::optional<double> sharp_bound_t0(const DecaySetup& s, double delta, std::optional<double> m_override) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("bound_sharp: delta must lie in (0,1)");
    const std::optional<double> m = m_override ? m_override : sharp_bound_m(s);
    if (!m || !(*m > 0.0)) return std::nullopt;
    return std::log(*m / (delta * delta * delta));
}

std::optional<double> bound_sharp(const DecaySetup& s, double t, double delta, std::optional<double> m_override) {
    const std::optional<double> t0 = sharp_bound_t0(s, delta, m_override);
    if (!t0 || t < *t0) return std::nullopt;
    const double alpha_pi = s.ctx().c_values().minCoeff();
    const double rate = 2.0 * alpha_pi + (2.0 - 3.0 * delta);
    return std::exp(-rate * (t - *t0)) * kl_gaussian(s.init(), s.ctx().target());
}

double jeffreys_bound(const DecaySetup& s, const ConvexityConstants& k, double t) {
    if (t < 0.0) throw DomainError("jeffreys_bound: t must be >= 0");
    const WfrAlphaCurve curve = make_wfr_alpha_curve(k);
    const double j0 = divergence_report(s.init(), s.ctx().target()).jeffreys;
    if (t == 0.0) return j0;
    auto kappa = [&](double u) { return 2.0 * std::min(k.alpha_pi, wfr_alpha(curve, u)) + 1.0; };
    long m = static_cast<long>(std::ceil(t / 1e-3));
    if (m % 2) ++m;
    const double h = t / static_cast<double>(m);
    double acc = kappa(0.0) + kappa(t);
    for (long i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * kappa(i * h);
    return j0 * std::exp(-acc * h / 3.0);
}

double jeffreys_bound_fixed(const DecaySetup& s, const ConvexityConstants& k, double t) {
    if (t < 0.0) throw DomainError("jeffreys_bound_fixed: t must be >= 0");
    const WfrAlphaCurve curve = make_wfr_alpha_curve(k);
    const double j0 = divergence_report(s.init(), s.ctx().target()).jeffreys;
    const double worst = std::min({k.alpha_pi, wfr_alpha(curve, 0.0), wfr_alpha(curve, t)});
    return j0 * std::exp(-t * (2.0 * worst + 1.0));
}

}  // namespace wfr
