#include "wfrlab/logconcavity.hpp"

#include "wfrlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wfr {

ConvexityConstants gaussian_constants(const GaussianDist& target, const GaussianDist& init, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("gaussian_constants: delta must lie in (0,1)");
    if (target.dim() != init.dim()) throw DomainError("gaussian_constants: dimension mismatch");
    const SpdMatrix pp = spd_inverse(target.cov);
    const SpdMatrix p0 = spd_inverse(init.cov);
    ConvexityConstants k;
    k.delta = delta;
    k.alpha_pi = pp.eigenvalues()(0);
    k.L_pi = pp.eigenvalues()(pp.dim() - 1);
    k.alpha_0 = p0.eigenvalues()(0);
    k.L_0 = p0.eigenvalues()(p0.dim() - 1);
    k.alpha_d = min_eig(SymMatrix(p0.mat() - 0.5 * (1.0 + delta) * pp.mat()));
    if (!(k.alpha_d > 0.0))
        throw AssumptionViolation("alpha_d = " + std::to_string(k.alpha_d) +
                                  " <= 0: V_0 - (1+delta)/2 V_pi is not strongly convex");
    // R = -Laplacian V_pi + |grad V_pi|^2 has Hessian 2 C_pi^-2.
    k.alpha_h = min_eig(SymMatrix(2.0 * pp.mat() * pp.mat() + pp.mat()));
    k.b = std::sqrt(std::abs(k.alpha_h - k.L_pi) / 2.0);
    k.c0 = k.alpha_d + 0.5 * delta * k.alpha_pi;
    k.admissible = k.b * k.b < 0.5 * k.alpha_pi;
    return k;
}

double fr_alpha(const ConvexityConstants& k, double t) {
    if (t < 0.0) throw DomainError("fr_alpha: t must be >= 0");
    const double w = std::exp(-t);
    return -std::expm1(-t) * k.alpha_pi + w * k.alpha_0;
}

double WHorizon::c(double t) const {
    if (flat) return c0;
    return b * std::tan(std::atan(c0 / b) - b * t);
}

WHorizon w_horizon(const ConvexityConstants& k) {
    WHorizon w;
    w.b = std::sqrt(std::abs(k.alpha_h - k.L_pi));
    w.c0 = k.c0;
    if (!(w.c0 > 0.0)) throw DomainError("w_horizon: c0 must be > 0");
    if (w.b == 0.0) {
        w.flat = true;
        w.t_star = std::numeric_limits<double>::infinity();
        return w;
    }
    w.t_star = std::atan(w.c0 / w.b) / w.b;
    return w;
}

WfrAlphaCurve make_wfr_alpha_curve(const ConvexityConstants& k) {
    if (!k.admissible)
        throw ConditionViolation("b^2 = " + std::to_string(k.b * k.b) + " >= alpha_pi/2 = " +
                                 std::to_string(0.5 * k.alpha_pi));
    WfrAlphaCurve c;
    c.constants = k;
    const double disc = std::sqrt(1.0 + 4.0 * (0.5 * k.alpha_pi - k.b * k.b));
    c.c_inf_1 = 0.5 * (-1.0 + disc);
    c.c_inf_2 = 0.5 * (-1.0 - disc);
    c.l0 = (k.c0 - c.c_inf_1) / (k.c0 - c.c_inf_2);
    return c;
}

double WfrAlphaCurve::c(double t) const {
    const double e = l0 * std::exp(-t * (c_inf_1 - c_inf_2));
    return (c_inf_1 - c_inf_2 * e) / (1.0 - e);
}

double wfr_alpha(const WfrAlphaCurve& curve, double t) {
    if (t < 0.0) throw DomainError("wfr_alpha: t must be >= 0");
    return 0.5 * curve.constants.alpha_pi + curve.c(t);
}

double riccati_check(const WfrAlphaCurve& curve, double t_max, double dt) {
    if (!(dt > 0.0)) throw DomainError("riccati_check: dt must be > 0");
    const double q = curve.constants.b * curve.constants.b - 0.5 * curve.constants.alpha_pi;
    auto f = [q](double c) { return -c * c - c - q; };
    const long n = static_cast<long>(std::ceil(t_max / dt - 1e-9));
    const double h = n > 0 ? t_max / static_cast<double>(n) : 0.0;
    double c = curve.constants.c0;
    double worst = 0.0;
    for (long i = 1; i <= n; ++i) {
        const double k1 = f(c);
        const double k2 = f(c + 0.5 * h * k1);
        const double k3 = f(c + 0.5 * h * k2);
        const double k4 = f(c + h * k3);
        c += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        worst = std::max(worst, std::abs(c - curve.c(i * h)));
    }
    return worst;
}

double true_alpha_gaussian(const WfrContext& ctx, const GaussianDist& init, double t) {
    const GaussianDist g = wfr_exact(ctx, init, t);
    return 1.0 / g.cov.eigenvalues()(g.dim() - 1);
}

}  // namespace wfr
