#include "wfrlab/divergences.hpp"

#include "wfrlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wfr {

double clamp_divergence(double v, const char* what) {
    if (std::isnan(v)) throw ConsistencyError(std::string(what) + ": NaN");
    if (v >= 0.0) return v;
    if (v > -1e-8) return 0.0;
    throw ConsistencyError(std::string(what) + " is negative: " + std::to_string(v));
}

namespace {

void check_dims(const GaussianDist& a, const GaussianDist& b) {
    if (a.dim() != b.dim()) throw DomainError("divergence: dimension mismatch");
}

}  // namespace

double kl_gaussian(const GaussianDist& a, const GaussianDist& b) {
    check_dims(a, b);
    // Whiten E = C_a - C_b by C_b = L L^T; with mu_i the eigenvalues of L^-1 E L^-T,
    // -logdet(I + C_b^-1 E) + Tr(C_b^-1 E) = sum(mu_i - log1p(mu_i)).
    const Eigen::LLT<Mat> llt(b.cov.mat());
    const Mat e = a.cov.mat() - b.cov.mat();
    const Mat w = llt.matrixL().solve(llt.matrixL().solve(e).transpose());
    const Vec mu = sym_eig(SymMatrix(w)).values;
    double cov_term = 0.0;
    for (int i = 0; i < mu.size(); ++i) cov_term += mu(i) - std::log1p(mu(i));
    const Vec z = llt.matrixL().solve(a.mean - b.mean);
    return clamp_divergence(0.5 * (cov_term + z.squaredNorm()), "kl_gaussian");
}

double fisher_info_gaussian(const GaussianDist& a, const GaussianDist& b) {
    check_dims(a, b);
    const Mat pa = spd_inverse(a.cov).mat();
    const Mat pb = spd_inverse(b.cov).mat();
    const Mat d = pb - pa;
    const Vec g = pb * (a.mean - b.mean);
    return clamp_divergence((d * a.cov.mat() * d).trace() + g.squaredNorm(), "fisher_info_gaussian");
}

DivergenceReport divergence_report(const GaussianDist& a, const GaussianDist& b) {
    DivergenceReport r;
    r.kl_forward = kl_gaussian(a, b);
    r.kl_reverse = kl_gaussian(b, a);
    r.jeffreys = r.kl_forward + r.kl_reverse;
    r.fisher_info = fisher_info_gaussian(a, b);
    return r;
}

double kl_grid(const DensityField& p, const DensityField& q) {
    if (!(p.grid() == q.grid())) throw DomainError("kl_grid: densities live on different grids");
    if (std::abs(p.mass() - 1.0) > 1e-8 || std::abs(q.mass() - 1.0) > 1e-8)
        throw DomainError("kl_grid: densities are not normalized");
    const Grid1D& g = p.grid();
    double s = 0.0;
    for (int i = 0; i < g.n_points(); ++i) {
        if (p[i] < 1e-300) continue;
        if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
        s += g.weight(i) * p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return clamp_divergence(s, "kl_grid");
}

Grid1D default_kl_grid(const GaussianDist& a, const GaussianDist& b, int n_points) {
    if (a.dim() != 1 || b.dim() != 1) throw DomainError("default_kl_grid: 1D laws only");
    const double sa = std::sqrt(a.cov.mat()(0, 0));
    const double sb = std::sqrt(b.cov.mat()(0, 0));
    const double lo = std::min(a.mean(0) - 10 * sa, b.mean(0) - 10 * sb);
    const double hi = std::max(a.mean(0) + 10 * sa, b.mean(0) + 10 * sb);
    return Grid1D(lo, hi, n_points);
}

}  // namespace wfr
