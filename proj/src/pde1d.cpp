#include "wfrlab/pde1d.hpp"

#include "wfrlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wfr {

Grid1D default_grid(const TargetSpec1D& target, double init_mean, double init_var, int n_points) {
    if (!(init_var > 0.0)) throw DomainError("default_grid: variance must be > 0");
    const double sd = std::max(target.max_sd(), std::sqrt(init_var));
    const double lo = std::min(target.min_mean(), init_mean) - 12.0 * sd;
    const double hi = std::max(target.max_mean(), init_mean) + 12.0 * sd;
    return Grid1D(lo, hi, n_points);
}

DensityField discretize(const TargetSpec1D& target, const Grid1D& grid) {
    return DensityField::from_log(grid, [&](double x) { return target.log_density(x); });
}

DensityField discretize_gaussian(double mean, double var, const Grid1D& grid) {
    return discretize(TargetSpec1D::gaussian(mean, var), grid);
}

DensityField fr_step_grid(const TargetSpec1D& target, const DensityField& v, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("fr_step_grid: gamma must be >= 0");
    if (gamma == 0.0) return v;
    const Grid1D& g = v.grid();
    const double keep = std::exp(-gamma);
    const double pull = -std::expm1(-gamma);
    std::vector<double> lv(g.n_points());
    for (int i = 0; i < g.n_points(); ++i) {
        lv[i] = v[i] > 0.0 ? pull * target.log_density(g.x(i)) + keep * std::log(v[i])
                           : -std::numeric_limits<double>::infinity();
    }
    try {
        return DensityField::from_log_values(g, lv);
    } catch (const DegenerateDensityError&) {
        throw DegenerateDensityError("fr_step_grid: result underflowed to zero");
    }
}

namespace {

// Scharfetter-Gummel fluxes J_{i+1/2} = (b_i u_i - a_i u_{i+1}) / h, which vanish on u = pi.
struct FpGenerator {
    std::vector<double> a, b, inv_vol;
    double h = 0.0;
    double max_diag = 0.0;

    FpGenerator(const TargetSpec1D& target, const Grid1D& grid) {
        const int n = grid.n_points();
        h = grid.h();
        std::vector<double> lp(n);
        for (int i = 0; i < n; ++i) lp[i] = target.log_density(grid.x(i));
        a.resize(n - 1);
        b.resize(n - 1);
        for (int e = 0; e < n - 1; ++e) {
            const double d = lp[e + 1] - lp[e];
            if (std::abs(d) < 1e-8) {
                b[e] = 1.0 + 0.5 * d;
                a[e] = 1.0 - 0.5 * d;
            } else {
                b[e] = std::expm1(d) / d;
                a[e] = -std::expm1(-d) / d;
            }
        }
        inv_vol.resize(n);
        for (int i = 0; i < n; ++i) inv_vol[i] = 1.0 / ((i == 0 || i == n - 1) ? 0.5 * h : h);
        for (int i = 0; i < n; ++i) {
            double out = 0.0;
            if (i + 1 < n) out += b[i];
            if (i > 0) out += a[i - 1];
            max_diag = std::max(max_diag, out * inv_vol[i] / h);
        }
    }

    void euler(std::vector<double>& u, std::vector<double>& flux, double dt) const {
        const int n = static_cast<int>(u.size());
        for (int e = 0; e < n - 1; ++e) flux[e] = (b[e] * u[e] - a[e] * u[e + 1]) / h;
        u[0] -= dt * inv_vol[0] * flux[0];
        for (int i = 1; i < n - 1; ++i) u[i] += dt * inv_vol[i] * (flux[i - 1] - flux[i]);
        u[n - 1] += dt * inv_vol[n - 1] * flux[n - 2];
    }

    double bound() const { return 0.5 / max_diag; }
};

int substeps_for(const FpGenerator& gen, double t) {
    const double k = std::ceil(t / gen.bound() - 1e-12);
    if (k > 1e6) throw StepSizeError("W step needs more than 1e6 substeps; coarsen the grid or shorten the step");
    return std::max(1, static_cast<int>(k));
}

void advance(const FpGenerator& gen, std::vector<double>& u, double t, int n_substeps) {
    if (t == 0.0) return;
    const int k = n_substeps > 0 ? n_substeps : substeps_for(gen, t);
    const double dt = t / k;
    if (dt > gen.bound() * (1.0 + 1e-12))
        throw StepSizeError("W substep " + std::to_string(dt) + " exceeds the stability bound " +
                            std::to_string(gen.bound()));
    std::vector<double> flux(u.size() - 1);
    for (int s = 0; s < k; ++s) gen.euler(u, flux, dt);
}

}  // namespace

double w_stability_bound(const TargetSpec1D& target, const Grid1D& grid) { return FpGenerator(target, grid).bound(); }

int w_default_substeps(const TargetSpec1D& target, const Grid1D& grid, double t) {
    return substeps_for(FpGenerator(target, grid), t);
}

DensityField w_step_grid(const TargetSpec1D& target, const DensityField& v, double gamma, int n_substeps) {
    if (!(gamma >= 0.0)) throw DomainError("w_step_grid: gamma must be >= 0");
    if (gamma == 0.0) return v;
    const FpGenerator gen(target, v.grid());
    std::vector<double> u = v.values();
    advance(gen, u, gamma, n_substeps);
    return DensityField(v.grid(), std::move(u));
}

std::vector<double> w_apply_signed(const TargetSpec1D& target, const Grid1D& grid, std::vector<double> field,
                                   double t, int n_substeps) {
    if (!(t >= 0.0)) throw DomainError("w_apply_signed: t must be >= 0");
    if (static_cast<int>(field.size()) != grid.n_points()) throw DomainError("w_apply_signed: size differs from grid");
    const FpGenerator gen(target, grid);
    advance(gen, field, t, n_substeps);
    return field;
}

DensityField split_step_grid(const TargetSpec1D& target, const DensityField& v, SplitOrder order, double gamma,
                             int n_substeps) {
    if (order == SplitOrder::WThenFR) return fr_step_grid(target, w_step_grid(target, v, gamma, n_substeps), gamma);
    return w_step_grid(target, fr_step_grid(target, v, gamma), gamma, n_substeps);
}

DensityField iterate_split_grid(const TargetSpec1D& target, const DensityField& v, SplitOrder order, double gamma,
                                int n) {
    if (n < 0) throw DomainError("iterate_split_grid: n must be >= 0");
    DensityField cur = v;
    for (int k = 0; k < n; ++k) cur = split_step_grid(target, cur, order, gamma);
    return cur;
}

DensityField wfr_reference_grid(const TargetSpec1D& target, const DensityField& mu0, double t, double dt) {
    if (!(dt > 0.0) || dt > 1e-3) throw DomainError("wfr_reference_grid: dt must lie in (0, 1e-3]");
    if (!(t >= 0.0)) throw DomainError("wfr_reference_grid: t must be >= 0");
    if (t == 0.0) return mu0;
    const long n = static_cast<long>(std::ceil(t / dt - 1e-9));
    const double h = t / static_cast<double>(n);
    const FpGenerator gen(target, mu0.grid());
    const int k = substeps_for(gen, h);
    // Consecutive FR half steps merge into one full step (FR is a semigroup).
    DensityField cur = fr_step_grid(target, mu0, 0.5 * h);
    for (long s = 0; s < n; ++s) {
        std::vector<double> u = cur.values();
        advance(gen, u, h, k);
        cur = fr_step_grid(target, DensityField(mu0.grid(), std::move(u)), s + 1 < n ? h : 0.5 * h);
    }
    return cur;
}

namespace {

// log(nu/pi) and |d/dx log(nu/pi)|^2 on the usable cells.
struct RatioFields {
    std::vector<double> g, s, w;
    std::vector<char> used;
    double excluded = 0.0;
};

RatioFields ratio_fields(const DensityField& nu, const TargetSpec1D& target) {
    const Grid1D& grid = nu.grid();
    const int n = grid.n_points();
    const double h = grid.h();
    RatioFields r;
    r.g.assign(n, 0.0);
    r.s.assign(n, 0.0);
    r.w.assign(n, 0.0);
    r.used.assign(n, 0);
    std::vector<double> lv(n);
    std::vector<char> ok(n);
    for (int i = 0; i < n; ++i) {
        ok[i] = nu[i] >= 1e-300;
        lv[i] = ok[i] ? std::log(nu[i]) : 0.0;
    }
    for (int i = 0; i < n; ++i) {
        if (!ok[i]) {
            r.excluded += grid.weight(i) * nu[i];
            continue;
        }
        const bool left = i > 0 && ok[i - 1];
        const bool right = i + 1 < n && ok[i + 1];
        double dl;
        if (left && right) dl = (lv[i + 1] - lv[i - 1]) / (2.0 * h);
        else if (right) dl = (lv[i + 1] - lv[i]) / h;
        else if (left) dl = (lv[i] - lv[i - 1]) / h;
        else {
            r.excluded += grid.weight(i) * nu[i];
            continue;
        }
        const double x = grid.x(i);
        const double sc = dl - target.score(x);
        r.g[i] = lv[i] - target.log_density(x);
        r.s[i] = sc * sc;
        r.w[i] = grid.weight(i) * nu[i];
        r.used[i] = 1;
    }
    return r;
}

double weighted_mean(const std::vector<double>& f, const std::vector<double>& w) {
    double a = 0.0, z = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        a += w[i] * f[i];
        z += w[i];
    }
    return a / z;
}

double weighted_cov(const std::vector<double>& f, const std::vector<double>& g, const std::vector<double>& w) {
    const double mf = weighted_mean(f, w);
    const double mg = weighted_mean(g, w);
    double a = 0.0, z = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        a += w[i] * (f[i] - mf) * (g[i] - mg);
        z += w[i];
    }
    return a / z;
}

}  // namespace

CovDiagnostic cov_diagnostic(const DensityField& nu, const TargetSpec1D& target) {
    const RatioFields r = ratio_fields(nu, target);
    CovDiagnostic d;
    d.value = weighted_cov(r.g, r.s, r.w);
    d.excluded_mass = r.excluded;
    d.reliable = r.excluded <= 1e-6;
    return d;
}

KlDecayRhs kl_decay_rhs_wfr_split(const DensityField& nu, const TargetSpec1D& target, double gamma) {
    if (!(gamma >= 0.0)) throw DomainError("kl_decay_rhs_wfr_split: gamma must be >= 0");
    const RatioFields r = ratio_fields(nu, target);
    KlDecayRhs out;
    out.fisher_term = -weighted_mean(r.s, r.w);
    out.variance_term = -weighted_cov(r.g, r.g, r.w);
    out.perturbation_term = std::expm1(gamma) * weighted_cov(r.g, r.s, r.w);
    out.reliable = r.excluded <= 1e-6;
    return out;
}

std::vector<DensityField> frw_trajectory(const TargetSpec1D& target, const DensityField& mu0, double gamma,
                                         int n_quad) {
    if (n_quad < 1) throw DomainError("frw_trajectory: n_quad must be >= 1");
    std::vector<DensityField> out;
    out.reserve(n_quad + 1);
    for (int j = 0; j <= n_quad; ++j) {
        const double tau = gamma * j / n_quad;
        out.push_back(w_step_grid(target, fr_step_grid(target, mu0, tau), tau));
    }
    return out;
}

double frw_perturbation_grid(const std::vector<DensityField>& traj, const TargetSpec1D& target, double gamma,
                             int n_quad) {
    if (n_quad < 4 || n_quad % 2) throw DomainError("frw_perturbation_grid: n_quad must be even and >= 4");
    if (static_cast<int>(traj.size()) != n_quad + 1)
        throw DomainError("frw_perturbation_grid: trajectory must hold n_quad + 1 densities");
    if (!(gamma > 0.0)) throw DomainError("frw_perturbation_grid: gamma must be > 0");
    const Grid1D& grid = traj.back().grid();
    const RatioFields last = ratio_fields(traj.back(), target);
    const double h = gamma / n_quad;
    double acc = 0.0;
    for (int j = 0; j <= n_quad; ++j) {
        const std::vector<double> u = w_apply_signed(target, grid, last.g, gamma - j * h);
        const RatioFields r = ratio_fields(traj[j], target);
        const double c = weighted_cov(u, r.s, r.w);
        const double wj = (j == 0 || j == n_quad) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += wj * c;
    }
    return acc * h / 3.0;
}

}  // namespace wfr
