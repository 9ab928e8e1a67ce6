#pragma once

#include "wfrlab/gaussian_flows.hpp"
#include "wfrlab/grid.hpp"

#include <vector>

namespace wfr {

/// [min mean - 12 sd, max mean + 12 sd] over the initial law and every target component.
Grid1D default_grid(const TargetSpec1D& target, double init_mean, double init_var, int n_points);

/// Discretized target, normalized on the grid.
DensityField discretize(const TargetSpec1D& target, const Grid1D& grid);
DensityField discretize_gaussian(double mean, double var, const Grid1D& grid);

/// S_FR(g, v) proportional to pi^{1-e^{-g}} v^{e^{-g}}, evaluated in log space.
DensityField fr_step_grid(const TargetSpec1D& target, const DensityField& v, double gamma);

/// Largest explicit substep that keeps the Fokker-Planck update monotone:
/// 0.5 / max|diag|, equal to h^2/4 for a flat potential.
double w_stability_bound(const TargetSpec1D& target, const Grid1D& grid);
/// ceil(t / bound), at least 1; StepSizeError above 1e6.
int w_default_substeps(const TargetSpec1D& target, const Grid1D& grid, double t);

/// Fokker-Planck advance by time gamma: exponential-fitting flux form, zero-flux
/// boundaries, explicit substeps (n_substeps = 0 picks the default).
DensityField w_step_grid(const TargetSpec1D& target, const DensityField& v, double gamma, int n_substeps = 0);

/// The same generator acting on a signed field, no renormalization.
std::vector<double> w_apply_signed(const TargetSpec1D& target, const Grid1D& grid, std::vector<double> field,
                                   double t, int n_substeps = 0);

DensityField split_step_grid(const TargetSpec1D& target, const DensityField& v, SplitOrder order, double gamma,
                             int n_substeps = 0);
DensityField iterate_split_grid(const TargetSpec1D& target, const DensityField& v, SplitOrder order, double gamma,
                                int n);

/// Strang composition FR(dt/2) W(dt) FR(dt/2) used as the exact-flow surrogate.
DensityField wfr_reference_grid(const TargetSpec1D& target, const DensityField& mu0, double t, double dt);

struct CovDiagnostic {
    double value = 0.0;
    /// Trapezoid mass of cells left out of the quadrature.
    double excluded_mass = 0.0;
    bool reliable = true;
};

/// Cov_nu(log(nu/pi), |d/dx log(nu/pi)|^2).
CovDiagnostic cov_diagnostic(const DensityField& nu, const TargetSpec1D& target);

struct KlDecayRhs {
    double fisher_term = 0.0;        ///< -I(nu || pi)
    double variance_term = 0.0;      ///< -Var_nu(log nu/pi)
    double perturbation_term = 0.0;  ///< (e^g - 1) Cov_nu(log nu/pi, |grad log nu/pi|^2)
    bool reliable = true;
    double total() const { return fisher_term + variance_term + perturbation_term; }
};

/// d/dgamma KL along one W-FR step, split into its three contributions.
KlDecayRhs kl_decay_rhs_wfr_split(const DensityField& nu, const TargetSpec1D& target, double gamma);

/// eta_tau = S_W(tau, S_FR(tau, mu0)) at tau_j = j gamma / n_quad, j = 0..n_quad.
std::vector<DensityField> frw_trajectory(const TargetSpec1D& target, const DensityField& mu0, double gamma,
                                         int n_quad);

/// int_0^gamma Cov_{eta_tau}(S_W(gamma - tau, g(eta_gamma)), |grad g(eta_tau)|^2) dtau by Simpson.
double frw_perturbation_grid(const std::vector<DensityField>& traj, const TargetSpec1D& target, double gamma,
                             int n_quad);

}  // namespace wfr
