#pragma once

#include "wfrlab/gaussian_flows.hpp"

namespace wfr {

/// Hessian bounds and derived constants for the log-concavity results.
struct ConvexityConstants {
    double alpha_pi = 0.0;
    double L_pi = 0.0;
    double alpha_0 = 0.0;
    double L_0 = 0.0;
    double delta = 0.5;
    double alpha_d = 0.0;  ///< convexity of V_0 - (1+delta)/2 V_pi
    double alpha_h = 0.0;  ///< convexity of R + V_pi
    double b = 0.0;        ///< sqrt(|alpha_h - L_pi| / 2)
    double c0 = 0.0;       ///< alpha_d + (delta/2) alpha_pi
    /// b^2 < alpha_pi / 2.
    bool admissible = false;
};

/// Exact constants for Gaussian potentials. Throws AssumptionViolation when alpha_d <= 0.
ConvexityConstants gaussian_constants(const GaussianDist& target, const GaussianDist& init, double delta = 0.5);

/// Log-concavity along the pure FR flow: (1 - e^{-t}) alpha_pi + e^{-t} alpha_0.
double fr_alpha(const ConvexityConstants& k, double t);

/// c_t = b tan(atan(c0/b) - b t) with b = sqrt(|alpha_h - L_pi|); W-flow constant is alpha_pi/2 + c_t.
struct WHorizon {
    double b = 0.0;
    double c0 = 0.0;
    double t_star = 0.0;
    /// b == 0: c_t stays at c0 and t_star is +inf.
    bool flat = false;

    double c(double t) const;
};

WHorizon w_horizon(const ConvexityConstants& k);

struct WfrAlphaCurve {
    ConvexityConstants constants;
    double c_inf_1 = 0.0;
    double c_inf_2 = 0.0;
    double l0 = 0.0;

    /// Closed-form solution of dc/dt = -c^2 - c - b^2 + alpha_pi/2 from c0.
    double c(double t) const;
};

/// Throws ConditionViolation unless b^2 < alpha_pi / 2.
WfrAlphaCurve make_wfr_alpha_curve(const ConvexityConstants& k);
double wfr_alpha(const WfrAlphaCurve& curve, double t);

/// Max |RK4 - closed form| for the Riccati ODE on [0, t_max].
double riccati_check(const WfrAlphaCurve& curve, double t_max, double dt);

/// min eig of C_t^{-1} along the exact WFR flow.
double true_alpha_gaussian(const WfrContext& ctx, const GaussianDist& init, double t);

}  // namespace wfr
