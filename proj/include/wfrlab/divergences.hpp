#pragma once

#include "wfrlab/grid.hpp"
#include "wfrlab/linalg.hpp"

namespace wfr {

/// KL(a||b), KL(b||a), their sum, and the relative Fisher information I(a||b).
struct DivergenceReport {
    double kl_forward = 0.0;
    double kl_reverse = 0.0;
    double jeffreys = 0.0;
    double fisher_info = 0.0;
};

/// Values in (-1e-8, 0) become 0; anything more negative is a ConsistencyError.
double clamp_divergence(double v, const char* what);

double kl_gaussian(const GaussianDist& a, const GaussianDist& b);
double fisher_info_gaussian(const GaussianDist& a, const GaussianDist& b);
DivergenceReport divergence_report(const GaussianDist& a, const GaussianDist& b);

/// Trapezoid KL between grid densities. Cells with p < 1e-300 are skipped;
/// a cell with p > 0 and q == 0 makes the result +inf.
double kl_grid(const DensityField& p, const DensityField& q);

/// Default quadrature window: union of [m - 10 sd, m + 10 sd] over both laws (1D).
Grid1D default_kl_grid(const GaussianDist& a, const GaussianDist& b, int n_points);

}  // namespace wfr
