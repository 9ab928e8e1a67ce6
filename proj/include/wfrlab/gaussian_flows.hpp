#pragma once

#include "wfrlab/divergences.hpp"
#include "wfrlab/linalg.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace wfr {

/// Target data shared by every Gaussian map: C_pi^-1, Gamma = C_pi^-1 + I/2 and
/// their common eigenbasis (ordered so Gamma's eigenvalues ascend).
class WfrContext {
public:
    explicit WfrContext(GaussianDist target);

    int dim() const { return target_.dim(); }
    const GaussianDist& target() const { return target_; }
    const SpdMatrix& c_pi_inv() const { return c_pi_inv_; }
    const SpdMatrix& gamma_mat() const { return gamma_; }

    /// Gamma eigenvalues lambda_1 <= ... <= lambda_d.
    const Vec& gamma_eigenvalues() const { return lambda_; }
    /// Columns p_1..p_d.
    const Mat& basis() const { return basis_; }
    /// Eigenvalues of C_pi^-1 in the same order (c_i = lambda_i - 1/2).
    const Vec& c_values() const { return c_; }
    /// Eigenvalues of C_pi in the same order (sigma_i = 1/c_i).
    const Vec& sigma_values() const { return sigma_; }

    /// V diag(f(i)) V^T with f indexed over the shared eigenbasis.
    Mat spectral(const std::function<double(int)>& f) const;

private:
    GaussianDist target_;
    SpdMatrix c_pi_inv_;
    SpdMatrix gamma_;
    Vec lambda_, c_, sigma_;
    Mat basis_;
};

enum class SplitOrder { WThenFR, FRThenW };

enum class MtKind { Zero, WfrSplitWFR, WfrSplitFRW };

/// Perturbation M_s of the general moment system. For the split kinds M depends
/// on the elapsed time s: (e^s - 1) I, resp. -1/2 C_pi (e^{2 s C_pi^-1} - I).
struct MtSpec {
    MtKind kind = MtKind::Zero;
    double gamma_step = 0.0;

    static MtSpec zero() { return {MtKind::Zero, 0.0}; }
    static MtSpec split_wfr(double gamma);
    static MtSpec split_frw(double gamma);
};

struct TrajectoryPoint {
    int step = 0;
    double time = 0.0;
    GaussianDist dist;
    /// Divergences of dist against the target.
    DivergenceReport div;
};

/// True when ||C_0 - C_pi||_max < 1e-10 ||C_pi||_max.
bool is_degenerate(const WfrContext& ctx, const GaussianDist& init);

GaussianDist wfr_exact(const WfrContext& ctx, const GaussianDist& init, double t);
/// Ornstein-Uhlenbeck map of the pure Wasserstein flow.
GaussianDist w_step(const WfrContext& ctx, const GaussianDist& v, double t);
/// Precision interpolation of the pure Fisher-Rao flow.
GaussianDist fr_step(const WfrContext& ctx, const GaussianDist& v, double t);
GaussianDist split_step(const WfrContext& ctx, const GaussianDist& v, SplitOrder order, double gamma);
std::vector<TrajectoryPoint> iterate_split(const WfrContext& ctx, const GaussianDist& init, SplitOrder order,
                                           double gamma, int n);

/// Diagonal of Z_t^M = 2 int_0^t e^{-Gamma s} M_s e^{-Gamma s} ds in the context basis.
Vec z_m_diag(const WfrContext& ctx, MtKind kind, double t);
GaussianDist general_mt_solution(const WfrContext& ctx, const GaussianDist& init, const MtSpec& spec, double t);

/// M_s as a matrix.
Mat m_matrix(const WfrContext& ctx, MtKind kind, double s);
/// Fixed-step RK4 on the coupled (m, C) moment ODEs.
GaussianDist moment_ode_integrate(const WfrContext& ctx, const GaussianDist& init, const MtSpec& spec, double t,
                                  double dt);

/// (sum_{k=1}^{k_max} gamma^k/k! (2 C_pi^-1)^{k-1}, (C_pi/2)(e^{2 gamma C_pi^-1} - I)).
std::pair<SymMatrix, SymMatrix> gfrw_series_check(const WfrContext& ctx, double gamma, int k_max);

}  // namespace wfr
