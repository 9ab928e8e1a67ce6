#pragma once

#include "wfrlab/gaussian_flows.hpp"
#include "wfrlab/logconcavity.hpp"

#include <optional>

namespace wfr {

enum class SchemeKind { Exact, SplitWFR, SplitFRW };

/// E_0 = C_0 - C_pi, eps_0 = m_0 - m_pi and the step size.
class DecaySetup {
public:
    DecaySetup(WfrContext ctx, const GaussianDist& init, double gamma);

    const WfrContext& ctx() const { return ctx_; }
    const GaussianDist& init() const { return init_; }
    const SymMatrix& e0() const { return e0_; }
    const Vec& eps0() const { return eps0_; }
    double gamma() const { return gamma_; }
    /// +1 if E_0 > 0, -1 if E_0 < 0, 0 for mixed or singular.
    int signature() const { return sign_; }

private:
    WfrContext ctx_;
    GaussianDist init_;
    SymMatrix e0_;
    Vec eps0_;
    double gamma_;
    int sign_;
};

SymMatrix omega(SchemeKind kind, const DecaySetup& s);

/// e^{-n g Gamma} (E0^-1 + B C_pi^-1 (I - e^{-2 n g Gamma}))^-1 e^{-n g Gamma}.
SymMatrix j_n(const SymMatrix& b, int n, const DecaySetup& s);

/// KL functional of the covariance gap A after n steps.
double phi_n(const SymMatrix& a, int n, const DecaySetup& s);

/// phi_n(J_n(B)) = mantissa * exp(log_scale), with log_scale = -n g (1 + 2 lambda_1)
/// shared by every B so ratios never underflow.
struct ScaledValue {
    double log_scale = 0.0;
    double mantissa = 0.0;
    double value() const;
};

ScaledValue phi_n_scaled(const SymMatrix& b, int n, const DecaySetup& s);

/// phi_n(J_n(Omega_kind)) / phi_n(J_n(Omega)) at step n.
double kl_ratio(SchemeKind kind, int n, const DecaySetup& s);

enum class DefinitenessCase { Positive, Negative, Neither };

struct Definiteness {
    DefinitenessCase kind = DefinitenessCase::Neither;
    bool e0_positive = false;
    /// E0^-1 C_pi < -Omega_kind (tested on the symmetric part) for each kind.
    bool below_omega = false;
    bool below_omega_beta = false;
    bool below_omega_alpha = false;
};

Definiteness classify_definiteness(const DecaySetup& s);

/// Large-n ratio of split KL over exact KL. kind must be SplitWFR or SplitFRW.
double asymptotic_ratio(SchemeKind kind, const DecaySetup& s);

/// min of the pure FR and pure W KLs at time t.
double bound_min_rule(const DecaySetup& s, double t);

/// M with log(pi/mu_0) >= -M, absent when the log ratio is unbounded below.
std::optional<double> sharp_bound_m(const DecaySetup& s);
/// t_0 = log(M / delta^3).
std::optional<double> sharp_bound_t0(const DecaySetup& s, double delta, std::optional<double> m_override = {});
/// Sharp bound, valid for t >= t_0; absent otherwise.
std::optional<double> bound_sharp(const DecaySetup& s, double t, double delta,
                                  std::optional<double> m_override = {});

/// J(mu_0, pi) exp(-int_0^t kappa), kappa = 2 min(alpha_pi, alpha_s) + 1 (Simpson, step <= 1e-3).
double jeffreys_bound(const DecaySetup& s, const ConvexityConstants& k, double t);
/// J(mu_0, pi) exp(-t kappa) with the smallest kappa on [0, t].
double jeffreys_bound_fixed(const DecaySetup& s, const ConvexityConstants& k, double t);

}  // namespace wfr
