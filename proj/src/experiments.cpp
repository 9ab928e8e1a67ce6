#include "wfrlab/experiments.hpp"

#include "wfrlab/decay.hpp"
#include "wfrlab/divergences.hpp"
#include "wfrlab/errors.hpp"
#include "wfrlab/gaussian_flows.hpp"
#include "wfrlab/logconcavity.hpp"
#include "wfrlab/pde1d.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace wfr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double positive(const Config& cfg, const std::string& key, double def) {
    const double v = cfg.get_double(key, def);
    if (!(v > 0.0)) cfg.fail(key, "must be > 0");
    return v;
}

int at_least(const Config& cfg, const std::string& key, int def, int lo) {
    const int v = cfg.get_int(key, def);
    if (v < lo) cfg.fail(key, "must be >= " + std::to_string(lo));
    return v;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> out = linspace(std::log(a), std::log(b), n);
    for (double& v : out) v = std::exp(v);
    out.front() = a;
    if (n > 1) out.back() = b;
    return out;
}

/// Gaussian pair read from `<prefix>m_pi`, `<prefix>c_pi`, `<prefix>m0`, `<prefix>c0`.
struct GaussianPair {
    GaussianDist target;
    GaussianDist init;
};

GaussianPair read_pair(const Config& cfg, const std::string& prefix, const Vec& m_pi, const Mat& c_pi, const Vec& m0,
                       const Mat& c0) {
    const Vec mp = cfg.get_vector(prefix + "m_pi", m_pi);
    const int d = static_cast<int>(mp.size());
    const Vec mi = cfg.get_vector(prefix + "m0", m0);
    if (mi.size() != d) cfg.fail(prefix + "m0", "dimension differs from m_pi");
    const Mat cp = cfg.get_covariance(prefix + "c_pi", c_pi, d);
    const Mat ci = cfg.get_covariance(prefix + "c0", c0, d);
    return {make_gaussian(mp, cp), make_gaussian(mi, ci)};
}

Vec scalar(double v) { return Vec::Constant(1, v); }
Mat scalar_mat(double v) { return Mat::Constant(1, 1, v); }

ExperimentResult start(const std::string& name, const Config& cfg) {
    ExperimentResult r;
    r.experiment = name;
    r.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
    return r;
}

void finish(ExperimentResult& r, const Config& cfg) {
    const auto unused = cfg.unused_keys();
    if (!unused.empty()) cfg.fail(unused.front(), "unknown field for experiment " + r.experiment);
    r.config_line = cfg.resolved_line();
}

std::string fmt(double v) { return format_double(v); }

/// Short form for labels and table names, e.g. 2.1 rather than 2.1000000000000001.
std::string label_of(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::out_of_range("no column '" + name + "' in table " + this->name);
    return static_cast<std::size_t>(it - columns.begin());
}

void parallel_for(int n, int threads, const std::function<void(int)>& f) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (int i = next++; i < n && !failed; i = next++) {
            try {
                f(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < std::min(threads, n); ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<std::string> experiment_names() {
    return {"figure1", "figure2", "figure3", "figure4", "ratio", "grid-demo", "validate"};
}

ExperimentResult run_experiment(const std::string& name, const Config& cfg, int threads) {
    if (name == "figure1") return run_figure1(cfg, threads);
    if (name == "figure2") return run_figure2(cfg, threads);
    if (name == "figure3") return run_figure3(cfg, threads);
    if (name == "figure4") return run_figure4(cfg, threads);
    if (name == "ratio") return run_ratio(cfg, threads);
    if (name == "grid-demo") return run_grid_demo(cfg, threads);
    throw ConfigError("unknown experiment '" + name + "'");
}

// Single-step KL of exact flow and both splittings over a log-spaced gamma grid.
ExperimentResult run_figure1(const Config& cfg, int threads) {
    ExperimentResult r = start("figure1", cfg);
    const double g_min = positive(cfg, "gamma_min", 1e-3);
    const double g_max = positive(cfg, "gamma_max", 10.0);
    if (!(g_max > g_min)) cfg.fail("gamma_max", "must exceed gamma_min");
    const int n = at_least(cfg, "n_gamma", 400, 1);
    const std::vector<double> gammas = logspace(g_min, g_max, n);

    const GaussianPair panels[2] = {
        read_pair(cfg, "left_", scalar(20), scalar_mat(100), scalar(0), scalar_mat(1)),
        read_pair(cfg, "right_", scalar(20), scalar_mat(1), scalar(0), scalar_mat(100)),
    };
    const char* names[2] = {"left", "right"};
    for (int p = 0; p < 2; ++p) {
        const WfrContext ctx(panels[p].target);
        const GaussianDist& init = panels[p].init;
        Table t{names[p], {"gamma", "kl_exact", "kl_wfr_split", "kl_frw_split", "diff_wfr", "diff_frw"}, {}};
        t.rows.resize(n);
        parallel_for(n, threads, [&](int i) {
            const double g = gammas[i];
            const double ke = kl_gaussian(wfr_exact(ctx, init, g), ctx.target());
            const double kw = kl_gaussian(split_step(ctx, init, SplitOrder::WThenFR, g), ctx.target());
            const double kf = kl_gaussian(split_step(ctx, init, SplitOrder::FRThenW, g), ctx.target());
            t.rows[i] = {g, ke, kw, kf, kw - ke, kf - ke};
        });
        int neg_w = 0, neg_f = 0;
        for (const auto& row : t.rows) {
            neg_w += row[4] < 0.0;
            neg_f += row[5] < 0.0;
        }
        r.notes.push_back(std::string(names[p]) + ": diff_wfr < 0 on " + std::to_string(neg_w) + "/" +
                          std::to_string(n) + " rows, diff_frw < 0 on " + std::to_string(neg_f) + "/" +
                          std::to_string(n) + " rows");
        r.tables.push_back(std::move(t));
    }
    finish(r, cfg);
    return r;
}

// n-step KL ratios against the exact flow. Default instance: C_pi = diag(1..d),
// C_0 = C_pi + I, m_pi = 1, m_0 = 0.
ExperimentResult run_figure2(const Config& cfg, int threads) {
    ExperimentResult r = start("figure2", cfg);
    const int d = at_least(cfg, "dim", 10, 1);
    if (d > kMaxDim) cfg.fail("dim", "exceeds " + std::to_string(kMaxDim));
    Mat cp = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) cp(i, i) = i + 1.0;
    const GaussianPair pair = read_pair(cfg, "", Vec::Ones(d), cp, Vec::Zero(d), cp + Mat::Identity(d, d));
    const double gamma = positive(cfg, "gamma", 0.7);
    const int n_max = at_least(cfg, "n_max", 400, 1);

    const DecaySetup s(WfrContext(pair.target), pair.init, gamma);
    double asym_w = kNaN, asym_f = kNaN;
    try {
        asym_w = asymptotic_ratio(SchemeKind::SplitWFR, s);
        asym_f = asymptotic_ratio(SchemeKind::SplitFRW, s);
    } catch (const Error& e) {
        r.notes.push_back(std::string("asymptotic ratio unavailable: ") + e.what());
    }
    const SymMatrix om_e = omega(SchemeKind::Exact, s);
    const SymMatrix om_w = omega(SchemeKind::SplitWFR, s);
    const SymMatrix om_f = omega(SchemeKind::SplitFRW, s);

    Table t{"figure2",
            {"t", "ratio_wfr", "ratio_frw", "asymptotic_wfr", "asymptotic_frw", "kl_exact", "kl_wfr", "kl_frw"},
            {}};
    t.rows.resize(n_max);
    parallel_for(n_max, threads, [&](int i) {
        const int n = i + 1;
        const ScaledValue e = phi_n_scaled(om_e, n, s);
        const ScaledValue w = phi_n_scaled(om_w, n, s);
        const ScaledValue f = phi_n_scaled(om_f, n, s);
        t.rows[i] = {n * gamma, w.mantissa / e.mantissa, f.mantissa / e.mantissa, asym_w, asym_f,
                     e.value(),  w.value(),                f.value()};
    });
    r.notes.push_back("dim=" + std::to_string(d) + ", signature(E_0)=" + std::to_string(s.signature()));
    r.tables.push_back(std::move(t));
    finish(r, cfg);
    return r;
}

// Log-concavity curve of the WFR flow against the exact Gaussian value.
ExperimentResult run_figure3(const Config& cfg, int threads) {
    ExperimentResult r = start("figure3", cfg);
    const std::vector<double> c_pis = cfg.get_list("c_pi_list", {100.0, 5.0, 2.1, 2.0});
    const double c0 = positive(cfg, "c0", 1.0);
    const double delta = cfg.get_double("delta", 0.5);
    const double t_max = positive(cfg, "t_max", 20.0);
    const int n_t = at_least(cfg, "n_t", 500, 2);
    for (double c : c_pis)
        if (!(c > 0.0)) cfg.fail("c_pi_list", "entries must be > 0");
    const std::vector<double> ts = linspace(0.0, t_max, n_t);

    for (double c_pi : c_pis) {
        const GaussianDist target = make_gaussian_1d(0.0, c_pi);
        const GaussianDist init = make_gaussian_1d(0.0, c0);
        const std::string label = "c_pi=" + label_of(c_pi);
        ConvexityConstants k;
        try {
            k = gaussian_constants(target, init, delta);
        } catch (const AssumptionViolation& e) {
            r.notes.push_back(label + ": assumptions violated (" + e.what() + "); no curve");
            continue;
        }
        if (!k.admissible) {
            r.notes.push_back(label + ": inadmissible, b^2=" + fmt(k.b * k.b) + " >= alpha_pi/2=" +
                              fmt(k.alpha_pi / 2) + "; no curve");
            continue;
        }
        const WfrAlphaCurve curve = make_wfr_alpha_curve(k);
        const WfrContext ctx(target);
        Table t{"cpi_" + label_of(c_pi), {"t", "alpha_theorem", "alpha_true"}, {}};
        t.rows.resize(n_t);
        parallel_for(n_t, threads, [&](int i) {
            t.rows[i] = {ts[i], wfr_alpha(curve, ts[i]), true_alpha_gaussian(ctx, init, ts[i])};
        });
        double excess = 0.0, t_at = 0.0;
        for (const auto& row : t.rows)
            if (row[1] - row[2] > excess) {
                excess = row[1] - row[2];
                t_at = row[0];
            }
        r.notes.push_back(label + ": admissible; max(alpha_theorem - alpha_true)=" + fmt(excess) +
                          (excess > 0.0 ? " at t=" + fmt(t_at) : ""));
        r.tables.push_back(std::move(t));
    }
    finish(r, cfg);
    return r;
}

// KL decay bounds (left) and Jeffreys decay bound (right).
ExperimentResult run_figure4(const Config& cfg, int threads) {
    ExperimentResult r = start("figure4", cfg);
    const GaussianPair pair = read_pair(cfg, "", scalar(20), scalar_mat(100), scalar(0), scalar_mat(1));
    const double delta = cfg.get_double("delta", 0.1);
    if (!(delta > 0.0 && delta < 1.0)) cfg.fail("delta", "must lie in (0,1)");
    const double delta_c = cfg.get_double("delta_constants", 0.5);
    if (!(delta_c > 0.0 && delta_c < 1.0)) cfg.fail("delta_constants", "must lie in (0,1)");
    const std::optional<double> m_override = cfg.get_optional_double("sharp_m");
    if (m_override && !(*m_override > 0.0)) cfg.fail("sharp_m", "must be > 0");
    const double t_max = positive(cfg, "t_max", 20.0);
    const int n_t = at_least(cfg, "n_t", 201, 2);
    const std::vector<double> ts = linspace(0.0, t_max, n_t);

    const DecaySetup s(WfrContext(pair.target), pair.init, 1.0);
    const ConvexityConstants k = gaussian_constants(pair.target, pair.init, delta_c);
    const std::optional<double> t0 = sharp_bound_t0(s, delta, m_override);
    if (t0)
        r.notes.push_back("sharp bound t0=" + fmt(*t0) + (m_override ? " (sharp_m override)" : ""));
    else
        r.notes.push_back("sharp bound unavailable: P_0 - P_pi is not positive definite");

    Table left{"left", {"t", "kl_exact", "bound_min_rule", "bound_sharp"}, {}};
    Table right{"right", {"t", "jeffreys_exact", "jeffreys_bound", "jeffreys_bound_fixed"}, {}};
    left.rows.resize(n_t);
    right.rows.resize(n_t);
    parallel_for(n_t, threads, [&](int i) {
        const double t = ts[i];
        const DivergenceReport rep = divergence_report(wfr_exact(s.ctx(), pair.init, t), pair.target);
        const std::optional<double> sharp = bound_sharp(s, t, delta, m_override);
        left.rows[i] = {t, rep.kl_forward, bound_min_rule(s, t), sharp ? *sharp : kNaN};
        right.rows[i] = {t, rep.jeffreys, jeffreys_bound(s, k, t), jeffreys_bound_fixed(s, k, t)};
    });
    r.tables.push_back(std::move(left));
    r.tables.push_back(std::move(right));
    finish(r, cfg);
    return r;
}

// Asymptotic speed-up ratio vs the empirical n-step ratio, over a list of step sizes.
ExperimentResult run_ratio(const Config& cfg, int threads) {
    ExperimentResult r = start("ratio", cfg);
    const GaussianPair pair = read_pair(cfg, "", scalar(20), scalar_mat(100), scalar(0), scalar_mat(1));
    const std::vector<double> gammas = cfg.get_list("gammas", {0.1, 0.7, 2.0});
    const int n = at_least(cfg, "n", 400, 1);
    for (double g : gammas)
        if (!(g > 0.0)) cfg.fail("gammas", "entries must be > 0");
    const WfrContext ctx(pair.target);
    const int m = static_cast<int>(gammas.size());
    Table t{"ratio", {"gamma", "case", "asymptotic_wfr", "asymptotic_frw", "empirical_wfr", "empirical_frw"}, {}};
    t.rows.resize(m);
    std::vector<std::string> notes(m);
    parallel_for(m, threads, [&](int i) {
        const DecaySetup s(ctx, pair.init, gammas[i]);
        const Definiteness d = classify_definiteness(s);
        const double kind = d.kind == DefinitenessCase::Positive ? 1.0 : d.kind == DefinitenessCase::Negative ? -1.0 : 0.0;
        double aw = kNaN, af = kNaN;
        try {
            aw = asymptotic_ratio(SchemeKind::SplitWFR, s);
            af = asymptotic_ratio(SchemeKind::SplitFRW, s);
        } catch (const Error& e) {
            notes[i] = "gamma=" + label_of(gammas[i]) + ": " + e.what();
        }
        t.rows[i] = {gammas[i], kind, aw, af, kl_ratio(SchemeKind::SplitWFR, n, s), kl_ratio(SchemeKind::SplitFRW, n, s)};
    });
    for (const auto& s : notes)
        if (!s.empty()) r.notes.push_back(s);
    r.notes.push_back("case: 1 = E_0 positive definite, -1 = below all Omega, 0 = neither");
    r.tables.push_back(std::move(t));
    finish(r, cfg);
    return r;
}

// Grid solver on a bimodal target: split schemes against the small-step reference.
ExperimentResult run_grid_demo(const Config& cfg, int threads) {
    ExperimentResult r = start("grid-demo", cfg);
    const std::vector<double> w = cfg.get_list("weights", {0.5, 0.5});
    const std::vector<double> mu = cfg.get_list("means", {-4.0, 4.0});
    const std::vector<double> var = cfg.get_list("vars", {1.0, 1.0});
    if (w.size() != mu.size() || w.size() != var.size())
        cfg.fail("weights", "weights, means and vars must have equal length");
    std::vector<TargetSpec1D::Component> comps;
    for (std::size_t i = 0; i < w.size(); ++i) comps.push_back({w[i], mu[i], var[i]});
    TargetSpec1D target = TargetSpec1D::gaussian(0.0, 1.0);
    try {
        target = TargetSpec1D::mixture(comps);
    } catch (const Error& e) {
        cfg.fail("weights", e.what());
    }
    const double m0 = cfg.get_double("m0", 0.0);
    const double c0 = positive(cfg, "c0", 0.5);
    const double horizon = positive(cfg, "t_end", 2.0);
    const std::vector<double> gammas = cfg.get_list("gammas", {0.2, 0.1, 0.05});
    const int n_points = at_least(cfg, "n_points", 1001, 64);
    const double ref_dt = positive(cfg, "ref_dt", 1e-4);
    if (ref_dt > 1e-3) cfg.fail("ref_dt", "must be <= 1e-3");
    std::vector<int> steps;
    for (double g : gammas) {
        if (!(g > 0.0)) cfg.fail("gammas", "entries must be > 0");
        const double n = horizon / g;
        if (std::abs(n - std::round(n)) > 1e-9 * n)
            cfg.fail("gammas", "t_end must be a multiple of every gamma");
        steps.push_back(static_cast<int>(std::lround(n)));
    }

    const Grid1D grid = default_grid(target, m0, c0, n_points);
    const DensityField mu0 = discretize_gaussian(m0, c0, grid);
    const DensityField pi_hat = discretize(target, grid);
    const DensityField ref = wfr_reference_grid(target, mu0, horizon, ref_dt);
    const double kl_ref = kl_grid(ref, pi_hat);

    const int m = static_cast<int>(gammas.size());
    Table t{"convergence", {"gamma", "n_steps", "kl_wfr_split", "kl_frw_split", "kl_reference", "gap_wfr", "gap_frw"}, {}};
    t.rows.resize(m);
    std::vector<DensityField> dens_w(m, mu0), dens_f(m, mu0);
    parallel_for(2 * m, threads, [&](int j) {
        const int i = j / 2;
        const SplitOrder o = j % 2 ? SplitOrder::FRThenW : SplitOrder::WThenFR;
        (j % 2 ? dens_f : dens_w)[i] = iterate_split_grid(target, mu0, o, gammas[i], steps[i]);
    });
    for (int i = 0; i < m; ++i) {
        const double kw = kl_grid(dens_w[i], pi_hat);
        const double kf = kl_grid(dens_f[i], pi_hat);
        t.rows[i] = {gammas[i], static_cast<double>(steps[i]), kw, kf, kl_ref, std::abs(kw - kl_ref),
                     std::abs(kf - kl_ref)};
    }
    Table dens{"densities", {"x", "pi", "mu0", "reference", "wfr_split", "frw_split"}, {}};
    const int last = m - 1;
    for (int k = 0; k < grid.n_points(); ++k)
        dens.rows.push_back({grid.x(k), pi_hat[k], mu0[k], ref[k], dens_w[last][k], dens_f[last][k]});
    r.notes.push_back("densities at t=" + fmt(horizon) + ", split schemes with gamma=" + fmt(gammas[last]));
    r.tables.push_back(std::move(t));
    r.tables.push_back(std::move(dens));
    finish(r, cfg);
    return r;
}

std::string to_csv(const ExperimentResult& r, const Table& t) {
    std::string s = "# wfr-split-lab " + r.experiment + "\n";
    s += "# config: " + r.config_line + "\n";
    s += "# seed: " + std::to_string(r.seed) + "\n";
    for (const auto& n : r.notes) s += "# note: " + n + "\n";
    s += "# table: " + t.name + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
        s += "\n";
    }
    return s;
}

std::string to_csv(const ExperimentResult& r) {
    std::string s;
    for (std::size_t i = 0; i < r.tables.size(); ++i) s += (i ? "\n" : "") + to_csv(r, r.tables[i]);
    if (r.tables.empty()) {
        ExperimentResult copy = r;
        s = to_csv(copy, Table{"empty", {}, {}});
    }
    return s;
}

std::string to_json(const ExperimentResult& r) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["seed"] = r.seed;
    j["config"] = r.config_line;
    j["notes"] = r.notes;
    j["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : r.tables) {
        nlohmann::ordered_json jt;
        jt["name"] = t.name;
        jt["columns"] = t.columns;
        jt["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            nlohmann::ordered_json jr = nlohmann::ordered_json::array();
            for (double v : row) jr.push_back(std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json());
            jt["rows"].push_back(std::move(jr));
        }
        j["tables"].push_back(std::move(jt));
    }
    return j.dump(2) + "\n";
}

}  // namespace wfr
