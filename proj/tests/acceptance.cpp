// Acceptance driver: one PASS/FAIL line per criterion.
#include "wfrlab/config.hpp"
#include "wfrlab/experiments.hpp"
#include "wfrlab/validate.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace wfr;

namespace {

struct Outcome {
    bool passed = true;
    bool known_only = false;  // failed, but only on documented discrepancies
    std::string detail;
};

Outcome from_checks(const std::vector<CheckResult>& checks, const std::set<std::string>& names) {
    Outcome o;
    int used = 0, failed = 0, known = 0;
    for (const auto& c : checks) {
        if (!names.empty() && !names.count(c.name)) continue;
        ++used;
        if (c.passed) continue;
        ++failed;
        if (is_known_discrepancy(c)) ++known;
        char buf[256];
        std::snprintf(buf, sizeof buf, " [%s residual %.4g > %.3g]", c.name.c_str(), c.residual, c.tolerance);
        o.detail += buf;
    }
    o.passed = failed == 0 && used > 0;
    o.known_only = failed > 0 && failed == known;
    o.detail = std::to_string(used - failed) + "/" + std::to_string(used) + " checks" + o.detail;
    return o;
}

Outcome suite(const std::string& name, const std::set<std::string>& checks = {}) {
    return from_checks(run_suites(name, 42), checks);
}

Outcome figure1() {
    const ExperimentResult r = run_figure1(Config{}, 1);
    int neg_left = 0, neg_right = 0, n_left = 0, n_right = 0;
    for (const auto& t : r.tables) {
        const bool left = t.name == "left";
        const std::size_t k = t.column(left ? "diff_wfr" : "diff_frw");
        for (const auto& row : t.rows) {
            (left ? n_left : n_right)++;
            if (row[k] < 0.0) (left ? neg_left : neg_right)++;
        }
    }
    Outcome o;
    o.passed = n_left == 400 && n_right == 400 && neg_left == 400 && neg_right == 400;
    o.detail = "W-FR minus exact < 0 on " + std::to_string(neg_left) + "/" + std::to_string(n_left) +
               ", FR-W minus exact < 0 on " + std::to_string(neg_right) + "/" + std::to_string(n_right);
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "figure 1 signs", 1.0, figure1},
        {2, "phi_n(J_n) equals trajectory KL", 1.0, [] { return suite("decay", {"phi-jn-equals-kl"}); }},
        {3, "asymptotic ratio", 5.0,
         [] {
             return suite("decay", {"ratio-convergence-fig1-left", "ratio-convergence-fig1-right",
                                    "ratio-convergence-10d", "ratio-eps0-invariance"});
         }},
        {4, "composition identities", 2.0, [] { return suite("gaussian-composition"); }},
        {5, "moment ODE oracle", 10.0, [] { return suite("gaussian-flows", {"ode-oracle"}); }},
        {6, "log-concavity lower bound", 1.0, [] { return suite("logconcavity"); }},
        {7, "KL and Jeffreys bounds", 1.0,
         [] { return suite("decay", {"min-rule-dominates", "sharp-bound-dominates", "jeffreys-bound-dominates"}); }},
        {8, "covariance signs", 30.0, [] { return suite("diagnostics"); }},
        {9, "grid solver fidelity", 120.0, [] { return suite("grid"); }},
        {10, "g_FRW series", 0.1, [] { return suite("series"); }},
    };

    int hard_failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool ok = o.passed && in_time;
        std::printf("%s criterion %d (%s): %s; %.3f s (budget %g s)%s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                    o.detail.c_str(), secs, c.budget_s,
                    o.known_only && in_time ? " -- known discrepancy, see README" : "");
        if (!ok && !(o.known_only && in_time)) ++hard_failures;
    }
    std::fflush(stdout);
    return hard_failures == 0 ? 0 : 1;
}
