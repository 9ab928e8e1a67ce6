#include "wfrlab/errors.hpp"
#include "wfrlab/validate.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace wfr;

TEST_CASE("every suite runs and only the documented checks fail") {
    const auto checks = run_suites("");
    CHECK(checks.size() > 50);
    int known = 0;
    for (const auto& c : checks) {
        INFO(c.suite << "/" << c.name << " residual " << c.residual << " " << c.detail);
        if (is_known_discrepancy(c)) {
            ++known;
            CHECK_FALSE(c.passed);
        } else {
            CHECK(c.passed);
        }
    }
    CHECK(known == 3);
}

TEST_CASE("suite filter") {
    const auto checks = run_suites("gaussian-composition");
    CHECK(checks.size() == 3);
    for (const auto& c : checks) CHECK(c.suite == "gaussian-composition");
    CHECK_THROWS_AS(run_suites("nope"), ConfigError);
}

TEST_CASE("reports") {
    const auto checks = run_suites("series", 7);
    const auto j = nlohmann::json::parse(validate_json(checks, 7));
    CHECK(j["seed"] == 7);
    CHECK(j["passed"] == true);
    CHECK(j["checks"][0]["residual"].get<double>() < 1e-10);
    CHECK(validate_text(checks, 7).find("series,gfrw-partial-sum,pass") != std::string::npos);
}

TEST_CASE("seeded suites are reproducible") {
    const auto a = run_suites("divergences", 42);
    const auto b = run_suites("divergences", 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].residual == b[i].residual);
}
