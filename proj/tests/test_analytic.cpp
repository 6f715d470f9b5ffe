#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcim/mcim.hpp"

using Catch::Matchers::WithinAbs;

namespace {

mcim::parameter_point worked_point() {
    return {0.1, 0.25, 0.25, 2.0, 2.0};
}

}  // namespace

TEST_CASE("the worked point evaluates to the pinned bias") {
    const mcim::bias_result b = mcim::bias_percent(worked_point());
    REQUIRE(b.p_bias_percent == 3.3783783783783785);
    const mcim::bias_result s =
        mcim::bias_percent_stratum_route(worked_point());
    REQUIRE(s.p_bias_percent == 3.3783783783783798);
}

TEST_CASE("bias and ratio fields describe the same quantity") {
    for (const mcim::parameter_point p :
         {worked_point(), mcim::parameter_point{0.5, 0.5, 0.1, 5.0, 3.0},
          mcim::parameter_point{0.05, 0.75, 0.5, 0.2, 0.5}}) {
        const mcim::bias_result b = mcim::bias_percent(p);
        REQUIRE_THAT(p.p_miss * (b.rr_miss_over_rr_e - 1.0) * 100.0,
                     WithinAbs(b.p_bias_percent, 1e-9));
    }
}

TEST_CASE("a null association on either side gives exactly zero bias") {
    int checked = 0;
    for (const double pe : {0.01, 0.25, 0.75}) {
        for (const double pc : {0.05, 0.5}) {
            const mcim::parameter_point with_assoc{pe, pc, 0.25, 1.0, 3.0};
            if (mcim::is_valid(with_assoc)) {
                const mcim::bias_result null_rc =
                    mcim::bias_percent(with_assoc);
                REQUIRE(null_rc.p_bias_percent == 0.0);
                REQUIRE(null_rc.rr_miss_over_rr_e == 1.0);
                ++checked;
            }
            // rr_ec = 1 keeps every prevalence pair valid.
            const mcim::bias_result null_re =
                mcim::bias_percent({pe, pc, 0.25, 3.0, 1.0});
            REQUIRE(null_re.p_bias_percent == 0.0);
        }
    }
    REQUIRE(checked >= 3);
}

TEST_CASE("the bias sign follows the product of the association signs") {
    // Both above 1 or both below 1: upward bias. Mixed: downward.
    REQUIRE(mcim::bias_percent({0.1, 0.25, 0.1, 2.0, 2.0}).p_bias_percent >
            0.0);
    REQUIRE(mcim::bias_percent({0.1, 0.25, 0.1, 0.5, 0.5}).p_bias_percent >
            0.0);
    REQUIRE(mcim::bias_percent({0.1, 0.25, 0.1, 2.0, 0.5}).p_bias_percent <
            0.0);
    REQUIRE(mcim::bias_percent({0.1, 0.25, 0.1, 0.5, 2.0}).p_bias_percent <
            0.0);
}

TEST_CASE("bias is exactly linear in the missing proportion") {
    // Doubling p_miss is a power-of-two scaling, so it commutes with
    // rounding and the equality is exact, not approximate.
    const double half =
        mcim::bias_percent({0.1, 0.25, 0.125, 2.0, 2.0}).p_bias_percent;
    const double full =
        mcim::bias_percent({0.1, 0.25, 0.25, 2.0, 2.0}).p_bias_percent;
    REQUIRE(full == 2.0 * half);
}

TEST_CASE("both algebraic routes agree over the whole default grid") {
    const std::vector<mcim::sweep_record> records =
        mcim::enumerate_valid(mcim::default_grid());
    REQUIRE(records.size() == 33540);
    double worst = 0.0;
    double max_abs = 0.0;
    for (const mcim::sweep_record& r : records) {
        const double alt =
            mcim::bias_percent_stratum_route(r.point).p_bias_percent;
        worst = std::max(worst, std::fabs(alt - r.p_bias_percent));
        max_abs = std::max(max_abs, std::fabs(r.p_bias_percent));
        // The relative bias can never reach -100% of the missing share.
        REQUIRE(r.p_bias_percent > -100.0 * r.point.p_miss);
    }
    REQUIRE(worst <= 1e-10);
    REQUIRE(max_abs == 85.714285714285751);
}

TEST_CASE("records that sit exactly on a reporting threshold are stable") {
    // These combinations land on 5.0 or 10.0 exactly; a change in evaluation
    // order (or an FMA) would move them across the strict > threshold.
    REQUIRE(mcim::bias_percent({0.1, 0.1, 0.1, 3.0, 5.0}).p_bias_percent ==
            5.0);
    REQUIRE(mcim::bias_percent({0.25, 0.25, 0.1, 3.0, 3.0}).p_bias_percent ==
            5.0);
    REQUIRE(mcim::bias_percent({0.25, 0.5, 0.1, 3.0, 5.0}).p_bias_percent ==
            5.0);
    REQUIRE(mcim::bias_percent({0.5, 0.25, 0.25, 5.0, 1.5}).p_bias_percent ==
            10.0);
    REQUIRE(mcim::bias_percent({0.5, 0.5, 0.1, 3.0, 5.0}).p_bias_percent ==
            10.0);
    REQUIRE(mcim::bias_percent({0.5, 0.5, 0.1, 5.0, 3.0}).p_bias_percent ==
            10.0);
}

TEST_CASE("invalid combinations are rejected by every analytic entry point") {
    const mcim::parameter_point bad{0.75, 0.5, 0.1, 2.0, 0.5};
    REQUIRE_THROWS_AS(mcim::bias_percent(bad), mcim::invalid_combination);
    REQUIRE_THROWS_AS(mcim::bias_percent_stratum_route(bad),
                      mcim::invalid_combination);
    REQUIRE_THROWS_AS(mcim::rr_miss_limit(bad, 2.0),
                      mcim::invalid_combination);
    REQUIRE_THROWS_AS(
        mcim::mar_stratum_rr_limit(bad, 0.05, 2.0, mcim::mechanism::mcar(0.25),
                                   1),
        mcim::invalid_combination);
}

TEST_CASE("the missing-stratum limit matches the pinned values") {
    REQUIRE(mcim::rr_miss_limit(worked_point(), 2.0) == 2.2702702702702706);
    REQUIRE(mcim::rr_e_limit(worked_point(), 2.0) == 2.0675675675675675);
    // Null covariate effect: the missing stratum is unconfounded.
    REQUIRE_THAT(mcim::rr_miss_limit({0.1, 0.25, 0.25, 1.0, 2.0}, 2.0),
                 WithinAbs(2.0, 1e-12));
}

TEST_CASE("the limit of the summary estimate reproduces the closed form") {
    for (const mcim::parameter_point p :
         {worked_point(), mcim::parameter_point{0.5, 0.5, 0.5, 5.0, 5.0},
          mcim::parameter_point{0.05, 0.75, 0.01, 0.2, 3.0}}) {
        for (const double rre : {0.5, 1.0, 2.0}) {
            const double limit = mcim::rr_e_limit(p, rre);
            const double via_limit = (limit - rre) / rre * 100.0;
            REQUIRE_THAT(via_limit,
                         WithinAbs(mcim::bias_percent(p).p_bias_percent,
                                   1e-10));
        }
    }
}

TEST_CASE("the outcome-independence condition reads the mechanism correctly") {
    REQUIRE(mcim::mar_condition_holds(mcim::mechanism::mcar(0.25)));
    const mcim::mechanism exposure_only{{{0.9, 0.7}, {0.9, 0.7}}};
    REQUIRE(mcim::mar_condition_holds(exposure_only));
    const mcim::mechanism outcome_dep{{{0.9, 0.9}, {0.5, 0.5}}};
    REQUIRE_FALSE(mcim::mar_condition_holds(outcome_dep));
}

TEST_CASE("stratum limits equal the true effect when the condition holds") {
    const mcim::mechanism exposure_only{{{0.9, 0.7}, {0.9, 0.7}}};
    for (const mcim::mechanism& mech :
         {mcim::mechanism::mcar(0.25), exposure_only}) {
        for (const int c : {0, 1}) {
            REQUIRE_THAT(
                mcim::mar_stratum_rr_limit(worked_point(), 0.05, 2.0, mech, c),
                WithinAbs(2.0, 1e-12));
        }
    }
}

TEST_CASE("an outcome-dependent mechanism distorts the stratum limits") {
    const mcim::mechanism mech{{{0.9, 0.9}, {0.5, 0.5}}};
    const double c1 =
        mcim::mar_stratum_rr_limit(worked_point(), 0.05, 2.0, mech, 1);
    const double c0 =
        mcim::mar_stratum_rr_limit(worked_point(), 0.05, 2.0, mech, 0);
    REQUIRE(c1 == 2.0975609756097557);
    REQUIRE(c0 == 2.0465116279069768);
    REQUIRE(std::fabs(c1 / 2.0 - 1.0) > 0.01);
}

TEST_CASE("mechanism edge cases are rejected") {
    const mcim::mechanism dead{{{0.0, 0.9}, {0.9, 0.9}}};
    REQUIRE_THROWS_AS(
        mcim::mar_stratum_rr_limit(worked_point(), 0.05, 2.0, dead, 1),
        mcim::degenerate_mechanism);
    REQUIRE_THROWS_AS(mcim::mar_stratum_rr_limit(worked_point(), 0.05, 2.0,
                                                 mcim::mechanism::mcar(0.25),
                                                 2),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::rr_miss_limit(worked_point(), 0.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::mechanism::mcar(1.5), std::invalid_argument);
}
