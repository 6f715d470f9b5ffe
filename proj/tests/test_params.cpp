#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "mcim/mcim.hpp"

using Catch::Matchers::WithinAbs;

namespace {

mcim::parameter_point worked_point() {
    return {0.1, 0.25, 0.25, 2.0, 2.0};
}

}  // namespace

TEST_CASE("derived conditionals match the pinned values") {
    const mcim::derived_conditionals k =
        mcim::derive_conditionals(worked_point());
    // Exact doubles: the computation order is part of the contract.
    REQUIRE(k.p_e_given_c0 == 0.080000000000000002);
    REQUIRE(k.p_e_given_c1 == 0.16);
    REQUIRE(k.p_c_given_e1 == 0.40000000000000002);
    REQUIRE(k.p_c_given_e0 == 0.23333333333333331);
}

TEST_CASE("conditionals reconstruct the marginals") {
    const double pes[] = {0.01, 0.1, 0.5, 0.75};
    const double pcs[] = {0.05, 0.25, 0.75};
    const double rrecs[] = {0.2, 1.0, 1.15, 3.0};
    for (const double pe : pes) {
        for (const double pc : pcs) {
            for (const double re : rrecs) {
                const mcim::parameter_point p{pe, pc, 0.1, 2.0, re};
                if (!mcim::is_valid(p)) continue;
                const mcim::derived_conditionals k =
                    mcim::derive_conditionals(p);
                REQUIRE_THAT(k.p_e_given_c1 * pc + k.p_e_given_c0 * (1.0 - pc),
                             WithinAbs(pe, 1e-12));
                REQUIRE_THAT(k.p_c_given_e1 * pe + k.p_c_given_e0 * (1.0 - pe),
                             WithinAbs(pc, 1e-12));
            }
        }
    }
}

TEST_CASE("a null exposure-covariate association collapses the conditionals") {
    const mcim::parameter_point p{0.1, 0.25, 0.25, 2.0, 1.0};
    const mcim::derived_conditionals k = mcim::derive_conditionals(p);
    REQUIRE(k.p_e_given_c0 == 0.1);
    REQUIRE(k.p_e_given_c1 == 0.1);
    REQUIRE(k.p_c_given_e1 == 0.25);
    REQUIRE(k.p_c_given_e0 == 0.25);
}

TEST_CASE("invalid combinations throw and carry the offending values") {
    // High prevalences with a protective association push Pr(E=1|C=0) and
    // Pr(C=1|E=0) to or past 1.
    const mcim::parameter_point half{0.75, 0.5, 0.1, 2.0, 0.5};
    REQUIRE_THROWS_AS(mcim::derive_conditionals(half),
                      mcim::invalid_combination);
    try {
        mcim::derive_conditionals(half);
    } catch (const mcim::invalid_combination& e) {
        REQUIRE(e.p_e_given_c0() == 1.0);
        REQUIRE(e.p_e_given_c1() == 0.5);
        REQUIRE(e.p_c_given_e1() == 0.33333333333333331);
        REQUIRE(e.p_c_given_e0() == 1.0);
    }

    const mcim::parameter_point fifth{0.75, 0.5, 0.1, 2.0, 0.2};
    try {
        mcim::derive_conditionals(fifth);
        FAIL("expected invalid_combination");
    } catch (const mcim::invalid_combination& e) {
        REQUIRE(e.p_e_given_c0() == 1.2499999999999998);
        REQUIRE(e.p_e_given_c1() == 0.25);
        REQUIRE(e.p_c_given_e1() == 0.16666666666666666);
        REQUIRE(e.p_c_given_e0() == 1.5);
    }
}

TEST_CASE("validity depends only on the two prevalences and the association") {
    REQUIRE_FALSE(mcim::is_valid({0.75, 0.5, 0.1, 2.0, 0.5}));
    REQUIRE_FALSE(mcim::is_valid({0.75, 0.5, 0.1, 2.0, 0.2}));
    REQUIRE(mcim::is_valid({0.1, 0.25, 0.25, 2.0, 2.0}));
    // p_miss and rr_c never flip the verdict.
    for (const double pm : {0.0, 0.25, 0.99}) {
        for (const double rc : {0.2, 1.0, 5.0}) {
            REQUIRE_FALSE(mcim::is_valid({0.75, 0.5, pm, rc, 0.5}));
            REQUIRE(mcim::is_valid({0.1, 0.25, pm, rc, 2.0}));
        }
    }
}

TEST_CASE("the default grid has 38 invalid prevalence-association triples") {
    const mcim::grid_spec grid = mcim::default_grid();
    std::size_t invalid = 0;
    for (const mcim::grid_value& pe : grid.p_e) {
        for (const mcim::grid_value& pc : grid.p_c) {
            for (const mcim::grid_value& re : grid.rr_ec) {
                if (!mcim::is_valid({pe.value, pc.value, 0.0, 1.0, re.value})) {
                    ++invalid;
                }
            }
        }
    }
    REQUIRE(invalid == 38);
}

TEST_CASE("out-of-range fields are rejected before any derivation") {
    REQUIRE_THROWS_AS(mcim::derive_conditionals({0.0, 0.25, 0.1, 2.0, 2.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::derive_conditionals({0.1, 1.0, 0.1, 2.0, 2.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::derive_conditionals({0.1, 0.25, 1.0, 2.0, 2.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::derive_conditionals({0.1, 0.25, -0.1, 2.0, 2.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::derive_conditionals({0.1, 0.25, 0.1, 0.0, 2.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(mcim::derive_conditionals({0.1, 0.25, 0.1, 2.0, -2.0}),
                      std::invalid_argument);
    const double nan = std::nan("");
    REQUIRE_THROWS_AS(mcim::derive_conditionals({nan, 0.25, 0.1, 2.0, 2.0}),
                      std::invalid_argument);
}

TEST_CASE("the joint distribution is a probability law with the right margins") {
    const mcim::joint_distribution j =
        mcim::derive_joint(worked_point(), 0.05, 2.0);
    double sum = 0.0;
    for (int c = 0; c < 2; ++c) {
        for (int e = 0; e < 2; ++e) {
            for (int y = 0; y < 2; ++y) {
                REQUIRE(j(c, e, y) >= 0.0);
                sum += j(c, e, y);
            }
        }
    }
    REQUIRE_THAT(sum, WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(j.marginal_c(), WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(j.marginal_e(), WithinAbs(0.1, 1e-12));
}

TEST_CASE("the joint distribution encodes the multiplicative risk model") {
    const mcim::joint_distribution j =
        mcim::derive_joint(worked_point(), 0.05, 2.0);
    // Pr(Y=1|E=1,C=1) = 0.05 * 2 * 2.
    const double risk11 = j(1, 1, 1) / (j(1, 1, 1) + j(1, 1, 0));
    REQUIRE_THAT(risk11, WithinAbs(0.2, 1e-15));
    const double risk00 = j(0, 0, 1) / (j(0, 0, 1) + j(0, 0, 0));
    REQUIRE_THAT(risk00, WithinAbs(0.05, 1e-15));
}

TEST_CASE("cell risks above 1 are rejected, exactly 1 is allowed") {
    REQUIRE_THROWS_AS(mcim::derive_joint(worked_point(), 0.3, 2.0),
                      mcim::risk_out_of_range);
    try {
        mcim::derive_joint(worked_point(), 0.3, 2.0);
    } catch (const mcim::risk_out_of_range& e) {
        REQUIRE_THAT(e.risk(), WithinAbs(1.2, 1e-12));
    }
    // 0.1 * 2 * 5 rounds to exactly 1, so the doubly exposed cell is certain
    // to have the outcome and the model is still admissible.
    const mcim::parameter_point p{0.1, 0.25, 0.25, 5.0, 2.0};
    const mcim::joint_distribution j = mcim::derive_joint(p, 0.1, 2.0);
    REQUIRE(j(1, 1, 0) == 0.0);
    REQUIRE(j(1, 1, 1) > 0.0);
}
