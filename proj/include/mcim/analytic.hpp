#pragma once

#include <cmath>
#include <stdexcept>

#include "mcim/errors.hpp"
#include "mcim/params.hpp"

namespace mcim {

// Missingness mechanism parameterized by the probability that the covariate
// is OBSERVED in each (Y, E) cell. The complement 1 - f_obs(y, e) is the
// per-cell missingness probability.
struct mechanism {
    double f_obs[2][2];  // indexed [y][e]

    double operator()(int y, int e) const { return f_obs[y][e]; }

    // Missing completely at random: a constant observation probability.
    static mechanism mcar(double p_miss) {
        if (!(p_miss >= 0.0 && p_miss <= 1.0)) {
            throw std::invalid_argument("mcar: p_miss must lie in [0, 1]");
        }
        const double f = 1.0 - p_miss;
        return {{{f, f}, {f, f}}};
    }
};

// Relative bias of the missing-indicator summary estimate, as a percentage
// of the true exposure effect, together with the ratio of the missing
// stratum's limiting crude RR to the true RR. The two fields satisfy
// p_bias_percent = p_miss * (rr_miss_over_rr_e - 1) * 100 up to rounding.
struct bias_result {
    double p_bias_percent;
    double rr_miss_over_rr_e;
};

// Evaluates the closed form
//
//            p_c (1-p_c) (rr_c - 1)(rr_ec - 1)
//   B = -------------------------------------------------
//       (1-p_e)(1 - p_c + p_c rr_c rr_ec) - [numerator]
//
//   p_bias_percent = p_miss * B * 100
//
// directly in the five parameters; no outcome rate or exposure effect is
// involved. The expression grouping is load-bearing: records whose bias sits
// exactly on a reporting threshold must land on the same side across builds,
// and tests pin exact values (the build disables FP contraction).
inline bias_result bias_percent(const parameter_point& p) {
    derive_conditionals(p);  // validity gate; throws invalid_combination
    const double num =
        (p.p_c * (1.0 - p.p_c)) * ((p.rr_c - 1.0) * (p.rr_ec - 1.0));
    const double den =
        (1.0 - p.p_e) * (1.0 - p.p_c + p.p_c * p.rr_c * p.rr_ec) - num;
    const double ratio_minus_one = num / den;
    return {p.p_miss * ratio_minus_one * 100.0, 1.0 + ratio_minus_one};
}

// Same quantity via the conditional-probability route:
//
//        (rr_c - 1)(Pr(C=1|E=1) - Pr(C=1|E=0))
//   B = ---------------------------------------
//          rr_c Pr(C=1|E=0) + 1 - Pr(C=1|E=0)
//
// Agrees with bias_percent to 1e-10 over the whole default grid; kept as an
// independent cross-check of the algebra.
inline bias_result bias_percent_stratum_route(const parameter_point& p) {
    const derived_conditionals k = derive_conditionals(p);
    const double num = (p.rr_c - 1.0) * (k.p_c_given_e1 - k.p_c_given_e0);
    const double den = p.rr_c * k.p_c_given_e0 + 1.0 - k.p_c_given_e0;
    const double ratio_minus_one = num / den;
    return {p.p_miss * ratio_minus_one * 100.0, 1.0 + ratio_minus_one};
}

// Limiting value of the crude RR computed within the missing-covariate
// stratum:
//
//   rr_e * (rr_c Pr(C=1|E=1) + 1 - Pr(C=1|E=1))
//        / (rr_c Pr(C=1|E=0) + 1 - Pr(C=1|E=0))
inline double rr_miss_limit(const parameter_point& p, double rr_e) {
    if (!(rr_e > 0.0) || !std::isfinite(rr_e)) {
        throw std::invalid_argument("rr_miss_limit: rr_e must be positive");
    }
    const derived_conditionals k = derive_conditionals(p);
    const double t1 = p.rr_c * k.p_c_given_e1 + 1.0 - k.p_c_given_e1;
    const double t0 = p.rr_c * k.p_c_given_e0 + 1.0 - k.p_c_given_e0;
    return rr_e * (t1 / t0);
}

// Limiting value of the missing-indicator summary estimate: the
// person-weighted average of the true RR (complete strata) and the missing
// stratum's limiting crude RR. Satisfies
// (rr_e_limit - rr_e) / rr_e * 100 = bias_percent up to 1e-10.
inline double rr_e_limit(const parameter_point& p, double rr_e) {
    return (1.0 - p.p_miss) * rr_e + p.p_miss * rr_miss_limit(p, rr_e);
}

// True iff missingness is independent of the outcome given exposure:
// f_obs(1,0) = f_obs(0,0) and f_obs(1,1) = f_obs(0,1) within tolerance.
// Under this condition the complete-stratum RRs converge to the true RR.
inline bool mar_condition_holds(const mechanism& mech) {
    return std::fabs(mech.f_obs[1][0] - mech.f_obs[0][0]) <=
               probability_tolerance &&
           std::fabs(mech.f_obs[1][1] - mech.f_obs[0][1]) <=
               probability_tolerance;
}

// Limiting value of the observed RR within complete-data stratum C = c under
// an arbitrary (Y, E)-dependent mechanism:
//
//   rr_e * (f11/f10) * [Pr(Y=1|E=0,C=c)(f10 - f00) + f00]
//                    / [Pr(Y=1|E=1,C=c)(f11 - f01) + f01]
//
// where fye = f_obs(y, e). Every observation probability must be positive;
// a zero entry empties the corresponding complete-data cells in the limit.
inline double mar_stratum_rr_limit(const parameter_point& p,
                                   double baseline_risk, double rr_e,
                                   const mechanism& mech, int stratum_c) {
    if (stratum_c != 0 && stratum_c != 1) {
        throw std::invalid_argument(
            "mar_stratum_rr_limit: stratum_c must be 0 or 1");
    }
    if (!(rr_e > 0.0) || !std::isfinite(rr_e)) {
        throw std::invalid_argument(
            "mar_stratum_rr_limit: rr_e must be positive");
    }
    for (int y = 0; y < 2; ++y) {
        for (int e = 0; e < 2; ++e) {
            if (mech.f_obs[y][e] == 0.0) {
                throw degenerate_mechanism(y, e);
            }
        }
    }
    derive_conditionals(p);  // validity gate
    const double r1 =
        detail::cell_risk(baseline_risk, rr_e, p.rr_c, 1, stratum_c);
    const double r0 =
        detail::cell_risk(baseline_risk, rr_e, p.rr_c, 0, stratum_c);
    const double f11 = mech.f_obs[1][1];
    const double f10 = mech.f_obs[1][0];
    const double f01 = mech.f_obs[0][1];
    const double f00 = mech.f_obs[0][0];
    const double num = r0 * (f10 - f00) + f00;
    const double den = r1 * (f11 - f01) + f01;
    return rr_e * (f11 / f10) * (num / den);
}

}  // namespace mcim
