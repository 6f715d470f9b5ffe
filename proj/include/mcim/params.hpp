#pragma once

#include <cmath>
#include <stdexcept>

#include "mcim/errors.hpp"

namespace mcim {

// Tolerance for probability-identity checks. Conditionals within this
// distance of 0 or 1 are treated as degenerate boundary cases.
inline constexpr double probability_tolerance = 1e-12;

// The five parameters that determine the bias of the missing covariate
// indicator estimate:
//   p_e    prevalence of exposure, Pr(E=1)
//   p_c    prevalence of the covariate, Pr(C=1)
//   p_miss proportion of subjects with the covariate missing
//   rr_c   relative risk of outcome per unit of the covariate, RR(C)
//   rr_ec  exposure-covariate association, RR(E|C)
struct parameter_point {
    double p_e;
    double p_c;
    double p_miss;
    double rr_c;
    double rr_ec;
};

// The conditional probabilities implied by (p_e, p_c, rr_ec). All four lie in
// [0, 1] for every point that passes validation, and they reconstruct the
// marginals: p_e_given_c1*p_c + p_e_given_c0*(1-p_c) = p_e and
// p_c_given_e1*p_e + p_c_given_e0*(1-p_e) = p_c.
struct derived_conditionals {
    double p_e_given_c1;
    double p_e_given_c0;
    double p_c_given_e1;
    double p_c_given_e0;
};

// Joint law Pr(C=c, E=e, Y=y) of the three binary variables under the
// multiplicative risk model Pr(Y=1|E=e,C=c) = baseline * rr_e^e * rr_c^c.
struct joint_distribution {
    double pr[2][2][2];  // indexed [c][e][y]

    double operator()(int c, int e, int y) const { return pr[c][e][y]; }

    // Marginal probability of the covariate being 1.
    double marginal_c() const {
        return pr[1][0][0] + pr[1][0][1] + pr[1][1][0] + pr[1][1][1];
    }

    // Marginal probability of exposure.
    double marginal_e() const {
        return pr[0][1][0] + pr[0][1][1] + pr[1][1][0] + pr[1][1][1];
    }
};

namespace detail {

inline bool in_open_unit(double v) {
    return v > probability_tolerance && v < 1.0 - probability_tolerance;
}

// Throws std::invalid_argument when a field violates its own range; the
// cross-field validity question is separate (see derive_conditionals).
inline void require_fields(const parameter_point& p) {
    const bool ok = std::isfinite(p.p_e) && p.p_e > 0.0 && p.p_e < 1.0 &&
                    std::isfinite(p.p_c) && p.p_c > 0.0 && p.p_c < 1.0 &&
                    std::isfinite(p.p_miss) && p.p_miss >= 0.0 &&
                    p.p_miss < 1.0 && std::isfinite(p.rr_c) && p.rr_c > 0.0 &&
                    std::isfinite(p.rr_ec) && p.rr_ec > 0.0;
    if (!ok) {
        throw std::invalid_argument(
            "parameter_point fields out of range: need 0 < p_e < 1, "
            "0 < p_c < 1, 0 <= p_miss < 1, rr_c > 0, rr_ec > 0");
    }
}

// Risk of outcome in cell (e, c). Values within rounding noise of 1 are
// clamped; anything meaningfully above 1 is a model violation.
inline double cell_risk(double baseline_risk, double rr_e, double rr_c, int e,
                        int c) {
    double risk = baseline_risk;
    if (e != 0) risk *= rr_e;
    if (c != 0) risk *= rr_c;
    if (risk > 1.0 + probability_tolerance) {
        throw risk_out_of_range(risk, e, c);
    }
    return risk < 1.0 ? risk : 1.0;
}

}  // namespace detail

// Computes the four conditionals from the closed forms
//   Pr(E=1|C=0) = p_e / (rr_ec*p_c + 1 - p_c)
//   Pr(E=1|C=1) = rr_ec * Pr(E=1|C=0)
//   Pr(C=1|E=1) = rr_ec*p_c / (rr_ec*p_c + 1 - p_c)
//   Pr(C=1|E=0) = (p_c - Pr(C=1|E=1)*p_e) / (1 - p_e)
// and rejects combinations whose Pr(E=1|C=0), Pr(E=1|C=1) or Pr(C=1|E=0)
// does not lie strictly inside (0, 1). Pr(C=1|E=1) is a ratio of
// nonnegative terms bounded by its denominator and can never leave [0, 1].
// The expression grouping here is load-bearing: downstream outputs are
// reproducible bit for bit and tests pin exact values.
inline derived_conditionals derive_conditionals(const parameter_point& p) {
    detail::require_fields(p);
    const double den = p.rr_ec * p.p_c + 1.0 - p.p_c;
    const double pe_c0 = p.p_e / den;
    const double pe_c1 = p.rr_ec * p.p_e / den;
    const double pc_e1 = p.rr_ec * p.p_c / den;
    const double pc_e0 = (p.p_c - pc_e1 * p.p_e) / (1.0 - p.p_e);
    if (!detail::in_open_unit(pe_c0) || !detail::in_open_unit(pe_c1) ||
        !detail::in_open_unit(pc_e0)) {
        throw invalid_combination(pe_c0, pe_c1, pc_e1, pc_e0);
    }
    return {pe_c1, pe_c0, pc_e1, pc_e0};
}

// True iff derive_conditionals succeeds. Depends only on (p_e, p_c, rr_ec);
// p_miss and rr_c never affect validity.
inline bool is_valid(const parameter_point& p) {
    detail::require_fields(p);
    const double den = p.rr_ec * p.p_c + 1.0 - p.p_c;
    const double pe_c0 = p.p_e / den;
    const double pe_c1 = p.rr_ec * p.p_e / den;
    const double pc_e1 = p.rr_ec * p.p_c / den;
    const double pc_e0 = (p.p_c - pc_e1 * p.p_e) / (1.0 - p.p_e);
    return detail::in_open_unit(pe_c0) && detail::in_open_unit(pe_c1) &&
           detail::in_open_unit(pc_e0);
}

// Joint law of (C, E, Y) for a valid point: Pr(C) from p_c, Pr(E|C) from the
// derived conditionals, Pr(Y|E,C) from the multiplicative risk model. The
// eight probabilities sum to 1 up to rounding.
inline joint_distribution derive_joint(const parameter_point& p,
                                       double baseline_risk, double rr_e) {
    const derived_conditionals k = derive_conditionals(p);
    const double pr_c[2] = {1.0 - p.p_c, p.p_c};
    const double pr_e_given_c[2] = {k.p_e_given_c0, k.p_e_given_c1};
    joint_distribution j{};
    for (int c = 0; c < 2; ++c) {
        for (int e = 0; e < 2; ++e) {
            const double risk =
                detail::cell_risk(baseline_risk, rr_e, p.rr_c, e, c);
            const double pr_ce =
                pr_c[c] * (e != 0 ? pr_e_given_c[c] : 1.0 - pr_e_given_c[c]);
            j.pr[c][e][1] = pr_ce * risk;
            j.pr[c][e][0] = pr_ce * (1.0 - risk);
        }
    }
    return j;
}

}  // namespace mcim
