#pragma once

#include <string>

#include "mcim/tables.hpp"

namespace mcim {

// Outcome of a table-based estimate. A degenerate result flags a table whose
// ratio is undefined (or zero) rather than throwing: finite samples produce
// such tables routinely and callers decide whether that is fatal.
// value is meaningful, and positive, only when degenerate is false.
struct estimate_result {
    double value = 0.0;
    std::string estimator_name;
    bool degenerate = false;
    std::string reason;

    static estimate_result ok(double v, std::string name) {
        return {v, std::move(name), false, {}};
    }

    static estimate_result bad(std::string name, std::string why) {
        return {0.0, std::move(name), true, std::move(why)};
    }
};

// Risk ratio (a/(a+c)) / (b/(b+d)) within one stratum.
inline estimate_result stratum_rr(const two_by_two& t) {
    static const std::string name = "stratum_rr";
    if (t.a + t.c == 0.0) return estimate_result::bad(name, "no exposed");
    if (t.b + t.d == 0.0) return estimate_result::bad(name, "no unexposed");
    if (t.b == 0.0) {
        return estimate_result::bad(name, "zero risk among unexposed");
    }
    if (t.a == 0.0) {
        return estimate_result::bad(name, "zero risk among exposed");
    }
    return estimate_result::ok((t.a / (t.a + t.c)) / (t.b / (t.b + t.d)),
                               name);
}

// Odds ratio (a*d) / (b*c); approximates the risk ratio when the outcome is
// rare in both exposure groups.
inline estimate_result stratum_or(const two_by_two& t) {
    static const std::string name = "stratum_or";
    if (t.b * t.c == 0.0) {
        return estimate_result::bad(name, "zero cell in denominator");
    }
    if (t.a * t.d == 0.0) {
        return estimate_result::bad(name, "zero cell in numerator");
    }
    return estimate_result::ok((t.a * t.d) / (t.b * t.c), name);
}

namespace detail {

// Mantel-Haenszel risk-ratio pool over any number of strata. Empty strata
// contribute nothing; under a homogeneous risk model on expected tables the
// pooled value equals the common stratum RR exactly.
template <typename Iter>
inline estimate_result mh_rr(Iter first, Iter last, const std::string& name) {
    double num = 0.0;
    double den = 0.0;
    bool any = false;
    for (Iter it = first; it != last; ++it) {
        const two_by_two& t = *it;
        const double n = t.total();
        if (n == 0.0) continue;
        any = true;
        num += t.a * (t.b + t.d) / n;
        den += t.b * (t.a + t.c) / n;
    }
    if (!any) return estimate_result::bad(name, "all strata empty");
    if (den == 0.0) return estimate_result::bad(name, "zero pooled divisor");
    if (num == 0.0) return estimate_result::bad(name, "zero pooled numerator");
    return estimate_result::ok(num / den, name);
}

}  // namespace detail

// Mantel-Haenszel risk ratio over the two complete-data strata.
inline estimate_result pooled_complete_rr(const stratified_tables& s) {
    const two_by_two strata[2] = {s.c1, s.c0};
    return detail::mh_rr(strata, strata + 2, "pooled_complete_rr");
}

// Mantel-Haenszel risk ratio over all three strata, treating the missing
// stratum as just another stratum. Reported for comparison only; the
// missing-indicator summary below is the quantity with a closed-form limit.
inline estimate_result mh_rr_all_strata(const stratified_tables& s) {
    const two_by_two strata[3] = {s.c1, s.c0, s.miss};
    return detail::mh_rr(strata, strata + 3, "mh_rr_all_strata");
}

// Crude risk ratio of the complete data: the two complete strata collapsed
// into one table. Confounded whenever the covariate is associated with both
// exposure and outcome.
inline estimate_result crude_rr_complete(const stratified_tables& s) {
    estimate_result r = stratum_rr(s.c1 + s.c0);
    r.estimator_name = "crude_rr_complete";
    return r;
}

// Missing covariate indicator summary: the person-weighted average of the
// pooled complete-data RR and the missing stratum's crude RR, with weight
// equal to the missing share. With no missing data it reduces to the pooled
// complete-data RR.
inline estimate_result mcim_rr(const stratified_tables& s) {
    static const std::string name = "mcim_rr";
    const double grand = s.grand_total();
    if (grand == 0.0) return estimate_result::bad(name, "empty tables");
    estimate_result pooled = pooled_complete_rr(s);
    if (pooled.degenerate) {
        return estimate_result::bad(name, "complete strata: " + pooled.reason);
    }
    const double miss_total = s.miss.total();
    if (miss_total == 0.0) return estimate_result::ok(pooled.value, name);
    estimate_result miss = stratum_rr(s.miss);
    if (miss.degenerate) {
        return estimate_result::bad(name, "missing stratum: " + miss.reason);
    }
    const double w = miss_total / grand;
    return estimate_result::ok((1.0 - w) * pooled.value + w * miss.value,
                               name);
}

}  // namespace mcim
