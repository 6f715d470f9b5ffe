#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcim/analytic.hpp"
#include "mcim/estimators.hpp"
#include "mcim/params.hpp"
#include "mcim/tables.hpp"

namespace mcim {

// A complete simulation scenario: data-generating parameters, the risk
// model, the missingness mechanism, the sample size and the base seed.
struct sim_config {
    parameter_point point;
    double baseline_risk = 0.05;
    double rr_e = 2.0;
    mechanism mech = mechanism::mcar(0.0);
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
};

namespace detail {

// Replicate seeds are derived from the base seed with a splitmix64-style
// mixer so each replicate is reproducible in isolation. The generator is
// std::mt19937_64; uniforms take the top 53 bits so every value lies in
// [0, 1) with full double resolution.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Asymptotic (infinite-sample) stratified tables as expected proportions:
// each complete-stratum cell is the joint probability of its (c, e, y)
// configuration times the observation probability f_obs(y, e); each
// missing-stratum cell is the covariate-marginalized joint probability times
// 1 - f_obs(y, e). The twelve cells sum to 1.
inline stratified_tables expected_tables(const parameter_point& p,
                                         double baseline_risk, double rr_e,
                                         const mechanism& mech) {
    const joint_distribution j = derive_joint(p, baseline_risk, rr_e);
    stratified_tables s;
    s.kind = table_kind::expected_proportions;
    two_by_two* complete[2] = {&s.c0, &s.c1};
    for (int c = 0; c < 2; ++c) {
        complete[c]->a = j(c, 1, 1) * mech(1, 1);
        complete[c]->b = j(c, 0, 1) * mech(1, 0);
        complete[c]->c = j(c, 1, 0) * mech(0, 1);
        complete[c]->d = j(c, 0, 0) * mech(0, 0);
    }
    s.miss.a = (j(0, 1, 1) + j(1, 1, 1)) * (1.0 - mech(1, 1));
    s.miss.b = (j(0, 0, 1) + j(1, 0, 1)) * (1.0 - mech(1, 0));
    s.miss.c = (j(0, 1, 0) + j(1, 1, 0)) * (1.0 - mech(0, 1));
    s.miss.d = (j(0, 0, 0) + j(1, 0, 0)) * (1.0 - mech(0, 0));
    return s;
}

// Draws n independent subjects (covariate, then exposure given covariate,
// then outcome given both, then the observation indicator given outcome and
// exposure) and tallies them into the three strata. Deterministic given the
// seed.
inline stratified_tables simulate(const sim_config& cfg) {
    if (cfg.n < 1) {
        throw std::invalid_argument("simulate: n must be at least 1");
    }
    const derived_conditionals k = derive_conditionals(cfg.point);
    const double pr_e_given_c[2] = {k.p_e_given_c0, k.p_e_given_c1};
    double risk[2][2];  // indexed [c][e]
    for (int c = 0; c < 2; ++c) {
        for (int e = 0; e < 2; ++e) {
            risk[c][e] =
                detail::cell_risk(cfg.baseline_risk, cfg.rr_e,
                                  cfg.point.rr_c, e, c);
        }
    }
    std::mt19937_64 gen(cfg.seed);
    stratified_tables s;
    s.kind = table_kind::counts;
    two_by_two* complete[2] = {&s.c0, &s.c1};
    for (std::uint64_t i = 0; i < cfg.n; ++i) {
        const int c = detail::uniform01(gen) < cfg.point.p_c ? 1 : 0;
        const int e = detail::uniform01(gen) < pr_e_given_c[c] ? 1 : 0;
        const int y = detail::uniform01(gen) < risk[c][e] ? 1 : 0;
        const bool observed = detail::uniform01(gen) < cfg.mech(y, e);
        two_by_two& t = observed ? *complete[c] : s.miss;
        if (y == 1) {
            (e == 1 ? t.a : t.b) += 1.0;
        } else {
            (e == 1 ? t.c : t.d) += 1.0;
        }
    }
    return s;
}

// One replicate's missing-indicator estimate and its percent deviation from
// the true rr_e. Degenerate replicates carry the reason instead of a value.
struct replicate_result {
    std::uint64_t rep = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double bias_percent = 0.0;
    bool degenerate = false;
    std::string reason;
};

// All replicates plus the mean and standard error of the non-degenerate
// bias values. mean and standard_error are NaN when nothing succeeded.
struct replicate_summary {
    std::vector<replicate_result> replicates;
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t degenerate_count = 0;
};

// Runs reps independent simulations. Replicate r uses seed
// mix_seed(cfg.seed, r), so any single replicate can be reproduced without
// running the ones before it.
inline replicate_summary replicate_bias(const sim_config& cfg,
                                        std::uint64_t reps) {
    if (reps < 1) {
        throw std::invalid_argument("replicate_bias: reps must be at least 1");
    }
    replicate_summary out;
    out.replicates.reserve(reps);
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t ok = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        sim_config rep_cfg = cfg;
        rep_cfg.seed = detail::mix_seed(cfg.seed, r);
        const stratified_tables tables = simulate(rep_cfg);
        const estimate_result est = mcim_rr(tables);
        replicate_result res;
        res.rep = r;
        res.seed = rep_cfg.seed;
        if (est.degenerate) {
            res.degenerate = true;
            res.reason = est.reason;
            ++out.degenerate_count;
        } else {
            res.estimate = est.value;
            res.bias_percent = (est.value - cfg.rr_e) / cfg.rr_e * 100.0;
            sum += res.bias_percent;
            sumsq += res.bias_percent * res.bias_percent;
            ++ok;
        }
        out.replicates.push_back(std::move(res));
    }
    if (ok == 0) {
        out.mean = std::nan("");
        out.standard_error = std::nan("");
    } else {
        out.mean = sum / static_cast<double>(ok);
        if (ok == 1) {
            out.standard_error = std::nan("");
        } else {
            const double var =
                (sumsq - sum * sum / static_cast<double>(ok)) /
                static_cast<double>(ok - 1);
            out.standard_error =
                std::sqrt(var < 0.0 ? 0.0 : var) /
                std::sqrt(static_cast<double>(ok));
        }
    }
    return out;
}

}  // namespace mcim
