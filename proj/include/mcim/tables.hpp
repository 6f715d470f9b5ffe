#pragma once

namespace mcim {

// One 2x2 outcome-by-exposure table. Cells may hold counts or expected
// proportions; estimators only use ratios, so the two read identically.
//   a: Y=1, E=1    b: Y=1, E=0
//   c: Y=0, E=1    d: Y=0, E=0
struct two_by_two {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    double total() const { return a + b + c + d; }

    two_by_two& operator+=(const two_by_two& o) {
        a += o.a;
        b += o.b;
        c += o.c;
        d += o.d;
        return *this;
    }

    friend two_by_two operator+(two_by_two lhs, const two_by_two& rhs) {
        lhs += rhs;
        return lhs;
    }
};

enum class table_kind { counts, expected_proportions };

// The three analysis strata: covariate present (C=1), covariate absent
// (C=0), and covariate missing. For counts the twelve cells sum to the
// generating sample size; for expected proportions they sum to 1.
struct stratified_tables {
    two_by_two c1;
    two_by_two c0;
    two_by_two miss;
    table_kind kind = table_kind::counts;

    double grand_total() const {
        return c1.total() + c0.total() + miss.total();
    }
};

// Adds a constant to every cell (the classical continuity correction).
// Useful for finite-sample experiments with sparse tables; never applied
// implicitly, since it would perturb asymptotic comparisons.
inline two_by_two with_continuity(const two_by_two& t, double add = 0.5) {
    return {t.a + add, t.b + add, t.c + add, t.d + add};
}

inline stratified_tables with_continuity(const stratified_tables& s,
                                         double add = 0.5) {
    return {with_continuity(s.c1, add), with_continuity(s.c0, add),
            with_continuity(s.miss, add), s.kind};
}

}  // namespace mcim
