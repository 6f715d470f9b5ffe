#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace mcim {

// A parameter combination whose implied conditional probabilities fall on or
// outside the unit-interval boundary. Carries the computed conditionals so
// callers can report which ones are offending.
class invalid_combination : public std::runtime_error {
public:
    invalid_combination(double p_e_given_c0, double p_e_given_c1,
                        double p_c_given_e1, double p_c_given_e0)
        : std::runtime_error(build_message(p_e_given_c0, p_e_given_c1,
                                           p_c_given_e1, p_c_given_e0)),
          p_e_given_c0_(p_e_given_c0),
          p_e_given_c1_(p_e_given_c1),
          p_c_given_e1_(p_c_given_e1),
          p_c_given_e0_(p_c_given_e0) {}

    double p_e_given_c0() const noexcept { return p_e_given_c0_; }
    double p_e_given_c1() const noexcept { return p_e_given_c1_; }
    double p_c_given_e1() const noexcept { return p_c_given_e1_; }
    double p_c_given_e0() const noexcept { return p_c_given_e0_; }

private:
    static std::string build_message(double pe_c0, double pe_c1,
                                     double pc_e1, double pc_e0) {
        std::ostringstream os;
        os << "invalid parameter combination: conditional probabilities must "
              "lie strictly inside (0, 1); got Pr(E=1|C=0)=" << pe_c0
           << ", Pr(E=1|C=1)=" << pe_c1 << ", Pr(C=1|E=1)=" << pc_e1
           << ", Pr(C=1|E=0)=" << pc_e0;
        return os.str();
    }

    double p_e_given_c0_;
    double p_e_given_c1_;
    double p_c_given_e1_;
    double p_c_given_e0_;
};

// A risk-model cell probability Pr(Y=1|E=e,C=c) above 1.
class risk_out_of_range : public std::runtime_error {
public:
    risk_out_of_range(double risk, int e, int c)
        : std::runtime_error(build_message(risk, e, c)), risk_(risk) {}

    double risk() const noexcept { return risk_; }

private:
    static std::string build_message(double risk, int e, int c) {
        std::ostringstream os;
        os << "cell risk out of range: Pr(Y=1|E=" << e << ",C=" << c
           << ") = " << risk << " exceeds 1";
        return os.str();
    }

    double risk_;
};

// A missingness mechanism with a zero observation probability: the affected
// complete-data cells vanish asymptotically, so stratum estimates within the
// complete data are undefined.
class degenerate_mechanism : public std::runtime_error {
public:
    degenerate_mechanism(int y, int e)
        : std::runtime_error(build_message(y, e)) {}

private:
    static std::string build_message(int y, int e) {
        std::ostringstream os;
        os << "degenerate mechanism: f_obs(y=" << y << ", e=" << e
           << ") is 0, so that cell never appears in the complete data";
        return os.str();
    }
};

// An aggregation was asked for on an empty input.
class empty_input : public std::runtime_error {
public:
    explicit empty_input(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

}  // namespace mcim
