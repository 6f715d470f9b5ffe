#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcim/analytic.hpp"
#include "mcim/errors.hpp"
#include "mcim/params.hpp"

namespace mcim {

inline constexpr const char* tool_version = "mcim 1.0.0";

// How the tail columns count a record against the 5 and 10 thresholds:
// by its signed bias or by its magnitude. Comparison is strict (>), with no
// epsilon, so records sitting exactly on a threshold do not count.
enum class threshold_mode { signed_value, absolute_value };

// Quantile conventions: linear interpolation between order statistics (the
// common spreadsheet/statistics-package default) or the nearest-rank rule.
enum class quantile_convention { interpolated, nearest_rank };

enum class summary_format { csv, markdown };

// One admissible value of one parameter, with the label used in reports
// (reciprocal relative risks keep their fraction spelling, e.g. "1/1.15").
struct grid_value {
    double value = 0.0;
    std::string label;
};

// Ordered value lists for the five parameters.
struct grid_spec {
    std::vector<grid_value> p_miss;
    std::vector<grid_value> p_e;
    std::vector<grid_value> p_c;
    std::vector<grid_value> rr_c;
    std::vector<grid_value> rr_ec;

    std::size_t raw_size() const {
        return p_miss.size() * p_e.size() * p_c.size() * rr_c.size() *
               rr_ec.size();
    }
};

// One evaluated grid combination.
struct sweep_record {
    parameter_point point;
    double p_bias_percent = 0.0;
};

// One summary line: the whole sweep ("Overall") or the slice of records
// sharing one parameter value.
struct summary_row {
    std::string parameter;
    std::string value_label;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double pct_gt_10 = 0.0;
    double pct_gt_5 = 0.0;
    std::size_t n_records = 0;
};

namespace detail {

inline std::string format_double(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Fixed two decimals; negative zero is normalized so rounding never prints
// a sign on a zero.
inline std::string format_2dp(double v) {
    std::string s = format_double("%.2f", v);
    return s == "-0.00" ? "0.00" : s;
}

// Seventeen significant digits: enough to round-trip any double exactly.
inline std::string format_17g(double v) { return format_double("%.17g", v); }

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_plain_real(const std::string& token) {
    const std::string t = trim(token);
    if (t.empty()) throw std::runtime_error("empty numeric token");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw std::runtime_error("not a finite number: '" + t + "'");
    }
    return v;
}

}  // namespace detail

// Parses a decimal or a "p/q" fraction ("1/1.15" evaluates to 1 divided by
// 1.15 in double precision).
inline double parse_real(const std::string& token) {
    const std::string t = detail::trim(token);
    const auto slash = t.find('/');
    if (slash == std::string::npos) return detail::parse_plain_real(t);
    const double num = detail::parse_plain_real(t.substr(0, slash));
    const double den = detail::parse_plain_real(t.substr(slash + 1));
    if (den == 0.0) throw std::runtime_error("zero denominator in '" + t + "'");
    return num / den;
}

// Shortest decimal spelling that parses back to exactly the same double.
inline std::string format_value_label(double v) {
    for (int prec = 1; prec <= 17; ++prec) {
        char spec[8];
        std::snprintf(spec, sizeof(spec), "%%.%dg", prec);
        std::string s = detail::format_double(spec, v);
        if (std::strtod(s.c_str(), nullptr) == v) return s;
    }
    return detail::format_17g(v);
}

inline grid_value make_grid_value(double v) {
    return {v, format_value_label(v)};
}

inline grid_value make_grid_value(const std::string& token) {
    return {parse_real(token), detail::trim(token)};
}

// The canonical evaluation grid: six values for each probability parameter
// and thirteen for each relative risk, reciprocals computed as divisions.
inline grid_spec default_grid() {
    grid_spec g;
    for (const char* t : {"0.005", "0.01", "0.05", "0.1", "0.25", "0.5"}) {
        g.p_miss.push_back(make_grid_value(std::string(t)));
    }
    for (const char* t : {"0.01", "0.05", "0.1", "0.25", "0.5", "0.75"}) {
        g.p_e.push_back(make_grid_value(std::string(t)));
        g.p_c.push_back(make_grid_value(std::string(t)));
    }
    for (const char* t : {"1/5", "1/3", "1/2", "1/1.5", "1/1.25", "1/1.15",
                          "1", "1.15", "1.25", "1.5", "2", "3", "5"}) {
        g.rr_c.push_back(make_grid_value(std::string(t)));
        g.rr_ec.push_back(make_grid_value(std::string(t)));
    }
    return g;
}

// Evaluates every grid combination and keeps the valid ones, in the fixed
// nesting order p_e, p_c, p_miss, rr_c, rr_ec (the records-file column
// order). The order never depends on how the evaluation is scheduled.
inline std::vector<sweep_record> enumerate_valid(const grid_spec& grid) {
    std::vector<sweep_record> records;
    for (const grid_value& pe : grid.p_e) {
        for (const grid_value& pc : grid.p_c) {
            std::vector<char> valid_re;
            valid_re.reserve(grid.rr_ec.size());
            for (const grid_value& re : grid.rr_ec) {
                valid_re.push_back(is_valid(parameter_point{
                    pe.value, pc.value, 0.0, 1.0, re.value}));
            }
            for (const grid_value& pm : grid.p_miss) {
                for (const grid_value& rc : grid.rr_c) {
                    for (std::size_t i = 0; i < grid.rr_ec.size(); ++i) {
                        if (!valid_re[i]) continue;
                        const parameter_point point{pe.value, pc.value,
                                                    pm.value, rc.value,
                                                    grid.rr_ec[i].value};
                        records.push_back(
                            {point, bias_percent(point).p_bias_percent});
                    }
                }
            }
        }
    }
    return records;
}

// Quantile of an ascending-sorted, nonempty vector.
inline double quantile_sorted(const std::vector<double>& xs, double p,
                              quantile_convention conv) {
    if (xs.empty()) throw empty_input("quantile of empty data");
    const std::size_t n = xs.size();
    if (conv == quantile_convention::nearest_rank) {
        std::size_t k = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(n)));
        if (k < 1) k = 1;
        if (k > n) k = n;
        return xs[k - 1];
    }
    const double h = static_cast<double>(n - 1) * p;
    const double fl = std::floor(h);
    const std::size_t i = static_cast<std::size_t>(fl);
    if (i + 1 >= n) return xs[n - 1];
    const double g = h - fl;
    return xs[i] + g * (xs[i + 1] - xs[i]);
}

namespace detail {

inline summary_row summarize_slice(std::string parameter,
                                   std::string value_label,
                                   std::vector<double> biases,
                                   threshold_mode mode,
                                   quantile_convention conv) {
    std::size_t n10 = 0;
    std::size_t n5 = 0;
    for (const double b : biases) {
        const double v = mode == threshold_mode::absolute_value
                             ? std::fabs(b)
                             : b;
        if (v > 10.0) ++n10;
        if (v > 5.0) ++n5;
    }
    std::sort(biases.begin(), biases.end());
    summary_row row;
    row.parameter = std::move(parameter);
    row.value_label = std::move(value_label);
    row.median = quantile_sorted(biases, 0.50, conv);
    row.q25 = quantile_sorted(biases, 0.25, conv);
    row.q75 = quantile_sorted(biases, 0.75, conv);
    const double n = static_cast<double>(biases.size());
    row.pct_gt_10 = 100.0 * static_cast<double>(n10) / n;
    row.pct_gt_5 = 100.0 * static_cast<double>(n5) / n;
    row.n_records = biases.size();
    return row;
}

}  // namespace detail

// Aggregates the records into one "Overall" row plus one row per (parameter,
// grid value) pair, in the fixed block order Pr(E), Pr(C), Pr(C_miss),
// RR(C), RR(E|C). Grid values that match no record are skipped. Each row
// aggregates every record sharing that value, so per-row denominators differ
// wherever the validity filter bites unevenly.
inline std::vector<summary_row> summarize(
    const std::vector<sweep_record>& records, const grid_spec& grid,
    threshold_mode mode = threshold_mode::signed_value,
    quantile_convention conv = quantile_convention::interpolated) {
    if (records.empty()) throw empty_input("summarize: no records");
    std::vector<summary_row> rows;

    std::vector<double> all;
    all.reserve(records.size());
    for (const sweep_record& r : records) all.push_back(r.p_bias_percent);
    rows.push_back(
        detail::summarize_slice("Overall", "", std::move(all), mode, conv));

    struct block {
        const char* name;
        const std::vector<grid_value>* values;
        double parameter_point::*field;
    };
    const block blocks[] = {
        {"Pr(E)", &grid.p_e, &parameter_point::p_e},
        {"Pr(C)", &grid.p_c, &parameter_point::p_c},
        {"Pr(C_miss)", &grid.p_miss, &parameter_point::p_miss},
        {"RR(C)", &grid.rr_c, &parameter_point::rr_c},
        {"RR(E|C)", &grid.rr_ec, &parameter_point::rr_ec},
    };
    for (const block& blk : blocks) {
        for (const grid_value& gv : *blk.values) {
            std::vector<double> slice;
            for (const sweep_record& r : records) {
                if (r.point.*blk.field == gv.value) {
                    slice.push_back(r.p_bias_percent);
                }
            }
            if (slice.empty()) continue;
            rows.push_back(detail::summarize_slice(
                blk.name, gv.label, std::move(slice), mode, conv));
        }
    }
    return rows;
}

inline const char* to_string(threshold_mode m) {
    return m == threshold_mode::signed_value ? "signed" : "absolute";
}

inline const char* to_string(quantile_convention c) {
    return c == quantile_convention::interpolated ? "interp" : "nearest";
}

// 64-bit FNV-1a over the canonical grid serialization, so reports can state
// which grid produced them.
inline std::uint64_t grid_hash(const grid_spec& g) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](const std::string& s) {
        for (const unsigned char ch : s) {
            h ^= ch;
            h *= 1099511628211ULL;
        }
        h ^= '\n';
        h *= 1099511628211ULL;
    };
    const std::pair<const char*, const std::vector<grid_value>*> lists[] = {
        {"p_miss", &g.p_miss}, {"p_e", &g.p_e},   {"p_c", &g.p_c},
        {"rr_c", &g.rr_c},     {"rr_ec", &g.rr_ec},
    };
    for (const auto& [name, values] : lists) {
        mix(name);
        for (const grid_value& gv : *values) {
            mix(detail::format_17g(gv.value));
            mix(gv.label);
        }
    }
    return h;
}

inline std::string grid_hash_hex(const grid_spec& g) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(grid_hash(g)));
    return buf;
}

namespace detail {

inline std::string escape_markdown_cell(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char ch : s) {
        if (ch == '|') out.push_back('\\');
        out.push_back(ch);
    }
    return out;
}

}  // namespace detail

// Renders the summary table. Metadata pairs, if given, lead the output as
// comment lines ("# key: value" in CSV, HTML comments in markdown) so files
// are self-describing without breaking parsers. Output is byte-deterministic
// for equal inputs.
inline std::string render_summary(
    const std::vector<summary_row>& rows, summary_format format,
    const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
    if (rows.empty()) throw empty_input("render_summary: no rows");
    std::string out;
    if (format == summary_format::csv) {
        for (const auto& [key, value] : metadata) {
            out += "# " + key + ": " + value + "\n";
        }
        out += "parameter,value,median,q25,q75,pct_gt_10,pct_gt_5\n";
        for (const summary_row& r : rows) {
            out += r.parameter + "," + r.value_label + "," +
                   detail::format_2dp(r.median) + "," +
                   detail::format_2dp(r.q25) + "," +
                   detail::format_2dp(r.q75) + "," +
                   detail::format_2dp(r.pct_gt_10) + "," +
                   detail::format_2dp(r.pct_gt_5) + "\n";
        }
        return out;
    }
    for (const auto& [key, value] : metadata) {
        out += "<!-- " + key + ": " + value + " -->\n";
    }
    out += "| parameter | value | median | q25 | q75 | pct >10 | pct >5 |\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (const summary_row& r : rows) {
        out += "| " + detail::escape_markdown_cell(r.parameter) + " | " +
               detail::escape_markdown_cell(r.value_label) + " | " +
               detail::format_2dp(r.median) + " | " +
               detail::format_2dp(r.q25) + " | " + detail::format_2dp(r.q75) +
               " | " + detail::format_2dp(r.pct_gt_10) + " | " +
               detail::format_2dp(r.pct_gt_5) + " |\n";
    }
    return out;
}

// Full-precision record dump: one line per valid combination, every number
// rendered with 17 significant digits so it round-trips exactly.
inline std::string render_records_csv(const std::vector<sweep_record>& records) {
    std::string out = "p_e,p_c,p_miss,rr_c,rr_ec,p_bias_percent\n";
    for (const sweep_record& r : records) {
        out += detail::format_17g(r.point.p_e) + "," +
               detail::format_17g(r.point.p_c) + "," +
               detail::format_17g(r.point.p_miss) + "," +
               detail::format_17g(r.point.rr_c) + "," +
               detail::format_17g(r.point.rr_ec) + "," +
               detail::format_17g(r.p_bias_percent) + "\n";
    }
    return out;
}

// Reads a grid-spec file: lines of the form "name = v1, v2, ...", where name
// is one of p_miss, p_e, p_c, rr_c, rr_ec and values are decimals or p/q
// fractions. Blank lines and lines starting with '#' are ignored. Parameters
// absent from the file keep their default-grid values.
inline grid_spec parse_grid_file(std::istream& in) {
    grid_spec g = default_grid();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("grid file line " +
                                     std::to_string(lineno) +
                                     ": expected 'name = v1, v2, ...'");
        }
        const std::string name = detail::trim(t.substr(0, eq));
        std::vector<grid_value>* target = nullptr;
        if (name == "p_miss") target = &g.p_miss;
        else if (name == "p_e") target = &g.p_e;
        else if (name == "p_c") target = &g.p_c;
        else if (name == "rr_c") target = &g.rr_c;
        else if (name == "rr_ec") target = &g.rr_ec;
        else {
            throw std::runtime_error("grid file line " +
                                     std::to_string(lineno) +
                                     ": unknown parameter '" + name + "'");
        }
        std::vector<grid_value> values;
        std::string rest = t.substr(eq + 1);
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const auto comma = rest.find(',', pos);
            const std::string token =
                rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                            : comma - pos);
            if (!detail::trim(token).empty()) {
                values.push_back(make_grid_value(token));
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (values.empty()) {
            throw std::runtime_error("grid file line " +
                                     std::to_string(lineno) + ": no values");
        }
        *target = std::move(values);
    }
    return g;
}

}  // namespace mcim
