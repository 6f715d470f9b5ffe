// Command-line front end. Subcommands:
//   bias       closed-form bias of one parameter combination
//   sweep      evaluate a parameter grid, write records and summary files
//   table3     summary of the default grid in the canonical row order
//   simulate   seeded finite-sample verification of the closed form
//   mar-limit  asymptotic behavior under an outcome/exposure-dependent
//              missingness mechanism
//
// Exit codes: 0 success, 1 usage or I/O error, 2 invalid parameter
// combination (including out-of-range cell risks), 3 degenerate estimate or
// mechanism.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcim/mcim.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_invalid = 2;
constexpr int exit_degenerate = 3;

struct point_args {
    std::string pe, pc, pmiss, rrc, rrec;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--pe", pe, "Pr(E), exposure prevalence")->required();
        cmd->add_option("--pc", pc, "Pr(C), covariate prevalence")->required();
        cmd->add_option("--pmiss", pmiss, "Pr(C_miss), missing proportion")
            ->required();
        cmd->add_option("--rrc", rrc, "RR(C), covariate-outcome relative risk")
            ->required();
        cmd->add_option("--rrec", rrec, "RR(E|C), exposure-covariate association")
            ->required();
    }

    mcim::parameter_point parse() const {
        return {mcim::parse_real(pe), mcim::parse_real(pc),
                mcim::parse_real(pmiss), mcim::parse_real(rrc),
                mcim::parse_real(rrec)};
    }
};

std::string fmt17(double v) { return mcim::detail::format_17g(v); }
std::string fmt2(double v) { return mcim::detail::format_2dp(v); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Mechanism file: four lines "f_obs y=<0|1> e=<0|1> = <prob>", each (y, e)
// cell exactly once. Blank lines and '#' comments are ignored.
mcim::mechanism parse_mechanism_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read mechanism file: " + path);
    mcim::mechanism mech{};
    bool seen[2][2] = {{false, false}, {false, false}};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = mcim::detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        int y = -1;
        int e = -1;
        double v = 0.0;
        if (std::sscanf(t.c_str(), "f_obs y=%d e=%d = %lf", &y, &e, &v) != 3 ||
            (y != 0 && y != 1) || (e != 0 && e != 1)) {
            throw std::runtime_error(
                path + " line " + std::to_string(lineno) +
                ": expected 'f_obs y=<0|1> e=<0|1> = <prob>'");
        }
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": probability out of [0, 1]");
        }
        if (seen[y][e]) {
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": duplicate (y, e) cell");
        }
        seen[y][e] = true;
        mech.f_obs[y][e] = v;
    }
    for (int y = 0; y < 2; ++y) {
        for (int e = 0; e < 2; ++e) {
            if (!seen[y][e]) {
                throw std::runtime_error(
                    path + ": missing entry for y=" + std::to_string(y) +
                    " e=" + std::to_string(e));
            }
        }
    }
    return mech;
}

int run_bias(const point_args& args) {
    const mcim::parameter_point point = args.parse();
    const mcim::derived_conditionals k = mcim::derive_conditionals(point);
    const mcim::bias_result b = mcim::bias_percent(point);
    std::cout << "P_bias%         : " << fmt2(b.p_bias_percent) << " ("
              << fmt17(b.p_bias_percent) << ")\n"
              << "RR_miss / RR(E) : " << fmt17(b.rr_miss_over_rr_e) << "\n"
              << "Pr(E=1|C=1)     : " << fmt17(k.p_e_given_c1) << "\n"
              << "Pr(E=1|C=0)     : " << fmt17(k.p_e_given_c0) << "\n"
              << "Pr(C=1|E=1)     : " << fmt17(k.p_c_given_e1) << "\n"
              << "Pr(C=1|E=0)     : " << fmt17(k.p_c_given_e0) << "\n"
              << "validity        : valid\n";
    return exit_ok;
}

std::vector<std::pair<std::string, std::string>> summary_metadata(
    const mcim::grid_spec& grid, mcim::threshold_mode mode,
    mcim::quantile_convention conv) {
    return {{"tool", mcim::tool_version},
            {"grid", "fnv1a=" + mcim::grid_hash_hex(grid)},
            {"threshold_mode", mcim::to_string(mode)},
            {"quantile", mcim::to_string(conv)}};
}

int run_sweep(const std::string& grid_path, const std::string& records_path,
              const std::string& summary_path, mcim::summary_format format,
              mcim::threshold_mode mode, mcim::quantile_convention conv) {
    mcim::grid_spec grid;
    if (grid_path.empty()) {
        grid = mcim::default_grid();
    } else {
        std::ifstream in(grid_path);
        if (!in) throw std::runtime_error("cannot read grid file: " + grid_path);
        grid = mcim::parse_grid_file(in);
    }
    const std::vector<mcim::sweep_record> records =
        mcim::enumerate_valid(grid);
    std::cout << records.size() << " valid combinations\n";
    write_file(records_path, mcim::render_records_csv(records));
    const auto rows = mcim::summarize(records, grid, mode, conv);
    write_file(summary_path, mcim::render_summary(
                                 rows, format,
                                 summary_metadata(grid, mode, conv)));
    return exit_ok;
}

int run_table3(const std::string& out_path, mcim::summary_format format) {
    const mcim::grid_spec grid = mcim::default_grid();
    const auto records = mcim::enumerate_valid(grid);
    const auto rows = mcim::summarize(records, grid);
    const std::string text = mcim::render_summary(
        rows, format,
        summary_metadata(grid, mcim::threshold_mode::signed_value,
                         mcim::quantile_convention::interpolated));
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
    return exit_ok;
}

int run_simulate(const point_args& args, const std::string& baseline_s,
                 const std::string& rre_s, std::uint64_t n, std::uint64_t reps,
                 std::uint64_t seed, const std::string& mechanism_arg,
                 const std::string& out_path) {
    mcim::sim_config cfg;
    cfg.point = args.parse();
    cfg.baseline_risk = mcim::parse_real(baseline_s);
    cfg.rr_e = mcim::parse_real(rre_s);
    cfg.mech = mechanism_arg == "mcar"
                   ? mcim::mechanism::mcar(cfg.point.p_miss)
                   : parse_mechanism_file(mechanism_arg);
    cfg.n = n;
    cfg.seed = seed;

    const mcim::bias_result analytic = mcim::bias_percent(cfg.point);
    const mcim::stratified_tables expected = mcim::expected_tables(
        cfg.point, cfg.baseline_risk, cfg.rr_e, cfg.mech);
    const mcim::estimate_result asym = mcim::mcim_rr(expected);
    if (asym.degenerate) {
        std::cerr << "asymptotic estimate degenerate: " << asym.reason << "\n";
        return exit_degenerate;
    }
    const double asym_bias = (asym.value - cfg.rr_e) / cfg.rr_e * 100.0;

    const mcim::replicate_summary rep = mcim::replicate_bias(cfg, reps);
    const std::size_t ok = rep.replicates.size() - rep.degenerate_count;

    std::cout << "analytic P_bias%           : " << fmt17(analytic.p_bias_percent)
              << "\n"
              << "asymptotic P_bias% (mech)  : " << fmt17(asym_bias) << "\n"
              << "replicates ok/degenerate   : " << ok << "/"
              << rep.degenerate_count << "\n";
    if (ok == 0) {
        std::cerr << "every replicate degenerate\n";
        return exit_degenerate;
    }
    std::cout << "empirical mean P_bias%     : " << fmt17(rep.mean) << "\n"
              << "standard error             : " << fmt17(rep.standard_error)
              << "\n";
    if (rep.standard_error > 0.0) {
        std::cout << "z-gap vs asymptotic        : "
                  << fmt2((rep.mean - asym_bias) / rep.standard_error) << "\n";
    }

    if (!out_path.empty()) {
        std::string csv = "rep,seed,n,estimator,estimate,bias_percent\n";
        for (const mcim::replicate_result& r : rep.replicates) {
            csv += std::to_string(r.rep) + "," + std::to_string(r.seed) + "," +
                   std::to_string(n) + ",mcim_rr,";
            if (r.degenerate) {
                csv += ",\n";
            } else {
                csv += fmt17(r.estimate) + "," + fmt17(r.bias_percent) + "\n";
            }
        }
        csv += "# replicates_ok: " + std::to_string(ok) + "\n";
        csv += "# degenerate: " + std::to_string(rep.degenerate_count) + "\n";
        csv += "# mean_bias_percent: " + fmt17(rep.mean) + "\n";
        csv += "# standard_error: " + fmt17(rep.standard_error) + "\n";
        write_file(out_path, csv);
    }
    return exit_ok;
}

int run_mar_limit(const point_args& args, const std::string& baseline_s,
                  const std::string& rre_s, const std::string& mech_path) {
    const mcim::parameter_point point = args.parse();
    const double baseline = mcim::parse_real(baseline_s);
    const double rr_e = mcim::parse_real(rre_s);
    const mcim::mechanism mech = parse_mechanism_file(mech_path);

    const bool holds = mcim::mar_condition_holds(mech);
    const double limit_c1 =
        mcim::mar_stratum_rr_limit(point, baseline, rr_e, mech, 1);
    const double limit_c0 =
        mcim::mar_stratum_rr_limit(point, baseline, rr_e, mech, 0);
    const mcim::stratified_tables expected =
        mcim::expected_tables(point, baseline, rr_e, mech);
    const mcim::estimate_result crude_complete =
        mcim::crude_rr_complete(expected);
    const mcim::estimate_result crude_miss = mcim::stratum_rr(expected.miss);
    const mcim::estimate_result asym = mcim::mcim_rr(expected);
    if (crude_complete.degenerate || asym.degenerate) {
        std::cerr << "degenerate asymptotic tables: "
                  << (crude_complete.degenerate ? crude_complete.reason
                                                : asym.reason)
                  << "\n";
        return exit_degenerate;
    }
    const mcim::bias_result analytic = mcim::bias_percent(point);

    std::cout << "missingness independent of outcome given exposure : "
              << (holds ? "yes" : "no") << "\n"
              << "stratum RR limit (C=1)       : " << fmt17(limit_c1) << "\n"
              << "stratum RR limit (C=0)       : " << fmt17(limit_c0) << "\n"
              << "crude RR, complete strata    : " << fmt17(crude_complete.value)
              << "\n";
    if (crude_miss.degenerate) {
        std::cout << "crude RR, missing stratum    : undefined ("
                  << crude_miss.reason << ")\n";
    } else {
        std::cout << "crude RR, missing stratum    : " << fmt17(crude_miss.value)
                  << "\n";
    }
    std::cout << "asymptotic MCIM P_bias%      : "
              << fmt17((asym.value - rr_e) / rr_e * 100.0) << "\n"
              << "closed-form P_bias% (MCAR)   : "
              << fmt17(analytic.p_bias_percent) << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Exact relative bias of the missing covariate indicator method: "
        "point evaluation, grid sweeps, summary tables, seeded Monte Carlo "
        "verification, and asymptotic limits under outcome- or "
        "exposure-dependent missingness."};
    app.set_version_flag("--version", std::string(mcim::tool_version));
    app.require_subcommand(1);

    point_args bias_point;
    CLI::App* bias_cmd =
        app.add_subcommand("bias", "Closed-form bias of one combination");
    bias_point.add_to(bias_cmd);

    std::string sweep_grid;
    std::string sweep_records = "records.csv";
    std::string sweep_summary = "summary.csv";
    std::string sweep_format = "csv";
    std::string sweep_mode = "signed";
    std::string sweep_quantile = "interp";
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Evaluate a grid; write records and summary files");
    sweep_cmd->add_option("--grid", sweep_grid,
                          "Grid-spec file (default: built-in grid)");
    sweep_cmd->add_option("--records", sweep_records,
                          "Records CSV output path");
    sweep_cmd->add_option("--summary", sweep_summary,
                          "Summary table output path");
    sweep_cmd->add_option("--format", sweep_format, "csv or markdown")
        ->check(CLI::IsMember({"csv", "markdown"}));
    sweep_cmd->add_option("--threshold-mode", sweep_mode,
                          "signed or absolute tail counting")
        ->check(CLI::IsMember({"signed", "absolute"}));
    sweep_cmd->add_option("--quantile", sweep_quantile, "interp or nearest")
        ->check(CLI::IsMember({"interp", "nearest"}));

    std::string t3_out;
    std::string t3_format = "csv";
    CLI::App* t3_cmd = app.add_subcommand(
        "table3", "Summary of the default grid in the canonical row order");
    t3_cmd->add_option("--out", t3_out, "Output path (default: stdout)");
    t3_cmd->add_option("--format", t3_format, "csv or markdown")
        ->check(CLI::IsMember({"csv", "markdown"}));

    point_args sim_point;
    std::string sim_baseline = "0.05";
    std::string sim_rre = "2";
    std::uint64_t sim_n = 100000;
    std::uint64_t sim_reps = 20;
    std::uint64_t sim_seed = 1;
    std::string sim_mech = "mcar";
    std::string sim_out = "replicates.csv";
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Seeded finite-sample verification of the closed form");
    sim_point.add_to(sim_cmd);
    sim_cmd->add_option("--baseline", sim_baseline,
                        "Pr(Y=1|E=0,C=0) baseline risk");
    sim_cmd->add_option("--rre", sim_rre, "True exposure relative risk RR(E)");
    sim_cmd->add_option("--n", sim_n, "Subjects per replicate");
    sim_cmd->add_option("--reps", sim_reps, "Number of replicates");
    sim_cmd->add_option("--seed", sim_seed, "Base seed");
    sim_cmd->add_option("--mechanism", sim_mech,
                        "'mcar' or a mechanism file path");
    sim_cmd->add_option("--out", sim_out,
                        "Per-replicate CSV output path ('' to skip)");

    point_args mar_point;
    std::string mar_baseline = "0.05";
    std::string mar_rre = "2";
    std::string mar_mech;
    CLI::App* mar_cmd = app.add_subcommand(
        "mar-limit", "Asymptotic limits under a (Y,E)-dependent mechanism");
    mar_point.add_to(mar_cmd);
    mar_cmd->add_option("--baseline", mar_baseline,
                        "Pr(Y=1|E=0,C=0) baseline risk");
    mar_cmd->add_option("--rre", mar_rre, "True exposure relative risk RR(E)");
    mar_cmd->add_option("--mechanism", mar_mech, "Mechanism file path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (bias_cmd->parsed()) return run_bias(bias_point);
        if (sweep_cmd->parsed()) {
            return run_sweep(
                sweep_grid, sweep_records, sweep_summary,
                sweep_format == "markdown" ? mcim::summary_format::markdown
                                           : mcim::summary_format::csv,
                sweep_mode == "absolute" ? mcim::threshold_mode::absolute_value
                                         : mcim::threshold_mode::signed_value,
                sweep_quantile == "nearest"
                    ? mcim::quantile_convention::nearest_rank
                    : mcim::quantile_convention::interpolated);
        }
        if (t3_cmd->parsed()) {
            return run_table3(t3_out, t3_format == "markdown"
                                          ? mcim::summary_format::markdown
                                          : mcim::summary_format::csv);
        }
        if (sim_cmd->parsed()) {
            return run_simulate(sim_point, sim_baseline, sim_rre, sim_n,
                                sim_reps, sim_seed, sim_mech, sim_out);
        }
        if (mar_cmd->parsed()) {
            return run_mar_limit(mar_point, mar_baseline, mar_rre, mar_mech);
        }
    } catch (const mcim::invalid_combination& e) {
        std::cerr << e.what() << "\n";
        return exit_invalid;
    } catch (const mcim::risk_out_of_range& e) {
        std::cerr << e.what() << "\n";
        return exit_invalid;
    } catch (const mcim::degenerate_mechanism& e) {
        std::cerr << e.what() << "\n";
        return exit_degenerate;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
