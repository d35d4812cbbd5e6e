#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "sigmak/cli.hpp"

// Batch front door for the sigma_k curvature solver. Subcommands:
//   check-identities   algebra property suite against the brute-force oracles
//   solve              homotopy continuation solve with certificates
//   verify             recompute certificates for a stored solution field
//   mms                manufactured-solution accuracy/convergence study
//   sweep-t            limiting-behaviour sweep over the curvature parameter
int main(int argc, char** argv) {
    CLI::App app{"sigma_k conformal curvature equation solver"};
    app.require_subcommand(1);

    long trials = 1000;
    unsigned long seed = 12345;
    int nmax = 6;
    auto* check = app.add_subcommand("check-identities", "run the identity property suite");
    check->add_option("--trials", trials, "random trials per family");
    check->add_option("--seed", seed, "random seed");
    check->add_option("--nmax", nmax, "largest matrix dimension (2..6)");

    std::string configPath, solutionPath, preset;
    sigmak::cli::Overrides ov;
    double tolOpt = 0.0;
    int maxNewtonOpt = 0;
    unsigned long seedOpt = 0;
    std::string outPrefixOpt;

    auto addCommon = [&](CLI::App* cmd) {
        cmd->add_option("--tol", tolOpt, "Newton residual tolerance (relative)");
        cmd->add_option("--max-newton", maxNewtonOpt, "Newton iteration cap");
        cmd->add_option("--seed", seedOpt, "random seed recorded in the report");
        cmd->add_option("--out", outPrefixOpt, "output file prefix");
        cmd->add_option("--preset", preset, "named preset (det-ricci: k = n, t = 0)");
    };

    auto* solve = app.add_subcommand("solve", "solve the configured problem");
    solve->add_option("config", configPath, "run configuration file")->required();
    addCommon(solve);

    auto* verify = app.add_subcommand("verify", "verify a stored solution");
    verify->add_option("solution", solutionPath, "solution CSV")->required();
    verify->add_option("config", configPath, "run configuration file")->required();
    addCommon(verify);

    std::vector<int> grids;
    auto* mms = app.add_subcommand("mms", "manufactured-solution study");
    mms->add_option("config", configPath, "run configuration file")->required();
    mms->add_option("--grids", grids, "cubic grid sizes")->delimiter(',')->required();
    addCommon(mms);

    std::vector<double> tlist;
    auto* sweep = app.add_subcommand("sweep-t", "sweep the curvature parameter");
    sweep->add_option("config", configPath, "run configuration file")->required();
    sweep->add_option("--t-list", tlist, "t values (each < 1)")->delimiter(',')->required();
    addCommon(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sigmak::cli::kExitUsage;
    }

    auto fill = [&](CLI::App* cmd) {
        if (cmd->count("--tol")) ov.tol = tolOpt;
        if (cmd->count("--max-newton")) ov.maxNewton = maxNewtonOpt;
        if (cmd->count("--seed")) ov.seed = seedOpt;
        if (cmd->count("--out")) ov.outPrefix = outPrefixOpt;
        if (cmd->count("--preset")) {
            if (preset != "det-ricci") {
                std::cerr << "usage error: unknown preset '" << preset << "'\n";
                return false;
            }
            ov.detRicci = true;
        }
        return true;
    };

    try {
        if (check->parsed()) return sigmak::cli::cmd_check_identities(trials, seed, nmax, std::cout);
        if (solve->parsed())
            return fill(solve) ? sigmak::cli::cmd_solve(configPath, ov, std::cout) : sigmak::cli::kExitUsage;
        if (verify->parsed())
            return fill(verify) ? sigmak::cli::cmd_verify(solutionPath, configPath, ov, std::cout)
                                : sigmak::cli::kExitUsage;
        if (mms->parsed())
            return fill(mms) ? sigmak::cli::cmd_mms(configPath, grids, ov, std::cout) : sigmak::cli::kExitUsage;
        if (sweep->parsed())
            return fill(sweep) ? sigmak::cli::cmd_sweep_t(configPath, tlist, ov, std::cout)
                               : sigmak::cli::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sigmak::cli::kExitUsage;
    }
    return sigmak::cli::kExitUsage;
}
