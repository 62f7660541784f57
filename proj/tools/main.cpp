#include "commands.hpp"

#include "dlf/error.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace dlf::cli;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;
constexpr int kExitInternal = 4;

void add_model_flags(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--mu", m.mu, "Mean per-period return");
    cmd->add_option("--sigma", m.sigma, "Std of the per-period return");
    cmd->add_option("--k-max", m.k_max, "Largest admissible gain (moment mode, default 1)");
    cmd->add_option("--prices", m.prices, "Price CSV; switches to the empirical PMF");
    cmd->add_option("--price-column", m.price_column, "Price column name")->capture_default_str();
}

void add_run_flags(CLI::App* cmd, RunArgs& r, bool with_paths) {
    cmd->add_option("--v0", r.v0, "Initial account value")->capture_default_str();
    cmd->add_option("--stage", r.stage, "Horizon k (default: number of returns in the price file)");
    if (with_paths) {
        cmd->add_option("--n-paths", r.n_paths, "Monte-Carlo paths");
        cmd->add_option("--seed", r.seed, "RNG seed (default: $DLF_SEED, else 2019)");
        cmd->add_option("--threads", r.threads, "Worker threads, 0 = all cores")->capture_default_str();
    }
    cmd->add_option("--out", r.out, "Output file; a <out>.manifest.json is written beside it");
}

void add_backtest_flags(CLI::App* cmd, BacktestArgs& b) {
    cmd->add_option("--train-prices", b.train_prices, "Price CSV the PMF is fitted on");
    cmd->add_option("--test-prices", b.test_prices, "Price CSV replayed out of sample");
    cmd->add_option("--price-column", b.price_column, "Price column name")->capture_default_str();
    cmd->add_option("--portfolio", b.portfolio, "Portfolio spec CSV (multi-asset mode)");
    cmd->add_option("--tol", b.tol, "Bisection tolerance on the std");
    add_run_flags(cmd, b.run, true);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Double linear feedback trading: analytics, optimal gain, simulation and backtests"};
    app.set_version_flag("--version", DLF_VERSION);
    app.require_subcommand(1);

    CurveArgs curve;
    auto* c_curve = app.add_subcommand("curve", "Mean-std curve over the admissible gains (CSV)");
    add_model_flags(c_curve, curve.model);
    add_run_flags(c_curve, curve.run, true);
    c_curve->add_option("--grid", curve.grid, "Number of gain grid points")->capture_default_str();

    OptimizeArgs optimize;
    auto* c_opt = app.add_subcommand("optimize", "Largest gain meeting a std target (JSON)");
    add_model_flags(c_opt, optimize.model);
    add_run_flags(c_opt, optimize.run, true);
    c_opt->add_option("--target-std", optimize.target_std, "Tolerated std of the gain-loss")->required();
    c_opt->add_option("--tol", optimize.tol, "Bisection tolerance on the std");

    SimulateArgs simulate;
    auto* c_sim = app.add_subcommand("simulate", "Monte-Carlo gain-loss statistics (JSON)");
    add_model_flags(c_sim, simulate.model);
    add_run_flags(c_sim, simulate.run, true);
    c_sim->add_option("--alpha", simulate.alpha, "Long fraction of the initial account")->capture_default_str();
    c_sim->add_option("--k-gain", simulate.k_gain, "Feedback gain K")->required();

    BacktestArgs backtest;
    auto* c_bt = app.add_subcommand("backtest", "Fit on a train segment, replay a test segment");
    add_backtest_flags(c_bt, backtest);
    c_bt->add_option("--target-std", backtest.target_std, "Tolerated std (single-asset mode)");

    ReproArgs repro;
    auto* c_repro = app.add_subcommand("repro", "Named example runs: toy, uneven-alpha, tsla, three-stock");
    c_repro->add_option("preset", repro.preset, "Preset name")->required();
    add_backtest_flags(c_repro, repro.data);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_curve) return run_curve(curve);
        if (*c_opt) return run_optimize(optimize);
        if (*c_sim) return run_simulate(simulate);
        if (*c_bt) return run_backtest(backtest);
        if (*c_repro) return run_repro(repro);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const dlf::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == dlf::ErrorCode::InternalConsistency ? kExitInternal : kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}
