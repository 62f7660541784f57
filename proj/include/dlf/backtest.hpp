#pragma once

#include "dlf/dynamics.hpp"
#include "dlf/montecarlo.hpp"
#include "dlf/optimizer.hpp"
#include "dlf/portfolio.hpp"
#include "dlf/returns.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dlf {

/// Monte-Carlo settings shared by the out-of-sample workflows.
struct SolveSettings {
    double tol = kDefaultMonteCarloTol;
    std::size_t n_paths = kDefaultPaths;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    std::optional<int> stage;  // defaults to the number of training returns
};

struct BacktestResult {
    EmpiricalPMF train_pmf;
    OptimalGainResult optimum;
    ReturnBounds controller_bounds;  // hull of training support and test returns
    AccountTrajectory trajectory;
};

/// Fits the empirical PMF on `train`, solves for K* at `target_std`, then
/// replays the realized `test` returns through the balanced controller.
BacktestResult backtest_single(const PriceSeries& train, const PriceSeries& test, double target_std,
                               double v0, const SolveSettings& settings);

/// One row of a portfolio spec file.
struct PortfolioEntry {
    std::string ticker;
    std::filesystem::path train_prices;
    std::filesystem::path test_prices;
    std::string price_column = "adj_close";
    double target_std = 0.0;  // per unit of the asset's V0/m capital
};

/// Reads a portfolio spec: CSV with header
///   ticker,train_prices,test_prices,price_column,target_std
/// '#' lines are comments, an empty price_column means "adj_close", and
/// relative paths are resolved against the spec file's directory.
std::vector<PortfolioEntry> load_portfolio_spec(const std::filesystem::path& path);

struct PortfolioBacktestResult {
    std::vector<EmpiricalPMF> train_pmfs;
    std::vector<OptimalGainResult> optima;
    PortfolioConfig config;
    PortfolioTrajectory trajectory;
};

struct PortfolioSeries {
    std::string ticker;
    PriceSeries train;
    PriceSeries test;
    double target_std = 0.0;  // per unit of sleeve capital
};

/// Targets are scaled by V0/m before optimize_portfolio, so they read as a
/// fraction of each asset's sleeve.
PortfolioBacktestResult backtest_portfolio(const std::vector<PortfolioSeries>& assets, double v0,
                                           const SolveSettings& settings);

std::vector<PortfolioSeries> load_portfolio_series(const std::vector<PortfolioEntry>& entries);

}  // namespace dlf
