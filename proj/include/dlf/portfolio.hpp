#pragma once

#include "dlf/dynamics.hpp"
#include "dlf/optimizer.hpp"
#include "dlf/returns.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dlf {

struct PortfolioAsset {
    std::string name;
    ReturnBounds bounds;
    double k_gain = 0.0;
};

/// m assets, each traded by its own balanced controller on V0/m of capital
/// (V0/(2m) per sub-account).
struct PortfolioConfig {
    std::vector<PortfolioAsset> assets;
    double v0 = 1.0;

    static PortfolioConfig make(std::vector<PortfolioAsset> assets, double v0);

    std::size_t size() const noexcept { return assets.size(); }
    ControllerConfig controller(std::size_t i) const;
};

struct PortfolioTrajectory {
    std::vector<AccountTrajectory> per_asset;
    std::vector<double> total_value;
    std::vector<double> total_gain_loss;  // sum of per-asset gain-losses
    std::vector<double> leverage;         // sum_i |u_i(k)| / V(k); reported, never enforced
};

/// Errors from a single asset are rethrown with "asset i" in the message.
PortfolioTrajectory run_portfolio(const PortfolioConfig& config,
                                  std::span<const std::vector<double>> paths);

struct AssetTarget {
    EmpiricalPMF pmf;
    double target_std = 0.0;  // currency units of the asset's V0/m sleeve
};

/// Independent solve_optimal_gain_empirical per asset on capital V0/m. Every
/// asset is solved with the same seed, so identical inputs give identical K*.
std::vector<OptimalGainResult> optimize_portfolio(std::span<const AssetTarget> assets, double v0,
                                                  int stage, double tol, std::size_t n_paths,
                                                  std::uint64_t seed, unsigned workers = 0);

/// Columns: k, gain_<name> per asset, total_gain_loss, leverage_ratio.
void write_portfolio_csv(std::ostream& out, const PortfolioConfig& config,
                         const PortfolioTrajectory& traj);

}  // namespace dlf
