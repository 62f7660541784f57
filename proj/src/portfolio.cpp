#include "dlf/portfolio.hpp"

#include "dlf/error.hpp"
#include "dlf/format.hpp"

#include <cmath>
#include <ostream>

namespace dlf {

namespace {

template <class F>
auto tagged(std::size_t i, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), "asset " + std::to_string(i) + ": " + e.detail());
    }
}

}  // namespace

PortfolioConfig PortfolioConfig::make(std::vector<PortfolioAsset> assets, double v0) {
    if (assets.empty()) throw Error(ErrorCode::EmptyInput, "portfolio needs at least one asset");
    if (!(v0 > 0.0) || !std::isfinite(v0))
        throw Error(ErrorCode::DomainError, "initial account must be positive");
    PortfolioConfig cfg{std::move(assets), v0};
    for (std::size_t i = 0; i < cfg.size(); ++i) tagged(i, [&] { return cfg.controller(i); });
    return cfg;
}

ControllerConfig PortfolioConfig::controller(std::size_t i) const {
    const double sleeve = v0 / static_cast<double>(assets.size());
    return ControllerConfig::make(0.5, assets[i].k_gain, sleeve, assets[i].bounds);
}

PortfolioTrajectory run_portfolio(const PortfolioConfig& config,
                                  std::span<const std::vector<double>> paths) {
    if (paths.size() != config.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(paths.size()) + " return paths for " +
                                                   std::to_string(config.size()) + " assets");
    for (std::size_t i = 1; i < paths.size(); ++i) {
        if (paths[i].size() != paths[0].size())
            throw Error(ErrorCode::LengthMismatch, "asset " + std::to_string(i) + " path has " +
                                                       std::to_string(paths[i].size()) + " returns, asset 0 has " +
                                                       std::to_string(paths[0].size()));
    }

    PortfolioTrajectory out;
    out.per_asset.reserve(config.size());
    for (std::size_t i = 0; i < config.size(); ++i)
        out.per_asset.push_back(tagged(i, [&] { return simulate(config.controller(i), paths[i]); }));

    const std::size_t n = out.per_asset.front().size();
    out.total_value.assign(n, 0.0);
    out.total_gain_loss.assign(n, 0.0);
    out.leverage.assign(n, 0.0);
    std::vector<double> exposure(n, 0.0);
    for (const auto& traj : out.per_asset) {
        for (std::size_t k = 0; k < n; ++k) {
            out.total_value[k] += traj.v_total[k];
            out.total_gain_loss[k] += traj.gain_loss[k];
            exposure[k] += std::abs(traj.controls[k].u_total);
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        out.leverage[k] = out.total_value[k] > 0.0 ? exposure[k] / out.total_value[k] : 0.0;
    return out;
}

std::vector<OptimalGainResult> optimize_portfolio(std::span<const AssetTarget> assets, double v0,
                                                  int stage, double tol, std::size_t n_paths,
                                                  std::uint64_t seed, unsigned workers) {
    if (assets.empty()) throw Error(ErrorCode::EmptyInput, "portfolio needs at least one asset");
    const double sleeve = v0 / static_cast<double>(assets.size());
    std::vector<OptimalGainResult> out;
    out.reserve(assets.size());
    for (std::size_t i = 0; i < assets.size(); ++i) {
        out.push_back(tagged(i, [&] {
            return solve_optimal_gain_empirical(assets[i].pmf, sleeve, stage, assets[i].target_std, tol,
                                                n_paths, seed, workers);
        }));
    }
    return out;
}

void write_portfolio_csv(std::ostream& out, const PortfolioConfig& config,
                         const PortfolioTrajectory& traj) {
    out << 'k';
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto& name = config.assets[i].name;
        out << ",gain_" << (name.empty() ? std::to_string(i) : name);
    }
    out << ",total_gain_loss,leverage_ratio\n";
    for (std::size_t k = 0; k < traj.total_gain_loss.size(); ++k) {
        out << k;
        for (const auto& a : traj.per_asset) out << ',' << format_double(a.gain_loss[k]);
        out << ',' << format_double(traj.total_gain_loss[k]) << ',' << format_double(traj.leverage[k])
            << '\n';
    }
}

}  // namespace dlf
