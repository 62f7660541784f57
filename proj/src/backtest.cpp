#include "dlf/backtest.hpp"

#include "csv_util.hpp"
#include "dlf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace dlf {

namespace {

ReturnBounds realized_bounds(const std::vector<double>& returns) {
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    return ReturnBounds::make(*lo, *hi);
}

int resolve_stage(const SolveSettings& settings, std::size_t n_train) {
    if (settings.stage) return *settings.stage;
    return static_cast<int>(n_train);
}

}  // namespace

BacktestResult backtest_single(const PriceSeries& train, const PriceSeries& test, double target_std,
                               double v0, const SolveSettings& settings) {
    const auto train_returns = returns_from_prices(train);
    const auto test_returns = returns_from_prices(test);
    auto pmf = pmf_from_returns(train_returns);
    const int stage = resolve_stage(settings, train_returns.size());

    auto optimum = solve_optimal_gain_empirical(pmf, v0, stage, target_std, settings.tol,
                                                settings.n_paths, settings.seed, settings.workers);
    const auto bounds = pmf.bounds().hull(realized_bounds(test_returns));
    const auto config = ControllerConfig::make(0.5, optimum.k_star, v0, bounds);
    auto trajectory = simulate(config, test_returns);
    return {std::move(pmf), optimum, bounds, std::move(trajectory)};
}

std::vector<PortfolioEntry> load_portfolio_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    const auto base = path.parent_path();

    std::string line;
    std::size_t row = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    std::vector<PortfolioEntry> entries;

    auto column = [&](std::string_view name) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (detail::iequals(header[c], name)) return c;
        if (name == "price_column") return header.size();
        throw Error(ErrorCode::MissingColumn, path.string() + ": no column named '" + std::string(name) + "'");
    };
    std::size_t c_ticker = 0, c_train = 0, c_test = 0, c_column = 0, c_target = 0;

    while (std::getline(in, line)) {
        ++row;
        if (row == 1) detail::strip_bom(line);
        const auto trimmed = detail::trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        if (header.empty()) {
            header_line = line;
            header = detail::split_row(header_line);
            c_ticker = column("ticker");
            c_train = column("train_prices");
            c_test = column("test_prices");
            c_column = column("price_column");
            c_target = column("target_std");
            continue;
        }
        const auto fields = detail::split_row(line);
        if (fields.size() != header.size())
            throw Error(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) + " has " +
                                                   std::to_string(fields.size()) + " fields, header has " +
                                                   std::to_string(header.size()));
        PortfolioEntry e;
        e.ticker = std::string(fields[c_ticker]);
        auto resolve = [&](std::string_view p) {
            std::filesystem::path fp{std::string(p)};
            return fp.is_absolute() ? fp : base / fp;
        };
        e.train_prices = resolve(fields[c_train]);
        e.test_prices = resolve(fields[c_test]);
        if (c_column < fields.size() && !fields[c_column].empty()) e.price_column = std::string(fields[c_column]);
        const auto text = fields[c_target];
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), e.target_std);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw Error(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) +
                                                   ", column 'target_std': cannot parse '" +
                                                   std::string(text) + "'");
        if (e.ticker.empty())
            throw Error(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) + " has no ticker");
        entries.push_back(std::move(e));
    }
    if (header.empty()) throw Error(ErrorCode::ParseError, path.string() + ": missing header row");
    if (entries.empty()) throw Error(ErrorCode::EmptyInput, path.string() + ": no assets");
    return entries;
}

std::vector<PortfolioSeries> load_portfolio_series(const std::vector<PortfolioEntry>& entries) {
    std::vector<PortfolioSeries> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        auto train = load_prices_csv(e.train_prices, e.price_column);
        auto test = load_prices_csv(e.test_prices, e.price_column);
        train.ticker = e.ticker;
        test.ticker = e.ticker;
        out.push_back({e.ticker, std::move(train), std::move(test), e.target_std});
    }
    return out;
}

PortfolioBacktestResult backtest_portfolio(const std::vector<PortfolioSeries>& assets, double v0,
                                           const SolveSettings& settings) {
    if (assets.empty()) throw Error(ErrorCode::EmptyInput, "portfolio needs at least one asset");
    const double sleeve = v0 / static_cast<double>(assets.size());

    PortfolioBacktestResult out;
    std::vector<AssetTarget> targets;
    std::vector<std::vector<double>> test_paths;
    std::size_t n_train = 0;
    for (const auto& a : assets) {
        const auto r = returns_from_prices(a.train);
        n_train = n_train == 0 ? r.size() : std::min(n_train, r.size());
        out.train_pmfs.push_back(pmf_from_returns(r));
        targets.push_back({out.train_pmfs.back(), a.target_std * sleeve});
        test_paths.push_back(returns_from_prices(a.test));
    }
    const int stage = resolve_stage(settings, n_train);
    out.optima = optimize_portfolio(targets, v0, stage, settings.tol, settings.n_paths, settings.seed,
                                    settings.workers);

    std::vector<PortfolioAsset> cfg_assets;
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const auto bounds = out.train_pmfs[i].bounds().hull(realized_bounds(test_paths[i]));
        cfg_assets.push_back({assets[i].ticker, bounds, out.optima[i].k_star});
    }
    out.config = PortfolioConfig::make(std::move(cfg_assets), v0);
    out.trajectory = run_portfolio(out.config, test_paths);
    return out;
}

}  // namespace dlf
