#include "commands.hpp"

#include "dlf/analytics.hpp"
#include "dlf/backtest.hpp"
#include "dlf/error.hpp"
#include "dlf/format.hpp"
#include "dlf/montecarlo.hpp"
#include "dlf/optimizer.hpp"
#include "dlf/returns.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef DLF_VERSION
#define DLF_VERSION "dev"
#endif

namespace dlf::cli {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("DLF_SEED"); env && *env) {
        const std::string_view text(env);
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw UsageError("DLF_SEED must be an unsigned integer, got '" + std::string(text) + "'");
        return value;
    }
    return kDefaultSeed;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

/// Writes `content` to `out` and the run manifest next to it.
void write_output(const std::string& out, const std::string& command, const json& parameters,
                  const std::optional<std::uint64_t>& seed, const std::string& content) {
    {
        std::ofstream file(out, std::ios::binary);
        if (!file) throw Error(ErrorCode::ParseError, "cannot write " + out);
        file << content;
    }
    json manifest;
    manifest["command"] = command;
    manifest["parameters"] = parameters;
    manifest["seed"] = seed ? json(*seed) : json(nullptr);
    manifest["outputs"] = json::array({std::filesystem::path(out).filename().string()});
    manifest["tool_version"] = DLF_VERSION;
    std::ofstream file(out + ".manifest.json", std::ios::binary);
    if (!file) throw Error(ErrorCode::ParseError, "cannot write " + out + ".manifest.json");
    file << manifest.dump(2) << '\n';
}

json output_list(const std::string& out) {
    if (out.empty()) return json::array();
    return json::array({std::filesystem::path(out).filename().string(),
                        std::filesystem::path(out + ".manifest.json").filename().string()});
}

struct ResolvedModel {
    bool empirical = false;
    double mu = 0.0;
    double sigma2 = 0.0;
    double k_max = 1.0;
    std::optional<ReturnModel> model;  // empirical mode only
    std::size_t n_returns = 0;
};

ResolvedModel resolve_model(const ModelArgs& m) {
    ResolvedModel r;
    if (!m.prices.empty()) {
        if (m.mu || m.sigma) throw UsageError("--prices cannot be combined with --mu/--sigma");
        if (m.k_max) throw UsageError("--k-max is implied by the price data in empirical mode");
        const auto series = load_prices_csv(m.prices, m.price_column);
        const auto returns = returns_from_prices(series);
        r.empirical = true;
        r.model = ReturnModel::from_pmf(pmf_from_returns(returns));
        r.mu = r.model->mu();
        r.sigma2 = r.model->sigma2();
        r.k_max = r.model->bounds().k_max();
        r.n_returns = returns.size();
        return r;
    }
    if (!m.mu || !m.sigma) throw UsageError("give either --prices or both --mu and --sigma");
    if (!(*m.sigma >= 0.0) || !std::isfinite(*m.sigma))
        throw Error(ErrorCode::DomainError, "--sigma must be nonnegative");
    r.mu = *m.mu;
    r.sigma2 = *m.sigma * *m.sigma;
    r.k_max = m.k_max.value_or(1.0);
    return r;
}

int stage_for(const RunArgs& run, const ResolvedModel& model) {
    if (run.stage) return *run.stage;
    if (model.empirical) return static_cast<int>(model.n_returns);
    throw UsageError("--stage is required with --mu/--sigma");
}

json model_parameters(const ModelArgs& m) {
    json p;
    if (!m.prices.empty()) {
        p["prices"] = m.prices;
        p["price_column"] = m.price_column;
    } else {
        p["mu"] = m.mu ? json(*m.mu) : json(nullptr);
        p["sigma"] = m.sigma ? json(*m.sigma) : json(nullptr);
        p["k_max"] = m.k_max.value_or(1.0);
    }
    return p;
}

json model_summary(const ResolvedModel& r) {
    json j;
    j["input"] = r.empirical ? "prices" : "moments";
    j["mu"] = r.mu;
    j["sigma2"] = r.sigma2;
    j["k_max"] = r.k_max;
    if (r.empirical) {
        j["x_min"] = r.model->bounds().x_min;
        j["x_max"] = r.model->bounds().x_max;
        j["n_returns"] = r.n_returns;
    }
    return j;
}

json optimum_json(const OptimalGainResult& r) {
    json j;
    j["k_star"] = r.k_star;
    j["achieved_std"] = r.achieved_std;
    j["target_std"] = r.target_std;
    j["expected_gain"] = r.expected_gain;
    if (r.estimated_mean) j["estimated_mean"] = *r.estimated_mean;
    j["s_max"] = r.s_max;
    j["stage"] = r.stage;
    j["iterations"] = r.iterations;
    return j;
}

SolveSettings settings_for(const BacktestArgs& a, std::size_t default_paths) {
    SolveSettings s;
    s.tol = a.tol.value_or(kDefaultMonteCarloTol);
    s.n_paths = a.run.n_paths ? a.run.n_paths : default_paths;
    s.seed = resolve_seed(a.run.seed);
    s.workers = a.run.threads;
    s.stage = a.run.stage;
    return s;
}

json settings_json(const SolveSettings& s, double v0) {
    json p;
    p["v0"] = v0;
    p["stage"] = s.stage ? json(*s.stage) : json(nullptr);
    p["n_paths"] = s.n_paths;
    p["tol"] = s.tol;
    return p;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

int backtest_single_asset(const BacktestArgs& a, const std::string& command, json extra) {
    if (a.train_prices.empty() || a.test_prices.empty())
        throw UsageError("single-asset backtest needs --train-prices and --test-prices");
    if (!a.target_std) throw UsageError("--target-std is required");
    const auto settings = settings_for(a, kDefaultPaths);
    const auto train = load_prices_csv(a.train_prices, a.price_column);
    const auto test = load_prices_csv(a.test_prices, a.price_column);
    const auto res = backtest_single(train, test, *a.target_std, a.run.v0, settings);

    json params = std::move(extra);
    params["train_prices"] = a.train_prices;
    params["test_prices"] = a.test_prices;
    params["price_column"] = a.price_column;
    params["target_std"] = *a.target_std;
    params.update(settings_json(settings, a.run.v0));

    std::ostringstream csv;
    write_trajectory_csv(csv, res.trajectory);
    if (a.run.out.empty()) {
        std::cout << csv.str();
        return 0;
    }
    write_output(a.run.out, command, params, settings.seed, csv.str());

    json j;
    j["command"] = command;
    j["train"] = {{"n_returns", train.prices.size() - 1},
                  {"x_min", res.train_pmf.bounds().x_min},
                  {"x_max", res.train_pmf.bounds().x_max},
                  {"mu", res.train_pmf.mean()},
                  {"sigma2", res.train_pmf.variance()}};
    j["optimum"] = optimum_json(res.optimum);
    j["test"] = {{"n_returns", test.prices.size() - 1},
                 {"terminal_gain", res.trajectory.gain_loss.back()},
                 {"terminal_value", res.trajectory.v_total.back()}};
    j["seed"] = settings.seed;
    j["outputs"] = output_list(a.run.out);
    emit(j);
    return 0;
}

int backtest_portfolio_spec(const BacktestArgs& a, const std::string& command, json extra) {
    if (!a.train_prices.empty() || !a.test_prices.empty() || a.target_std)
        throw UsageError("--portfolio takes prices and targets from the config file");
    const auto settings = settings_for(a, kDefaultPortfolioPaths);
    const auto entries = load_portfolio_spec(a.portfolio);
    const auto series = load_portfolio_series(entries);
    const auto res = backtest_portfolio(series, a.run.v0, settings);

    json params = std::move(extra);
    params["portfolio"] = a.portfolio;
    params.update(settings_json(settings, a.run.v0));

    std::ostringstream csv;
    write_portfolio_csv(csv, res.config, res.trajectory);
    if (a.run.out.empty()) {
        std::cout << csv.str();
        return 0;
    }
    write_output(a.run.out, command, params, settings.seed, csv.str());

    json assets = json::array();
    for (std::size_t i = 0; i < series.size(); ++i) {
        json asset;
        asset["ticker"] = series[i].ticker;
        asset["x_min"] = res.train_pmfs[i].bounds().x_min;
        asset["x_max"] = res.train_pmfs[i].bounds().x_max;
        asset["optimum"] = optimum_json(res.optima[i]);
        asset["terminal_gain"] = res.trajectory.per_asset[i].gain_loss.back();
        assets.push_back(std::move(asset));
    }
    json j;
    j["command"] = command;
    j["v0"] = a.run.v0;
    j["assets"] = std::move(assets);
    j["terminal_gain"] = res.trajectory.total_gain_loss.back();
    j["max_leverage"] = max_of(res.trajectory.leverage);
    j["seed"] = settings.seed;
    j["outputs"] = output_list(a.run.out);
    emit(j);
    return 0;
}

}  // namespace

int run_curve(const CurveArgs& args) {
    const auto model = resolve_model(args.model);
    const int stage = stage_for(args.run, model);
    std::optional<std::uint64_t> seed;
    MeanStdCurve curve;
    if (model.empirical) {
        seed = resolve_seed(args.run.seed);
        const std::size_t n_paths = args.run.n_paths ? args.run.n_paths : kDefaultPaths;
        curve = build_curve_empirical(*model.model, args.run.v0, stage, args.grid, n_paths, *seed,
                                      args.run.threads);
    } else {
        curve = build_curve(model.mu, model.sigma2, args.run.v0, stage, model.k_max, args.grid);
    }

    std::ostringstream csv;
    write_curve_csv(csv, curve);
    if (args.run.out.empty()) {
        std::cout << csv.str();
        return 0;
    }
    json params = model_parameters(args.model);
    params["v0"] = args.run.v0;
    params["stage"] = stage;
    params["grid"] = args.grid;
    if (model.empirical) params["n_paths"] = args.run.n_paths ? args.run.n_paths : kDefaultPaths;
    write_output(args.run.out, "curve", params, seed, csv.str());

    json j;
    j["command"] = "curve";
    j["model"] = model_summary(model);
    j["stage"] = stage;
    j["points"] = curve.points.size();
    j["s_max"] = curve.points.back().std;
    j["mean_at_k_max"] = curve.points.back().mean;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["outputs"] = output_list(args.run.out);
    emit(j);
    return 0;
}

int run_optimize(const OptimizeArgs& args) {
    const auto model = resolve_model(args.model);
    const int stage = stage_for(args.run, model);
    std::optional<std::uint64_t> seed;
    OptimalGainResult r;
    json params = model_parameters(args.model);
    params["v0"] = args.run.v0;
    params["stage"] = stage;
    params["target_std"] = args.target_std;
    if (model.empirical) {
        seed = resolve_seed(args.run.seed);
        const std::size_t n_paths = args.run.n_paths ? args.run.n_paths : kDefaultPaths;
        const double tol = args.tol.value_or(kDefaultMonteCarloTol);
        params["tol"] = tol;
        params["n_paths"] = n_paths;
        r = solve_optimal_gain_empirical(model.model->pmf(), args.run.v0, stage, args.target_std, tol,
                                         n_paths, *seed, args.run.threads);
    } else {
        const double tol = args.tol.value_or(kDefaultClosedFormTol);
        params["tol"] = tol;
        r = solve_optimal_gain(model.mu, model.sigma2, args.run.v0, stage, model.k_max, args.target_std, tol);
    }

    json j;
    j["command"] = "optimize";
    j["model"] = model_summary(model);
    j["optimum"] = optimum_json(r);
    j["seed"] = seed ? json(*seed) : json(nullptr);
    if (!args.run.out.empty()) write_output(args.run.out, "optimize", params, seed, j.dump(2) + "\n");
    j["outputs"] = output_list(args.run.out);
    emit(j);
    return 0;
}

int run_simulate(const SimulateArgs& args) {
    const auto resolved = resolve_model(args.model);
    const int stage = stage_for(args.run, resolved);
    // with moments only, the law is the symmetric two-point mu +/- sigma
    const ReturnModel model =
        resolved.empirical
            ? *resolved.model
            : ReturnModel::two_point(resolved.mu - std::sqrt(resolved.sigma2), 0.5,
                                     resolved.mu + std::sqrt(resolved.sigma2));
    const auto seed = resolve_seed(args.run.seed);
    const std::size_t n_paths = args.run.n_paths ? args.run.n_paths : kDefaultPaths;
    const auto est = estimate_gain_stats(model, args.alpha, args.k_gain, args.run.v0, stage, n_paths, seed,
                                         args.run.threads);
    const double cf_mean = expected_gain(args.alpha, args.k_gain, stage, model.mu(), args.run.v0);
    const double cf_var = variance_gain(args.alpha, args.k_gain, stage, model.mu(), model.sigma2(), args.run.v0);

    json params = model_parameters(args.model);
    params["alpha"] = args.alpha;
    params["k_gain"] = args.k_gain;
    params["v0"] = args.run.v0;
    params["stage"] = stage;
    params["n_paths"] = n_paths;

    json j;
    j["command"] = "simulate";
    j["model"] = model_summary(resolved);
    j["model"]["law"] = resolved.empirical ? "empirical_pmf" : "two_point";
    j["alpha"] = args.alpha;
    j["k_gain"] = args.k_gain;
    j["stage"] = stage;
    j["n_paths"] = est.n_paths;
    j["seed"] = seed;
    j["mean"] = est.mean;
    j["variance"] = est.variance;
    j["std"] = est.std;
    j["std_error_of_mean"] = est.std_error_of_mean;
    j["closed_form_mean"] = cf_mean;
    j["closed_form_variance"] = cf_var;
    j["z_score"] = est.std_error_of_mean > 0.0 ? (est.mean - cf_mean) / est.std_error_of_mean : 0.0;
    if (!args.run.out.empty()) write_output(args.run.out, "simulate", params, seed, j.dump(2) + "\n");
    j["outputs"] = output_list(args.run.out);
    emit(j);
    return 0;
}

int run_backtest(const BacktestArgs& args) {
    if (!args.portfolio.empty()) return backtest_portfolio_spec(args, "backtest", json::object());
    return backtest_single_asset(args, "backtest", json::object());
}

int run_repro(const ReproArgs& args) {
    const auto& p = args.preset;
    if (p == "toy") {
        const double mu = -0.1, sigma = 0.15, target = 0.3;
        json rows = json::array();
        std::ostringstream csv;
        csv << "stage,k_star,achieved_std,expected_gain,s_max\n";
        for (int stage : {10, 30, 60, 90}) {
            const auto r = solve_optimal_gain(mu, sigma * sigma, 1.0, stage, 1.0, target);
            rows.push_back(optimum_json(r));
            csv << stage << ',' << format_double(r.k_star) << ',' << format_double(r.achieved_std) << ','
                << format_double(r.expected_gain) << ',' << format_double(r.s_max) << '\n';
        }
        json params = {{"preset", p}, {"mu", mu}, {"sigma", sigma}, {"v0", 1.0}, {"target_std", target}};
        if (!args.data.run.out.empty()) write_output(args.data.run.out, "repro", params, std::nullopt, csv.str());
        json j = {{"command", "repro"}, {"preset", p}, {"parameters", params}, {"rows", rows}};
        j["outputs"] = output_list(args.data.run.out);
        emit(j);
        return 0;
    }
    if (p == "uneven-alpha") {
        json rows = json::array();
        std::ostringstream csv;
        csv << "stage,gain_alpha_quarter,gain_alpha_half\n";
        for (int stage = 1; stage <= 10; ++stage) {
            const double quarter = expected_gain(0.25, 0.5, stage, 0.5, 1.0);
            const double half = expected_gain(0.5, 0.5, stage, 0.5, 1.0);
            rows.push_back({{"stage", stage}, {"gain_alpha_quarter", quarter}, {"gain_alpha_half", half}});
            csv << stage << ',' << format_double(quarter) << ',' << format_double(half) << '\n';
        }
        json params = {{"preset", p}, {"k_gain", 0.5}, {"mu", 0.5}, {"v0", 1.0}};
        if (!args.data.run.out.empty()) write_output(args.data.run.out, "repro", params, std::nullopt, csv.str());
        json j = {{"command", "repro"}, {"preset", p}, {"parameters", params}, {"rows", rows}};
        j["outputs"] = output_list(args.data.run.out);
        emit(j);
        return 0;
    }
    if (p == "tsla") {
        BacktestArgs a = args.data;
        if (!a.portfolio.empty()) throw UsageError("the tsla preset takes --train-prices and --test-prices");
        if (a.target_std) throw UsageError("the tsla preset fixes the target std at 0.08");
        a.target_std = 0.08;
        a.run.v0 = 1.0;
        if (!a.run.stage) a.run.stage = 125;
        return backtest_single_asset(a, "repro", json{{"preset", p}});
    }
    if (p == "three-stock") {
        BacktestArgs a = args.data;
        if (a.portfolio.empty()) throw UsageError("the three-stock preset needs --portfolio");
        a.run.v0 = 100.0;
        if (!a.run.stage) a.run.stage = 125;
        return backtest_portfolio_spec(a, "repro", json{{"preset", p}});
    }
    throw UsageError("unknown preset '" + p + "' (toy, uneven-alpha, tsla, three-stock)");
}

}  // namespace dlf::cli
