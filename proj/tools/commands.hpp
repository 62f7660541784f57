#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dlf::cli {

inline constexpr std::uint64_t kDefaultSeed = 2019;

/// Bad flag combinations found after parsing; exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Return model given either by moments or by a price file.
struct ModelArgs {
    std::optional<double> mu;
    std::optional<double> sigma;
    std::string prices;
    std::string price_column = "adj_close";
    std::optional<double> k_max;
};

struct RunArgs {
    double v0 = 1.0;
    std::optional<int> stage;
    std::size_t n_paths = 0;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string out;
};

struct CurveArgs {
    ModelArgs model;
    RunArgs run;
    std::size_t grid = 101;
};

struct OptimizeArgs {
    ModelArgs model;
    RunArgs run;
    double target_std = 0.0;
    std::optional<double> tol;
};

struct SimulateArgs {
    ModelArgs model;
    RunArgs run;
    double alpha = 0.5;
    double k_gain = 0.0;
};

struct BacktestArgs {
    std::string train_prices;
    std::string test_prices;
    std::string price_column = "adj_close";
    std::string portfolio;
    std::optional<double> target_std;
    std::optional<double> tol;
    RunArgs run;
};

struct ReproArgs {
    std::string preset;
    BacktestArgs data;
};

int run_curve(const CurveArgs& args);
int run_optimize(const OptimizeArgs& args);
int run_simulate(const SimulateArgs& args);
int run_backtest(const BacktestArgs& args);
int run_repro(const ReproArgs& args);

}  // namespace dlf::cli
