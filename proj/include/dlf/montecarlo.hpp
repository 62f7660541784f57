#pragma once

#include "dlf/analytics.hpp"
#include "dlf/returns.hpp"

#include <cstdint>
#include <vector>

namespace dlf {

/// Sample statistics of G(alpha, K, stage) over simulated paths. The
/// variance uses the unbiased 1/(n-1) estimator.
struct McEstimate {
    double mean = 0.0;
    double variance = 0.0;
    double std = 0.0;
    double std_error_of_mean = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    int stage = 0;
};

inline constexpr std::size_t kDefaultPaths = 50'000;
inline constexpr std::size_t kDefaultPortfolioPaths = 20'000;

/// Paths are generated in fixed-size batches, batch b drawing from
/// derive_seed(seed, b), so the result is bit-identical for any `workers`
/// (0 means hardware concurrency). The return paths depend only on
/// (model, stage, n_paths, seed), which makes calls that differ only in
/// alpha or K use common random numbers.
McEstimate estimate_gain_stats(const ReturnModel& model, double alpha, double k_gain, double v0,
                               int stage, std::size_t n_paths, std::uint64_t seed,
                               unsigned workers = 0);

/// Per-path terminal gains in path order, as used by estimate_gain_stats.
std::vector<double> simulate_terminal_gains(const ReturnModel& model, double alpha, double k_gain,
                                            double v0, int stage, std::size_t n_paths,
                                            std::uint64_t seed, unsigned workers = 0);

inline constexpr std::size_t kMaxEnumeratedPaths = 10'000'000;

/// Exact mean and variance of G by enumerating every return sequence of
/// length `stage` with its probability. Throws TooLarge when
/// atoms^stage > kMaxEnumeratedPaths.
GainLossStats estimate_exact_small(const ReturnModel& model, double alpha, double k_gain, double v0,
                                   int stage);

}  // namespace dlf
