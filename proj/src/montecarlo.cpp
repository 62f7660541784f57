#include "dlf/montecarlo.hpp"

#include "dlf/dynamics.hpp"
#include "dlf/error.hpp"
#include "dlf/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace dlf {

namespace {

constexpr std::size_t kBatchPaths = 1024;

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

void run_batches(const ReturnModel& model, const ControllerConfig& config, int stage,
                 std::uint64_t seed, std::span<double> gains, unsigned workers) {
    const std::size_t n_batches = (gains.size() + kBatchPaths - 1) / kBatchPaths;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        std::vector<double> path(static_cast<std::size_t>(stage));
        try {
            for (std::size_t b = next.fetch_add(1); b < n_batches; b = next.fetch_add(1)) {
                Rng rng(derive_seed(seed, b));
                const std::size_t begin = b * kBatchPaths;
                const std::size_t end = std::min(begin + kBatchPaths, gains.size());
                for (std::size_t i = begin; i < end; ++i) {
                    model.sample_into(rng, path);
                    gains[i] = terminal_gain(config, path);
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n_batches);
        }
    };

    unsigned n_workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
    n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, n_batches));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<double> simulate_terminal_gains(const ReturnModel& model, double alpha, double k_gain,
                                            double v0, int stage, std::size_t n_paths,
                                            std::uint64_t seed, unsigned workers) {
    if (stage < 1) throw Error(ErrorCode::StageTooSmall, "Monte-Carlo needs stage >= 1");
    if (n_paths < 2) throw Error(ErrorCode::DomainError, "Monte-Carlo needs at least 2 paths");
    const auto config = ControllerConfig::make(alpha, k_gain, v0, model.bounds());
    std::vector<double> gains(n_paths);
    run_batches(model, config, stage, seed, gains, workers);
    return gains;
}

McEstimate estimate_gain_stats(const ReturnModel& model, double alpha, double k_gain, double v0,
                               int stage, std::size_t n_paths, std::uint64_t seed,
                               unsigned workers) {
    const auto gains =
        simulate_terminal_gains(model, alpha, k_gain, v0, stage, n_paths, seed, workers);

    // sequential reduction in path order keeps the result independent of scheduling
    CompensatedSum sum;
    for (double g : gains) sum.add(g);
    const double n = static_cast<double>(n_paths);
    const double mean = sum.value() / n;
    CompensatedSum sq;
    for (double g : gains) {
        const double d = g - mean;
        sq.add(d * d);
    }
    McEstimate est;
    est.mean = mean;
    est.variance = sq.value() / (n - 1.0);
    est.std = std::sqrt(est.variance);
    est.std_error_of_mean = est.std / std::sqrt(n);
    est.n_paths = n_paths;
    est.seed = seed;
    est.stage = stage;
    return est;
}

GainLossStats estimate_exact_small(const ReturnModel& model, double alpha, double k_gain, double v0,
                                   int stage) {
    if (stage < 0) throw Error(ErrorCode::DomainError, "stage must be nonnegative");
    const auto config = ControllerConfig::make(alpha, k_gain, v0, model.bounds());
    const auto& atoms = model.pmf().atoms();
    const std::size_t m = atoms.size();

    double count = 1.0;
    for (int j = 0; j < stage; ++j) {
        count *= static_cast<double>(m);
        if (count > static_cast<double>(kMaxEnumeratedPaths))
            throw Error(ErrorCode::TooLarge, std::to_string(m) + " atoms over " + std::to_string(stage) +
                                                 " stages exceeds the enumeration limit");
    }

    // log(1 + K x) and log(1 - K x) per atom; G = V0 (a expm1(L+) + (1-a) expm1(L-))
    std::vector<double> log_up(m), log_down(m);
    for (std::size_t i = 0; i < m; ++i) {
        log_up[i] = std::log1p(k_gain * atoms[i].value);
        log_down[i] = std::log1p(-k_gain * atoms[i].value);
    }

    auto for_each_sequence = [&](auto&& visit) {
        // iterative odometer over index sequences
        std::vector<std::size_t> idx(static_cast<std::size_t>(stage), 0);
        while (true) {
            double p = 1.0, lu = 0.0, ld = 0.0;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                p *= atoms[idx[j]].weight;
                lu += log_up[idx[j]];
                ld += log_down[idx[j]];
            }
            const double g =
                config.v0 * (config.alpha * std::expm1(lu) + (1.0 - config.alpha) * std::expm1(ld));
            visit(p, g);
            std::size_t j = 0;
            while (j < idx.size() && ++idx[j] == m) idx[j++] = 0;
            if (j == idx.size()) break;
        }
    };

    CompensatedSum mean_sum;
    for_each_sequence([&](double p, double g) { mean_sum.add(p * g); });
    const double mean = mean_sum.value();
    CompensatedSum var_sum;
    for_each_sequence([&](double p, double g) { var_sum.add(p * (g - mean) * (g - mean)); });

    GainLossStats s;
    s.mean = mean;
    s.variance = var_sum.value();
    s.std = std::sqrt(s.variance);
    s.stage = stage;
    return s;
}

}  // namespace dlf
