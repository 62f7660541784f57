#pragma once

#include "dlf/returns.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace dlf {

struct CurvePoint {
    double k_gain = 0.0;
    double std = 0.0;
    double mean = 0.0;
};

/// The curve K -> (std G(1/2,K,k), E G(1/2,K,k)) sampled on an equally
/// spaced grid over [0, k_max].
struct MeanStdCurve {
    std::vector<CurvePoint> points;
    int stage = 0;
    double alpha = 0.5;
    double mu = 0.0;
    double sigma2 = 0.0;
    double v0 = 1.0;
    double k_max = 1.0;

    std::vector<double> grid() const;

    /// Point with std closest to `s` (first one on ties).
    const CurvePoint& nearest_by_std(double s) const;

    /// Linear interpolation of the curve at std = s; nullopt outside the
    /// sampled std range or when std is not strictly increasing.
    std::optional<CurvePoint> at_std(double s) const;

    /// Inverse map mean -> K by linear interpolation; nullopt outside the
    /// sampled range or when the means are not strictly increasing.
    std::optional<double> gain_for_mean(double mean) const;
};

MeanStdCurve build_curve(double mu, double sigma2, double v0, int stage, double k_max,
                         std::size_t grid_size);

/// Same grid, with mean and std estimated by Monte-Carlo from `model`
/// (one seed for every K, i.e. common random numbers).
MeanStdCurve build_curve_empirical(const ReturnModel& model, double v0, int stage,
                                   std::size_t grid_size, std::size_t n_paths, std::uint64_t seed,
                                   unsigned workers = 0);

/// Columns: k_gain, std, mean.
void write_curve_csv(std::ostream& out, const MeanStdCurve& curve);

struct OptimalGainResult {
    double k_star = 0.0;
    double achieved_std = 0.0;
    double expected_gain = 0.0;  // closed-form E G(1/2, k_star, stage)
    double target_std = 0.0;
    double s_max = 0.0;
    int stage = 0;
    int iterations = 0;
    std::optional<double> estimated_mean;  // Monte-Carlo mean at k_star (empirical solves)
};

inline constexpr double kDefaultClosedFormTol = 1e-9;
inline constexpr double kDefaultMonteCarloTol = 1e-3;

/// std G(1/2, k_max, stage), the ceiling for the target std.
double max_std(double mu, double sigma2, double v0, int stage, double k_max);

struct BisectionResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

/// Finds x in [lo, hi] with |f(x) - target| <= tol for an increasing f,
/// given f(lo) <= target <= f(hi). Stops early when the bracket shrinks to a
/// few ulps. Throws NonMonotoneEstimate if a probe falls outside
/// [f(lo), f(hi)].
BisectionResult bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                                  double hi, double f_lo, double f_hi, double tol);

/// Largest admissible K whose gain-loss std does not exceed `target_std`,
/// at alpha = 1/2. Requires stage > 1, mu != 0, sigma2 > 0 and
/// 0 < target_std < s_max.
OptimalGainResult solve_optimal_gain(double mu, double sigma2, double v0, int stage, double k_max,
                                     double target_std, double tol = kDefaultClosedFormTol);

/// As solve_optimal_gain, with the std curve estimated by Monte-Carlo from
/// the PMF (n_paths >= 1000, same seed at every probe).
OptimalGainResult solve_optimal_gain_empirical(const EmpiricalPMF& pmf, double v0, int stage,
                                               double target_std, double tol, std::size_t n_paths,
                                               std::uint64_t seed, unsigned workers = 0);

}  // namespace dlf
