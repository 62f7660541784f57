#include "dlf/optimizer.hpp"

#include "dlf/analytics.hpp"
#include "dlf/error.hpp"
#include "dlf/format.hpp"
#include "dlf/montecarlo.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace dlf {

namespace {

constexpr int kMaxBisections = 2000;

void check_stage(int stage) {
    if (stage <= 1)
        throw Error(ErrorCode::StageTooSmall,
                    "optimization is defined for stage > 1, got " + std::to_string(stage));
}

void check_k_max(double k_max) {
    if (!(k_max > 0.0 && k_max <= 1.0))
        throw Error(ErrorCode::DomainError, "k_max must lie in (0, 1], got " + format_double(k_max));
}

std::vector<double> gain_grid(double k_max, std::size_t grid_size) {
    if (grid_size < 2) throw Error(ErrorCode::DomainError, "curve grid needs at least 2 points");
    std::vector<double> grid(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i)
        grid[i] = k_max * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    grid.back() = k_max;
    return grid;
}

void check_target(double target_std, double s_max) {
    if (target_std >= s_max)
        throw Error(ErrorCode::TargetTooLarge, "target std " + format_double(target_std) +
                                                   " is not below s_max = " + format_double(s_max) +
                                                   "; the largest admissible gain is k_max");
}

}  // namespace

// --- curve -----------------------------------------------------------------

std::vector<double> MeanStdCurve::grid() const {
    std::vector<double> g;
    g.reserve(points.size());
    for (const auto& p : points) g.push_back(p.k_gain);
    return g;
}

const CurvePoint& MeanStdCurve::nearest_by_std(double s) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (std::abs(points[i].std - s) < std::abs(points[best].std - s)) best = i;
    }
    return points[best];
}

std::optional<CurvePoint> MeanStdCurve::at_std(double s) const {
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        if (!(b.std > a.std)) return std::nullopt;
        if (s >= a.std && s <= b.std) {
            const double t = (s - a.std) / (b.std - a.std);
            return CurvePoint{a.k_gain + t * (b.k_gain - a.k_gain), s, a.mean + t * (b.mean - a.mean)};
        }
    }
    return std::nullopt;
}

std::optional<double> MeanStdCurve::gain_for_mean(double mean) const {
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        if (!(b.mean > a.mean)) return std::nullopt;
        if (mean >= a.mean && mean <= b.mean) {
            const double t = (mean - a.mean) / (b.mean - a.mean);
            return a.k_gain + t * (b.k_gain - a.k_gain);
        }
    }
    return std::nullopt;
}

MeanStdCurve build_curve(double mu, double sigma2, double v0, int stage, double k_max,
                         std::size_t grid_size) {
    check_stage(stage);
    check_k_max(k_max);
    MeanStdCurve curve;
    curve.stage = stage;
    curve.mu = mu;
    curve.sigma2 = sigma2;
    curve.v0 = v0;
    curve.k_max = k_max;
    for (double k : gain_grid(k_max, grid_size)) {
        const auto s = gain_loss_stats(0.5, k, stage, mu, sigma2, v0);
        curve.points.push_back({k, s.std, s.mean});
    }
    return curve;
}

MeanStdCurve build_curve_empirical(const ReturnModel& model, double v0, int stage,
                                   std::size_t grid_size, std::size_t n_paths, std::uint64_t seed,
                                   unsigned workers) {
    check_stage(stage);
    MeanStdCurve curve;
    curve.stage = stage;
    curve.mu = model.mu();
    curve.sigma2 = model.sigma2();
    curve.v0 = v0;
    curve.k_max = model.bounds().k_max();
    for (double k : gain_grid(curve.k_max, grid_size)) {
        const auto est = estimate_gain_stats(model, 0.5, k, v0, stage, n_paths, seed, workers);
        curve.points.push_back({k, est.std, est.mean});
    }
    return curve;
}

void write_curve_csv(std::ostream& out, const MeanStdCurve& curve) {
    out << "k_gain,std,mean\n";
    for (const auto& p : curve.points)
        out << format_double(p.k_gain) << ',' << format_double(p.std) << ',' << format_double(p.mean)
            << '\n';
}

// --- solver ----------------------------------------------------------------

double max_std(double mu, double sigma2, double v0, int stage, double k_max) {
    check_k_max(k_max);
    return std_gain(0.5, k_max, stage, mu, sigma2, v0);
}

BisectionResult bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                                  double hi, double f_lo, double f_hi, double tol) {
    if (!(lo <= hi) || !(f_lo <= target) || !(target <= f_hi))
        throw Error(ErrorCode::NonMonotoneEstimate, "bisection bracket does not contain the target");
    BisectionResult res;
    while (res.iterations < kMaxBisections) {
        ++res.iterations;
        const double mid = lo + 0.5 * (hi - lo);
        const double fm = f(mid);
        if (fm < f_lo || fm > f_hi)
            throw Error(ErrorCode::NonMonotoneEstimate,
                        "std estimate " + format_double(fm) + " at K = " + format_double(mid) +
                            " leaves the bracket [" + format_double(f_lo) + ", " + format_double(f_hi) +
                            "]; raise the number of paths");
        res.x = mid;
        res.fx = fm;
        if (std::abs(fm - target) <= tol) return res;
        if (fm < target) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) return res;
    }
    return res;
}

OptimalGainResult solve_optimal_gain(double mu, double sigma2, double v0, int stage, double k_max,
                                     double target_std, double tol) {
    check_stage(stage);
    check_k_max(k_max);
    if (!(target_std > 0.0))
        throw Error(ErrorCode::TargetNonpositive, "target std must be positive, got " + format_double(target_std));
    if (mu == 0.0)
        throw Error(ErrorCode::ZeroDrift,
                    "mu = 0 makes the balanced expected gain identically zero, so K* is not unique");
    if (sigma2 == 0.0)
        throw Error(ErrorCode::ZeroVolatility, "sigma = 0 makes the gain-loss std identically zero");
    if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tolerance must be positive");

    const double s_max = max_std(mu, sigma2, v0, stage, k_max);
    check_target(target_std, s_max);

    auto f = [&](double k) { return std_gain(0.5, k, stage, mu, sigma2, v0); };
    const auto root = bisect_increasing(f, target_std, 0.0, k_max, 0.0, s_max, tol);

    OptimalGainResult res;
    res.k_star = root.x;
    res.achieved_std = root.fx;
    res.expected_gain = expected_gain(0.5, root.x, stage, mu, v0);
    res.target_std = target_std;
    res.s_max = s_max;
    res.stage = stage;
    res.iterations = root.iterations;
    return res;
}

OptimalGainResult solve_optimal_gain_empirical(const EmpiricalPMF& pmf, double v0, int stage,
                                               double target_std, double tol, std::size_t n_paths,
                                               std::uint64_t seed, unsigned workers) {
    check_stage(stage);
    if (n_paths < 1000)
        throw Error(ErrorCode::DomainError, "empirical solve needs at least 1000 paths");
    if (!(target_std > 0.0))
        throw Error(ErrorCode::TargetNonpositive, "target std must be positive, got " + format_double(target_std));
    if (pmf.mean() == 0.0)
        throw Error(ErrorCode::ZeroDrift,
                    "PMF mean is zero, so the balanced expected gain is identically zero");
    if (pmf.variance() == 0.0)
        throw Error(ErrorCode::ZeroVolatility, "PMF is degenerate; the gain-loss std is identically zero");
    if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tolerance must be positive");

    const auto model = ReturnModel::from_pmf(pmf);
    const double k_max = model.bounds().k_max();
    auto f = [&](double k) {
        return estimate_gain_stats(model, 0.5, k, v0, stage, n_paths, seed, workers).std;
    };
    const double s_max = f(k_max);
    check_target(target_std, s_max);

    const auto root = bisect_increasing(f, target_std, 0.0, k_max, 0.0, s_max, tol);
    const auto at_root = estimate_gain_stats(model, 0.5, root.x, v0, stage, n_paths, seed, workers);

    OptimalGainResult res;
    res.k_star = root.x;
    res.achieved_std = root.fx;
    res.expected_gain = expected_gain(0.5, root.x, stage, pmf.mean(), v0);
    res.target_std = target_std;
    res.s_max = s_max;
    res.stage = stage;
    res.iterations = root.iterations;
    res.estimated_mean = at_root.mean;
    return res;
}

}  // namespace dlf
