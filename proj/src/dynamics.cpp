#include "dlf/dynamics.hpp"

#include "dlf/error.hpp"
#include "dlf/format.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace dlf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 1 - K*x_max can be exactly zero; the recursion then lands a few ulps
// below zero. Anything larger than rounding is a real violation.
double clamp_rounding(double v, double scale) {
    if (v >= 0.0) return v;
    if (v > -16.0 * kEps * scale) return 0.0;
    throw Error(ErrorCode::InternalConsistency,
                "sub-account went negative (" + format_double(v) + ") under an admissible gain");
}

void check_path(const ControllerConfig& config, std::span<const double> path) {
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (!config.bounds.contains(path[k]))
            throw Error(ErrorCode::ReturnOutOfBounds,
                        "return " + format_double(path[k]) + " at stage " + std::to_string(k) +
                            " outside [" + format_double(config.bounds.x_min) + ", " +
                            format_double(config.bounds.x_max) + "]");
    }
}

}  // namespace

ControllerConfig ControllerConfig::make(double alpha, double k_gain, double v0,
                                        const ReturnBounds& bounds) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(ErrorCode::DomainError, "alpha must lie in [0, 1], got " + format_double(alpha));
    if (!(v0 > 0.0) || !std::isfinite(v0))
        throw Error(ErrorCode::DomainError, "initial account must be positive, got " + format_double(v0));
    const double k_max = bounds.k_max();
    if (!(k_gain >= 0.0 && k_gain <= k_max))
        throw Error(ErrorCode::InadmissibleGain, "gain " + format_double(k_gain) +
                                                     " outside admissible range [0, " +
                                                     format_double(k_max) + "]");
    return ControllerConfig{alpha, k_gain, v0, k_max, bounds};
}

AccountState advance(const AccountState& state, double k_gain, double x) {
    const double u_long = k_gain * state.v_long;
    const double u_short = -k_gain * state.v_short;
    AccountState next{state.v_long + x * u_long, state.v_short + x * u_short};
    next.v_short = clamp_rounding(next.v_short, state.v_short);
    next.v_long = clamp_rounding(next.v_long, state.v_long);
    if (!std::isfinite(next.v_long) || !std::isfinite(next.v_short))
        throw Error(ErrorCode::Overflow, "account value overflowed double precision");
    return next;
}

AccountTrajectory simulate(const ControllerConfig& config, std::span<const double> path) {
    check_path(config, path);
    const std::size_t n = path.size() + 1;
    AccountTrajectory traj;
    traj.v0 = config.v0;
    traj.v_long.reserve(n);
    traj.v_short.reserve(n);
    traj.v_total.reserve(n);
    traj.gain_loss.reserve(n);
    traj.controls.reserve(n);

    const AccountState start{config.alpha * config.v0, (1.0 - config.alpha) * config.v0};
    AccountState state = start;
    for (std::size_t k = 0; k < n; ++k) {
        traj.v_long.push_back(state.v_long);
        traj.v_short.push_back(state.v_short);
        traj.v_total.push_back(state.v_long + state.v_short);
        // summed per sub-account so K = 0 gives exactly zero for any alpha
        traj.gain_loss.push_back((state.v_long - start.v_long) + (state.v_short - start.v_short));
        const double u_long = config.k_gain * state.v_long;
        const double u_short = -config.k_gain * state.v_short;
        traj.controls.push_back({u_long, u_short, u_long + u_short});
        if (k + 1 < n) state = advance(state, config.k_gain, path[k]);
    }
    return traj;
}

double terminal_gain(const ControllerConfig& config, std::span<const double> path) {
    check_path(config, path);
    const AccountState start{config.alpha * config.v0, (1.0 - config.alpha) * config.v0};
    AccountState state = start;
    for (double x : path) state = advance(state, config.k_gain, x);
    return (state.v_long - start.v_long) + (state.v_short - start.v_short);
}

CashFinancingAudit audit_cash_financing(const AccountTrajectory& traj, double k_gain) {
    CashFinancingAudit audit;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double u = std::abs(traj.controls[k].u_total);
        const double v = traj.v_total[k];
        if (v > 0.0) {
            audit.max_ratio = std::max(audit.max_ratio, u / v);
        } else if (u > 0.0) {
            audit.max_ratio = std::numeric_limits<double>::infinity();
        }
    }
    const double slack = 4.0 * kEps * std::max(k_gain, 1.0);
    audit.within_bound = audit.max_ratio <= k_gain + slack && k_gain <= 1.0;
    return audit;
}

void write_trajectory_csv(std::ostream& out, const AccountTrajectory& traj) {
    out << "k,v_long,v_short,v_total,gain_loss,u_long,u_short\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << k << ',' << format_double(traj.v_long[k]) << ',' << format_double(traj.v_short[k])
            << ',' << format_double(traj.v_total[k]) << ',' << format_double(traj.gain_loss[k]) << ','
            << format_double(traj.controls[k].u_long) << ',' << format_double(traj.controls[k].u_short)
            << '\n';
    }
}

}  // namespace dlf
