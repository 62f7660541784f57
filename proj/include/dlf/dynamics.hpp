#pragma once

#include "dlf/returns.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace dlf {

/// Double linear feedback controller: the account is split into a long
/// sub-account alpha*V0 and a short sub-account (1-alpha)*V0, traded with
/// u_L = K*V_L and u_S = -K*V_S.
struct ControllerConfig {
    double alpha = 0.5;
    double k_gain = 0.0;
    double v0 = 1.0;
    double k_max = 1.0;  // always min(1, 1/bounds.x_max)
    ReturnBounds bounds;

    /// Throws InadmissibleGain unless 0 <= k_gain <= bounds.k_max().
    static ControllerConfig make(double alpha, double k_gain, double v0, const ReturnBounds& bounds);
};

struct Controls {
    double u_long = 0.0;
    double u_short = 0.0;
    double u_total = 0.0;
};

/// Account values and controls for stages 0..N. Row k holds V(k) and the
/// control applied over [k, k+1); the last row's control is the one that
/// would be applied next.
struct AccountTrajectory {
    double v0 = 0.0;
    std::vector<double> v_long;
    std::vector<double> v_short;
    std::vector<double> v_total;
    std::vector<double> gain_loss;
    std::vector<Controls> controls;

    std::size_t size() const noexcept { return v_total.size(); }
};

struct AccountState {
    double v_long = 0.0;
    double v_short = 0.0;
};

/// One period of the account recursion. Shared by `simulate` and the
/// Monte-Carlo kernel so both run the same arithmetic.
AccountState advance(const AccountState& state, double k_gain, double x);

AccountTrajectory simulate(const ControllerConfig& config, std::span<const double> path);

/// G(N) = V(N) - V0 without storing the trajectory.
double terminal_gain(const ControllerConfig& config, std::span<const double> path);

struct CashFinancingAudit {
    double max_ratio = 0.0;  // max_k |u(k)| / V(k)
    bool within_bound = true;
};

/// Checks |u(k)| <= K V(k) <= V(k) at every stage.
CashFinancingAudit audit_cash_financing(const AccountTrajectory& traj, double k_gain);

/// Columns: k, v_long, v_short, v_total, gain_loss, u_long, u_short.
void write_trajectory_csv(std::ostream& out, const AccountTrajectory& traj);

}  // namespace dlf
