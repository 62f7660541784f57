#pragma once

#include <optional>

namespace dlf {

/// Moments of the cumulative gain-loss G(alpha, K, k) = V(k) - V0 for
/// independent returns with common mean mu and variance sigma2.
struct GainLossStats {
    double mean = 0.0;
    double variance = 0.0;
    double std = 0.0;
    int stage = 0;
};

// All functions below are model-free: they see the return distribution only
// through (mu, sigma2). Inputs are checked against the admissible domain
// alpha in [0,1], 0 <= K <= 1, mu > -1, K*mu <= 1, v0 > 0, stage >= 0, and
// throw DomainError outside it.

double expected_gain(double alpha, double k_gain, int stage, double mu, double v0);

/// Evaluated in the covariance-split form
///   alpha^2 var(R+) + (1-alpha)^2 var(R-) + 2 alpha (1-alpha) cov(R+, R-)
/// with each x^k - y^k term computed through expm1/log1p, which keeps full
/// relative accuracy for small K where the expanded six-term sum cancels.
/// Negative results within 1e-12 (relative to the term scale) are clamped.
double variance_gain(double alpha, double k_gain, int stage, double mu, double sigma2, double v0);

double std_gain(double alpha, double k_gain, int stage, double mu, double sigma2, double v0);

GainLossStats gain_loss_stats(double alpha, double k_gain, int stage, double mu, double sigma2,
                              double v0);

/// Expected gain for V0 = 1 written in the scaled drift theta = K*mu:
/// alpha (1+theta)^k + (1-alpha)(1-theta)^k - 1.
double expected_gain_theta(double alpha, double theta, int stage);

struct RpeCheck {
    double value = 0.0;  // expected gain at alpha = 1/2
    bool positive = false;
};

/// Expected gain of the balanced controller. Throws StageTooSmall for stage <= 1.
RpeCheck check_rpe(double k_gain, int stage, double mu, double v0);

/// Witness that alpha != 1/2 loses the robust positive expectation property.
struct RpeCounterexample {
    double alpha = 0.0;
    double theta = 0.0;  // K * mu
    double mu = 0.0;     // theta / K, always > -1
    int stage = 0;
    double gain_value = 0.0;  // expected gain at V0 = 1, < 0
};

/// Signed halving search on theta: theta > 0 when alpha < 1/2, theta < 0 when
/// alpha > 1/2, starting from |theta| = 1. Returns nullopt for alpha == 1/2
/// (and, which would indicate a bug, if |theta| underflows first).
std::optional<RpeCounterexample> find_rpe_counterexample(double alpha, double k_gain, int stage);

/// G(1/2, K, stage+1) >= G(1/2, K, stage) up to 1e-12.
bool check_robust_growth(double k_gain, int stage, double mu, double v0);

}  // namespace dlf
