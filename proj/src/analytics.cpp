#include "dlf/analytics.hpp"

#include "dlf/error.hpp"
#include "dlf/format.hpp"

#include <algorithm>
#include <cmath>

namespace dlf {

namespace {

constexpr double kClampTol = 1e-12;

void check_common(double alpha, double k_gain, int stage, double mu, double v0) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(ErrorCode::DomainError, "alpha must lie in [0, 1], got " + format_double(alpha));
    if (!(k_gain >= 0.0 && k_gain <= 1.0))
        throw Error(ErrorCode::DomainError, "gain must lie in [0, 1], got " + format_double(k_gain));
    if (stage < 0) throw Error(ErrorCode::DomainError, "stage must be nonnegative");
    if (!std::isfinite(mu) || !(mu > -1.0))
        throw Error(ErrorCode::DomainError, "mean return must exceed -1, got " + format_double(mu));
    if (k_gain * mu > 1.0)
        throw Error(ErrorCode::DomainError, "K*mu = " + format_double(k_gain * mu) +
                                                " exceeds 1; gain is not admissible for this drift");
    if (!(v0 > 0.0) || !std::isfinite(v0))
        throw Error(ErrorCode::DomainError, "initial account must be positive");
}

// (1 + t)^k - 1 without cancellation for small t.
double pow_minus_one(double t, int k) {
    if (k == 0) return 0.0;
    if (t <= -1.0) return -1.0;
    return std::expm1(static_cast<double>(k) * std::log1p(t));
}

// (base + delta)^k - base^k, as base^k * ((1 + delta/base)^k - 1) when delta is small.
double pow_diff(double base, double delta, int k) {
    if (k == 0) return 0.0;
    if (base == 0.0) return std::pow(delta, k);
    const double ratio = std::max(delta / base, -1.0);
    // no cancellation to guard against, and base^k may underflow
    if (std::abs(ratio) > 0.5) return std::pow(base + delta, k) - std::pow(base, k);
    return std::pow(base, k) * pow_minus_one(ratio, k);
}

double checked(double x, const char* what) {
    if (!std::isfinite(x))
        throw Error(ErrorCode::Overflow, std::string(what) + " overflowed double precision");
    return x;
}

}  // namespace

double expected_gain_theta(double alpha, double theta, int stage) {
    return alpha * pow_minus_one(theta, stage) + (1.0 - alpha) * pow_minus_one(-theta, stage);
}

double expected_gain(double alpha, double k_gain, int stage, double mu, double v0) {
    check_common(alpha, k_gain, stage, mu, v0);
    return checked(v0 * expected_gain_theta(alpha, k_gain * mu, stage), "expected gain");
}

double variance_gain(double alpha, double k_gain, int stage, double mu, double sigma2, double v0) {
    check_common(alpha, k_gain, stage, mu, v0);
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
        throw Error(ErrorCode::DomainError, "return variance must be nonnegative");
    const double theta = k_gain * mu;
    const double d = k_gain * k_gain * sigma2;
    const double second = k_gain * k_gain * (sigma2 + mu * mu);
    if (1.0 - second < -kClampTol)
        throw Error(ErrorCode::DomainError,
                    "1 - K^2 E[X^2] = " + format_double(1.0 - second) + " < 0; gain not admissible");
    if (stage == 0 || d == 0.0) return 0.0;

    const double a = 1.0 + theta;
    const double b = 1.0 - theta;
    // E[(1 +- K X)^2] = (1 +- K mu)^2 + K^2 sigma^2 ; E[(1+KX)(1-KX)] = ab - K^2 sigma^2
    const double var_plus = pow_diff(a * a, d, stage);
    const double var_minus = pow_diff(b * b, d, stage);
    const double cov = pow_diff(a * b, -d, stage);

    const double w_plus = alpha * alpha;
    const double w_minus = (1.0 - alpha) * (1.0 - alpha);
    const double w_cross = 2.0 * alpha * (1.0 - alpha);
    const double v0sq = v0 * v0;
    double var = v0sq * (w_plus * var_plus + w_minus * var_minus + w_cross * cov);
    checked(var, "variance");

    if (var < 0.0) {
        const double scale = std::max(1.0, v0sq * (w_plus * var_plus + w_minus * var_minus));
        if (var < -kClampTol * scale)
            throw Error(ErrorCode::InternalConsistency,
                        "gain-loss variance evaluated to " + format_double(var));
        var = 0.0;
    }
    return var;
}

double std_gain(double alpha, double k_gain, int stage, double mu, double sigma2, double v0) {
    return std::sqrt(variance_gain(alpha, k_gain, stage, mu, sigma2, v0));
}

GainLossStats gain_loss_stats(double alpha, double k_gain, int stage, double mu, double sigma2,
                              double v0) {
    GainLossStats s;
    s.mean = expected_gain(alpha, k_gain, stage, mu, v0);
    s.variance = variance_gain(alpha, k_gain, stage, mu, sigma2, v0);
    s.std = std::sqrt(s.variance);
    s.stage = stage;
    return s;
}

RpeCheck check_rpe(double k_gain, int stage, double mu, double v0) {
    if (stage <= 1)
        throw Error(ErrorCode::StageTooSmall, "RPE is defined for stage > 1, got " + std::to_string(stage));
    const double value = expected_gain(0.5, k_gain, stage, mu, v0);
    return RpeCheck{value, value > 0.0};
}

std::optional<RpeCounterexample> find_rpe_counterexample(double alpha, double k_gain, int stage) {
    if (stage <= 1)
        throw Error(ErrorCode::StageTooSmall, "RPE is defined for stage > 1, got " + std::to_string(stage));
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw Error(ErrorCode::DomainError, "alpha must lie in [0, 1], got " + format_double(alpha));
    if (!(k_gain > 0.0 && k_gain <= 1.0))
        throw Error(ErrorCode::DomainError, "counterexample search needs 0 < K <= 1");
    if (alpha == 0.5) return std::nullopt;

    // d/dtheta G at theta = 0 is k(2 alpha - 1): descend on the side where it is negative
    const double sign = alpha < 0.5 ? 1.0 : -1.0;
    for (double magnitude = 1.0; magnitude > 0.0; magnitude *= 0.5) {
        const double theta = sign * magnitude;
        // theta = K mu with mu > -1 requires theta > -K
        if (theta <= -k_gain) continue;
        const double g = expected_gain_theta(alpha, theta, stage);
        if (g < 0.0) return RpeCounterexample{alpha, theta, theta / k_gain, stage, g};
    }
    return std::nullopt;
}

bool check_robust_growth(double k_gain, int stage, double mu, double v0) {
    if (stage < 1)
        throw Error(ErrorCode::StageTooSmall, "growth check needs stage >= 1");
    const double now = expected_gain(0.5, k_gain, stage, mu, v0);
    const double next = expected_gain(0.5, k_gain, stage + 1, mu, v0);
    return next >= now - kClampTol * std::max(v0, std::abs(now));
}

}  // namespace dlf
