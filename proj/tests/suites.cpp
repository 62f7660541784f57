#include "suites.hpp"

#include "oracles.hpp"

#include "dlf/analytics.hpp"
#include "dlf/dynamics.hpp"
#include "dlf/error.hpp"
#include "dlf/format.hpp"
#include "dlf/montecarlo.hpp"
#include "dlf/optimizer.hpp"
#include "dlf/returns.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace suites {

namespace {

using oracle::ld;

struct Draw {
    std::mt19937_64 gen;
    explicit Draw(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

class Tally {
public:
    void record(bool ok, const std::string& what) {
        ++out_.checked;
        if (!ok) {
            ++out_.failures;
            if (first_.empty()) first_ = what;
        }
    }
    Outcome finish(std::string summary) {
        out_.pass = out_.failures == 0;
        out_.detail = std::to_string(out_.checked - out_.failures) + "/" + std::to_string(out_.checked) +
                      " ok" + (summary.empty() ? "" : "; " + summary) +
                      (first_.empty() ? "" : "; first failure: " + first_);
        return out_;
    }

private:
    Outcome out_;
    std::string first_;
};

std::string f(double x) { return dlf::format_double(x); }

std::string tuple(std::initializer_list<std::pair<const char*, double>> items) {
    std::string s = "(";
    for (const auto& [name, value] : items) {
        if (s.size() > 1) s += ", ";
        s += std::string(name) + "=" + f(value);
    }
    return s + ")";
}

dlf::EmpiricalPMF random_pmf(Draw& d, int n_atoms, double lo, double hi) {
    std::vector<dlf::Atom> atoms;
    double total = 0.0;
    for (int i = 0; i < n_atoms; ++i) {
        atoms.push_back({d.uniform(lo, hi), d.uniform(0.05, 1.0)});
        total += atoms.back().weight;
    }
    for (auto& a : atoms) a.weight /= total;
    return dlf::EmpiricalPMF::from_atoms(std::move(atoms));
}

}  // namespace

Outcome closed_form_vs_enumeration(int instances, std::uint64_t seed) {
    // Relative error with a floor: a mean below 1e-9 V0 (variance below
    // 1e-18 V0^2) is compared in absolute terms at that scale, where both
    // sides are already dominated by summation rounding.
    constexpr double tol = 1e-10;
    Draw d(seed);
    Tally t;
    double worst_mean = 0.0, worst_var = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int n_atoms = d.integer(1, 8);
        const auto pmf = random_pmf(d, n_atoms, -0.6, 0.9);
        const auto model = dlf::ReturnModel::from_pmf(pmf);
        int stage = d.integer(0, 8);
        while (stage > 0 && std::pow(static_cast<double>(pmf.size()), stage) > 2e5) --stage;
        const double alpha = d.uniform(0.0, 1.0);
        const double k = model.bounds().k_max() * d.uniform(0.0, 1.0);
        const double v0 = d.uniform(0.5, 10.0);

        const auto exact = dlf::estimate_exact_small(model, alpha, k, v0, stage);
        const double mean = dlf::expected_gain(alpha, k, stage, model.mu(), v0);
        const double var = dlf::variance_gain(alpha, k, stage, model.mu(), model.sigma2(), v0);
        const double em = oracle::rel_err(mean, exact.mean, 1e-9 * v0);
        const double ev = oracle::rel_err(var, exact.variance, 1e-18 * v0 * v0);
        worst_mean = std::max(worst_mean, em);
        worst_var = std::max(worst_var, ev);
        t.record(em <= tol && ev <= tol,
                 tuple({{"atoms", double(n_atoms)}, {"alpha", alpha}, {"K", k}, {"k", double(stage)},
                        {"mean_err", em}, {"var_err", ev}}));
    }
    return t.finish("worst relative error mean " + f(worst_mean) + ", variance " + f(worst_var));
}

Outcome uneven_alpha_golden() {
    Tally t;
    // K = 1/2, mu = 1/2 gives K mu = 1/4
    const double g = dlf::expected_gain(0.25, 0.5, 2, 0.5, 1.0);
    const double via_theta = dlf::expected_gain_theta(0.25, 0.25, 2);
    t.record(std::abs(g - (-0.1875)) <= 1e-12, "expected_gain = " + f(g));
    t.record(std::abs(via_theta - (-0.1875)) <= 1e-12, "expected_gain_theta = " + f(via_theta));
    t.record(std::round(g * 1000.0) / 1000.0 == -0.188, "rounded to 3 decimals " + f(std::round(g * 1000.0) / 1000.0));
    return t.finish("G = " + f(g));
}

Outcome rpe_failure_window() {
    Tally t;
    std::string values;
    for (int k = 1; k <= 6; ++k) {
        const double g = dlf::expected_gain(0.25, 0.5, k, 0.5, 1.0);
        const bool ok = k <= 5 ? g < 0.0 : g > 0.0;
        t.record(ok, "k=" + std::to_string(k) + " G=" + f(g));
        values += (values.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + ": " + f(g);
    }
    return t.finish(values);
}

Outcome toy_example() {
    constexpr double tol = 0.01;
    const int stages[] = {10, 30, 60, 90};
    const double k_ref[] = {0.786, 0.327, 0.188, 0.137};
    const double g_ref[] = {0.28, 0.49, 0.69, 0.82};
    Tally t;
    std::string rows;
    for (int i = 0; i < 4; ++i) {
        const auto r = dlf::solve_optimal_gain(-0.1, 0.15 * 0.15, 1.0, stages[i], 1.0, 0.3);
        const bool k_ok = std::abs(r.k_star - k_ref[i]) <= tol;
        const bool g_ok = std::abs(r.expected_gain - g_ref[i]) <= tol;
        const std::string row = "k=" + std::to_string(stages[i]) + " K*=" + f(std::round(r.k_star * 1e5) / 1e5) +
                                (k_ok ? "" : "(!)") + " G=" + f(std::round(r.expected_gain * 1e5) / 1e5) +
                                (g_ok ? "" : "(!)");
        t.record(k_ok, "K* at " + row);
        t.record(g_ok, "mean at " + row + " vs " + f(g_ref[i]));
        rows += (rows.empty() ? "" : ", ") + row;
    }
    return t.finish(rows);
}

Outcome positivity(int tuples, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    for (int i = 0; i < tuples; ++i) {
        const double k = d.uniform(1e-6, 1.0);
        double mu = d.uniform(-0.999999, 1.0);
        if (std::abs(mu) < 1e-6) mu = 1e-6;
        const int stage = d.integer(2, 200);
        const double v0 = d.uniform(0.1, 10.0);
        const auto r = dlf::check_rpe(k, stage, mu, v0);
        t.record(r.positive && r.value > 0.0,
                 tuple({{"K", k}, {"mu", mu}, {"k", double(stage)}, {"G", r.value}}));
    }
    return t.finish("");
}

Outcome growth_in_stage(int tuples, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    for (int i = 0; i < tuples; ++i) {
        const double k = d.uniform(0.0, 1.0);
        const double mu = d.uniform(-0.999999, 1.0);
        const int stage = d.integer(1, 199);
        const double v0 = d.uniform(0.1, 10.0);
        const double g0 = dlf::expected_gain(0.5, k, stage, mu, v0);
        const double g1 = dlf::expected_gain(0.5, k, stage + 1, mu, v0);
        t.record(dlf::check_robust_growth(k, stage, mu, v0) && g1 >= g0 - 1e-12 * std::max(1.0, std::abs(g0)),
                 tuple({{"K", k}, {"mu", mu}, {"k", double(stage)}, {"G(k)", g0}, {"G(k+1)", g1}}));
    }
    return t.finish("");
}

Outcome monotone_in_gain(int tuples, std::uint64_t seed) {
    // K ranges over [0, 1], so admissibility needs K^2 (sigma^2 + mu^2) <= 1.
    constexpr int grid = 16;
    Draw d(seed);
    Tally t;
    for (int i = 0; i < tuples; ++i) {
        double mu = d.uniform(-0.5, 0.5);
        if (std::abs(mu) < 1e-3) mu = std::copysign(1e-3, mu);
        const double sigma2 = d.uniform(1e-4, 0.9 * (1.0 - mu * mu));
        const int stage = d.integer(2, 150);
        const double v0 = d.uniform(0.1, 10.0);
        bool ok = true;
        double prev_m = 0.0, prev_v = 0.0;
        double bad_k = 0.0;
        for (int j = 0; j <= grid; ++j) {
            const double k = static_cast<double>(j) / grid;
            const double m = dlf::expected_gain(0.5, k, stage, mu, v0);
            const double v = dlf::variance_gain(0.5, k, stage, mu, sigma2, v0);
            if (j > 0 && !(m > prev_m && v > prev_v)) {
                ok = false;
                bad_k = k;
            }
            prev_m = m;
            prev_v = v;
        }
        // mu = 0 or sigma = 0 leave only weak monotonicity
        const double k_a = d.uniform(0.0, 1.0), k_b = d.uniform(0.0, 1.0);
        const double lo = std::min(k_a, k_b), hi = std::max(k_a, k_b);
        ok = ok && dlf::expected_gain(0.5, lo, stage, 0.0, v0) <= dlf::expected_gain(0.5, hi, stage, 0.0, v0);
        ok = ok && dlf::variance_gain(0.5, lo, stage, mu, 0.0, v0) <= dlf::variance_gain(0.5, hi, stage, mu, 0.0, v0);
        t.record(ok, tuple({{"mu", mu}, {"sigma2", sigma2}, {"k", double(stage)}, {"K", bad_k}}));
    }
    return t.finish("");
}

Outcome counterexample_found(int tuples, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    for (int i = 0; i < tuples; ++i) {
        double alpha = d.uniform(0.0, 1.0);
        if (alpha == 0.5) alpha = 0.25;
        if (i % 50 == 0) alpha = (i / 50) % 2 == 0 ? 0.0 : 1.0;
        const double k = d.uniform(1e-3, 1.0);
        const int stage = d.integer(2, 50);
        const auto c = dlf::find_rpe_counterexample(alpha, k, stage);
        bool ok = c.has_value();
        if (ok) {
            const ld g = oracle::mean_expanded(alpha, k, stage, c->mu, 1.0L);
            ok = c->mu > -1.0 && c->mu != 0.0 && g < 0 && c->gain_value < 0.0;
        }
        t.record(ok, tuple({{"alpha", alpha}, {"K", k}, {"k", double(stage)}}));
    }
    // the balanced split has no counterexample
    t.record(!dlf::find_rpe_counterexample(0.5, 0.5, 10).has_value(), "alpha = 1/2 returned a witness");
    return t.finish("");
}

Outcome technical_inequalities(int tuples, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    auto geq = [](ld lhs, ld rhs) {
        return lhs >= rhs - 1e-13L * std::max({std::abs(lhs), std::abs(rhs), ld(1)});
    };
    for (int i = 0; i < tuples; ++i) {
        const double x_max = d.uniform(1e-3, 3.0);
        const double k = d.uniform(0.0, std::min(1.0, 1.0 / x_max));
        const double mu = d.uniform(-0.999, x_max);
        const double sigma2 = d.uniform(0.0, 1.0);
        const int stage = d.integer(2, 100);
        const ld a2 = std::pow(1 + ld(k) * mu, 2), b2 = std::pow(1 - ld(k) * mu, 2);
        const ld dd = ld(k) * k * sigma2;
        const int n = stage - 1;
        const bool i1 = geq(std::pow(a2 + dd, n) + std::pow(b2 + dd, n), std::pow(a2, n) + std::pow(b2, n));
        const bool i2 = geq(mu * (std::pow(a2 + dd, n) - std::pow(b2 + dd, n)), mu * (std::pow(a2, n) - std::pow(b2, n)));
        const bool i3 = geq(std::pow(a2, n) + std::pow(b2, n), 2 * std::pow(1 - ld(k) * k * mu * mu, n));
        t.record(i1 && i2 && i3, tuple({{"K", k}, {"mu", mu}, {"sigma2", sigma2}, {"k", double(stage)},
                                        {"i", double(i1)}, {"ii", double(i2)}, {"iii", double(i3)}}));
    }
    return t.finish("");
}

namespace {

// Random admissible configuration and a return path inside its bounds; a
// share of the draws sit exactly on the bounds.
struct PathCase {
    dlf::ControllerConfig config;
    std::vector<double> path;
};

PathCase random_path_case(Draw& d) {
    const double x_min = d.uniform(-0.95, -1e-3);
    const double x_max = d.uniform(1e-3, 2.0);
    const auto b = dlf::ReturnBounds::make(x_min, x_max);
    const double k = d.integer(0, 9) == 0 ? b.k_max() : d.uniform(0.0, b.k_max());
    auto cfg = dlf::ControllerConfig::make(d.uniform(0.0, 1.0), k, d.uniform(0.1, 10.0), b);
    std::vector<double> path(static_cast<std::size_t>(d.integer(1, 250)));
    for (auto& x : path) {
        const int pick = d.integer(0, 9);
        x = pick == 0 ? x_min : pick == 1 ? x_max : d.uniform(x_min, x_max);
    }
    return {cfg, std::move(path)};
}

}  // namespace

Outcome cash_financing(int paths, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    double worst = 0.0;
    for (int i = 0; i < paths; ++i) {
        const auto c = random_path_case(d);
        const auto traj = dlf::simulate(c.config, c.path);
        const auto audit = dlf::audit_cash_financing(traj, c.config.k_gain);
        bool ok = audit.within_bound;
        for (std::size_t j = 0; j < traj.size(); ++j) {
            const double u = std::abs(traj.controls[j].u_long + traj.controls[j].u_short);
            const double v = traj.v_total[j];
            const double slack = 8.0 * std::numeric_limits<double>::epsilon() * v;
            ok = ok && u <= c.config.k_gain * v + slack && c.config.k_gain * v <= v;
            if (v > 0.0) worst = std::max(worst, u / v);
        }
        t.record(ok, tuple({{"alpha", c.config.alpha}, {"K", c.config.k_gain}, {"n", double(c.path.size())},
                            {"ratio", audit.max_ratio}}));
    }
    return t.finish("max |u|/V " + f(worst));
}

Outcome survivability(int paths, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    for (int i = 0; i < paths; ++i) {
        const auto c = random_path_case(d);
        const auto traj = dlf::simulate(c.config, c.path);
        bool ok = true;
        for (std::size_t j = 0; j < traj.size(); ++j) {
            const ld floor = oracle::survival_floor(c.config.alpha, c.config.k_gain, c.config.v0,
                                                    c.config.bounds.x_min, c.config.bounds.x_max,
                                                    static_cast<int>(j));
            const ld v = traj.v_total[j];
            ok = ok && floor >= 0 && traj.v_long[j] >= 0.0 && traj.v_short[j] >= 0.0 &&
                 v >= floor - 1e-12L * std::max(ld(c.config.v0), v);
        }
        t.record(ok, tuple({{"alpha", c.config.alpha}, {"K", c.config.k_gain}, {"n", double(c.path.size())}}));
    }
    return t.finish("");
}

Outcome variance_nonnegative(int tuples, std::uint64_t seed) {
    Draw d(seed);
    Tally t;
    for (int i = 0; i < tuples; ++i) {
        const double x_min = d.uniform(-0.95, 0.0);
        const double x_max = d.uniform(1e-3, 2.0);
        const double mu = d.uniform(x_min, x_max);
        // the largest variance a law on [x_min, x_max] with mean mu can have
        const double sigma2 = d.uniform(0.0, 1.0) * (x_max - mu) * (mu - x_min);
        const double k = d.integer(0, 9) == 0 ? d.uniform(0.0, 1e-6) : d.uniform(0.0, std::min(1.0, 1.0 / x_max));
        const double alpha = d.uniform(0.0, 1.0);
        const int stage = d.integer(0, 200);
        const double v = dlf::variance_gain(alpha, k, stage, mu, sigma2, 1.0);
        t.record(v >= 0.0 && std::isfinite(v), tuple({{"alpha", alpha}, {"K", k}, {"mu", mu}, {"var", v}}));
    }
    return t.finish("");
}

Outcome mc_consistency(int instances, std::size_t n_paths, std::uint64_t seed) {
    Draw d(seed);
    int within = 0;
    double worst_z = 0.0;
    for (int i = 0; i < instances; ++i) {
        const double lo = d.uniform(-0.3, -0.01);
        const double hi = d.uniform(0.01, 0.4);
        const auto model = d.integer(0, 1) == 0
                               ? dlf::ReturnModel::two_point(lo, d.uniform(0.2, 0.8), hi)
                               : dlf::ReturnModel::uniform_grid(lo, hi, static_cast<std::size_t>(d.integer(2, 20)));
        const double alpha = d.uniform(0.0, 1.0);
        const double k = d.uniform(0.0, model.bounds().k_max());
        const int stage = d.integer(1, 30);
        const auto est = dlf::estimate_gain_stats(model, alpha, k, 1.0, stage, n_paths, seed + 1 + i);
        const double exact = dlf::expected_gain(alpha, k, stage, model.mu(), 1.0);
        const double diff = std::abs(est.mean - exact);
        const double z = est.std_error_of_mean > 0.0 ? diff / est.std_error_of_mean : (diff == 0.0 ? 0.0 : 1e300);
        worst_z = std::max(worst_z, z);
        if (z <= 5.0) ++within;
    }
    Outcome o;
    o.checked = instances;
    o.failures = instances - within;
    o.pass = within * 100 >= 95 * instances;
    o.detail = std::to_string(within) + "/" + std::to_string(instances) + " within 5 SE (need 95%), " +
               std::to_string(n_paths) + " paths each, largest |z| " + f(worst_z);
    return o;
}

Outcome library_determinism() {
    Tally t;
    const auto model = dlf::ReturnModel::uniform_grid(-0.12, 0.15, 7);
    const auto ref = dlf::simulate_terminal_gains(model, 0.5, 0.6, 1.0, 40, 5000, 99, 1);
    for (unsigned w : {2u, 3u, 8u}) {
        const auto other = dlf::simulate_terminal_gains(model, 0.5, 0.6, 1.0, 40, 5000, 99, w);
        t.record(other == ref, "terminal gains differ with " + std::to_string(w) + " workers");
    }
    const auto a = dlf::estimate_gain_stats(model, 0.3, 0.4, 2.0, 25, 20000, 7, 1);
    const auto b = dlf::estimate_gain_stats(model, 0.3, 0.4, 2.0, 25, 20000, 7, 5);
    t.record(a.mean == b.mean && a.variance == b.variance, "estimate_gain_stats differs across workers");
    const auto s1 = dlf::solve_optimal_gain_empirical(model.pmf(), 1.0, 30, 0.05, 1e-3, 4000, 3, 1);
    const auto s2 = dlf::solve_optimal_gain_empirical(model.pmf(), 1.0, 30, 0.05, 1e-3, 4000, 3, 4);
    t.record(s1.k_star == s2.k_star && s1.achieved_std == s2.achieved_std, "empirical solve differs across workers");
    const auto c1 = dlf::build_curve_empirical(model, 1.0, 20, 11, 3000, 5, 1);
    const auto c2 = dlf::build_curve_empirical(model, 1.0, 20, 11, 3000, 5, 6);
    bool same = c1.points.size() == c2.points.size();
    for (std::size_t i = 0; same && i < c1.points.size(); ++i)
        same = c1.points[i].std == c2.points[i].std && c1.points[i].mean == c2.points[i].mean;
    t.record(same, "empirical curve differs across workers");
    return t.finish("");
}

}  // namespace suites
