#pragma once

#include "dlf/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dlf {

/// Certified support bounds of the per-period return, x_min <= X(k) <= x_max.
struct ReturnBounds {
    double x_min = 0.0;
    double x_max = 0.0;

    /// Validates -1 < x_min <= x_max < inf.
    static ReturnBounds make(double x_min, double x_max);

    /// Largest admissible feedback gain, min(1, 1/x_max).
    double k_max() const noexcept;

    /// True when x_min < 0 < x_max.
    bool straddles_zero() const noexcept { return x_min < 0.0 && x_max > 0.0; }

    bool contains(double x) const noexcept { return x >= x_min && x <= x_max; }

    ReturnBounds hull(const ReturnBounds& other) const noexcept;
};

struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

/// Discrete return distribution in canonical form: atoms sorted by value,
/// duplicates merged, every weight > 0, weights summing to 1 (within 1e-12).
class EmpiricalPMF {
public:
    static EmpiricalPMF from_atoms(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    double mean() const noexcept { return mean_; }
    /// Exact variance of the distribution (population convention).
    double variance() const noexcept { return variance_; }
    ReturnBounds bounds() const;

    friend bool operator==(const EmpiricalPMF& a, const EmpiricalPMF& b);

private:
    explicit EmpiricalPMF(std::vector<Atom> atoms);

    std::vector<Atom> atoms_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

enum class ModelKind { EmpiricalPMF, TwoPoint, UniformGrid };

std::string_view to_string(ModelKind kind) noexcept;

/// Per-period return distribution with its support bounds and first two
/// moments. Every kind is discrete, so the model always carries a PMF.
class ReturnModel {
public:
    static ReturnModel from_pmf(EmpiricalPMF pmf);
    /// X = lo with probability p_lo, X = hi otherwise.
    static ReturnModel two_point(double lo, double p_lo, double hi);
    /// n equally weighted atoms equally spaced on [lo, hi], endpoints included.
    static ReturnModel uniform_grid(double lo, double hi, std::size_t n);

    ModelKind kind() const noexcept { return kind_; }
    const EmpiricalPMF& pmf() const noexcept { return pmf_; }
    const ReturnBounds& bounds() const noexcept { return bounds_; }
    double mu() const noexcept { return pmf_.mean(); }
    double sigma2() const noexcept { return pmf_.variance(); }

    /// One draw by inverse-CDF lookup.
    double sample(Rng& rng) const noexcept;
    void sample_into(Rng& rng, std::span<double> out) const noexcept;

private:
    ReturnModel(ModelKind kind, EmpiricalPMF pmf);

    ModelKind kind_;
    EmpiricalPMF pmf_;
    ReturnBounds bounds_;
    std::vector<double> cdf_;
};

struct PriceSeries {
    std::string ticker;
    std::vector<double> prices;
    std::vector<std::string> dates;  // empty or same length as prices

    /// Validates positivity, length >= 2, and strictly increasing dates.
    static PriceSeries make(std::string ticker, std::vector<double> prices,
                            std::vector<std::string> dates = {});
};

/// X(k) = (S(k+1) - S(k)) / S(k).
std::vector<double> returns_from_prices(const PriceSeries& series);

/// Each distinct return gets weight count/n. The resulting variance is the
/// biased (1/n) sample variance.
EmpiricalPMF pmf_from_returns(std::span<const double> returns);

std::vector<double> sample_path(const ReturnModel& model, std::size_t n, std::uint64_t seed);

/// Reads `column` from a headered CSV. A column named "date" (any case), if
/// present, fills `dates`.
PriceSeries load_prices_csv(const std::filesystem::path& path, std::string_view column);

}  // namespace dlf
