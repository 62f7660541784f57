#include "dlf/returns.hpp"

#include "csv_util.hpp"
#include "dlf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace dlf {

namespace {

constexpr double kWeightSumTol = 1e-12;

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

ReturnBounds ReturnBounds::make(double x_min, double x_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max))
        throw Error(ErrorCode::InvalidModel, "return bounds must be finite");
    if (!(x_min > -1.0))
        throw Error(ErrorCode::ReturnBelowNegOne,
                    "x_min must exceed -1, got " + fmt_double(x_min));
    if (x_min > x_max)
        throw Error(ErrorCode::InvalidModel, "x_min exceeds x_max");
    return ReturnBounds{x_min, x_max};
}

double ReturnBounds::k_max() const noexcept {
    if (x_max <= 1.0) return 1.0;
    return 1.0 / x_max;
}

ReturnBounds ReturnBounds::hull(const ReturnBounds& other) const noexcept {
    return ReturnBounds{std::min(x_min, other.x_min), std::max(x_max, other.x_max)};
}

// --- EmpiricalPMF ----------------------------------------------------------

EmpiricalPMF::EmpiricalPMF(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) mean_ += a.weight * a.value;
    for (const auto& a : atoms_) {
        const double d = a.value - mean_;
        variance_ += a.weight * d * d;
    }
}

EmpiricalPMF EmpiricalPMF::from_atoms(std::vector<Atom> atoms) {
    std::map<double, double> merged;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.value) || !std::isfinite(a.weight))
            throw Error(ErrorCode::InvalidModel, "atom values and weights must be finite");
        if (a.weight < 0.0)
            throw Error(ErrorCode::InvalidModel, "negative atom weight");
        if (!(a.value > -1.0))
            throw Error(ErrorCode::ReturnBelowNegOne,
                        "return " + fmt_double(a.value) + " is not above -1");
        if (a.weight == 0.0) continue;
        merged[a.value] += a.weight;
    }
    if (merged.empty()) throw Error(ErrorCode::EmptyInput, "PMF has no atoms with positive weight");

    std::vector<Atom> canonical;
    canonical.reserve(merged.size());
    double total = 0.0;
    for (const auto& [value, weight] : merged) {
        canonical.push_back({value, weight});
        total += weight;
    }
    if (std::abs(total - 1.0) > kWeightSumTol)
        throw Error(ErrorCode::InvalidModel, "PMF weights sum to " + fmt_double(total));
    return EmpiricalPMF(std::move(canonical));
}

ReturnBounds EmpiricalPMF::bounds() const {
    return ReturnBounds::make(atoms_.front().value, atoms_.back().value);
}

bool operator==(const EmpiricalPMF& a, const EmpiricalPMF& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
        if (a.atoms_[i].value != b.atoms_[i].value || a.atoms_[i].weight != b.atoms_[i].weight)
            return false;
    }
    return true;
}

// --- ReturnModel -----------------------------------------------------------

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::EmpiricalPMF: return "empirical_pmf";
        case ModelKind::TwoPoint: return "two_point";
        case ModelKind::UniformGrid: return "uniform_grid";
    }
    return "unknown";
}

ReturnModel::ReturnModel(ModelKind kind, EmpiricalPMF pmf)
    : kind_(kind), pmf_(std::move(pmf)), bounds_(pmf_.bounds()) {
    cdf_.reserve(pmf_.size());
    double acc = 0.0;
    for (const auto& a : pmf_.atoms()) {
        acc += a.weight;
        cdf_.push_back(acc);
    }
    // pin the last entry so a uniform in [0,1) can never run off the end
    cdf_.back() = 1.0;
}

ReturnModel ReturnModel::from_pmf(EmpiricalPMF pmf) {
    return ReturnModel(ModelKind::EmpiricalPMF, std::move(pmf));
}

ReturnModel ReturnModel::two_point(double lo, double p_lo, double hi) {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidModel, "two-point model needs lo < hi");
    if (!(p_lo > 0.0 && p_lo < 1.0))
        throw Error(ErrorCode::InvalidModel, "two-point probability must lie in (0, 1)");
    return ReturnModel(ModelKind::TwoPoint,
                       EmpiricalPMF::from_atoms({{lo, p_lo}, {hi, 1.0 - p_lo}}));
}

ReturnModel ReturnModel::uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2) throw Error(ErrorCode::InvalidModel, "uniform grid needs at least 2 atoms");
    if (!(lo < hi)) throw Error(ErrorCode::InvalidModel, "uniform grid needs lo < hi");
    std::vector<Atom> atoms;
    atoms.reserve(n);
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        const double x = (i + 1 == n) ? hi : lo + (hi - lo) * t;
        atoms.push_back({x, w});
    }
    // n * (1/n) can miss 1 by a few ulps; fold the residue into the last atom
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) total += atoms[i].weight;
    atoms.back().weight = 1.0 - total;
    return ReturnModel(ModelKind::UniformGrid, EmpiricalPMF::from_atoms(std::move(atoms)));
}

double ReturnModel::sample(Rng& rng) const noexcept {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return pmf_.atoms()[static_cast<std::size_t>(it - cdf_.begin())].value;
}

void ReturnModel::sample_into(Rng& rng, std::span<double> out) const noexcept {
    for (auto& x : out) x = sample(rng);
}

// --- prices and returns ----------------------------------------------------

PriceSeries PriceSeries::make(std::string ticker, std::vector<double> prices,
                              std::vector<std::string> dates) {
    if (prices.size() < 2)
        throw Error(ErrorCode::TooShort, "price series needs at least 2 prices, got " +
                                             std::to_string(prices.size()));
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
            throw Error(ErrorCode::NonPositivePrice,
                        "price at index " + std::to_string(i) + " is " + fmt_double(prices[i]));
    }
    if (!dates.empty()) {
        if (dates.size() != prices.size())
            throw Error(ErrorCode::LengthMismatch, "dates and prices differ in length");
        for (std::size_t i = 1; i < dates.size(); ++i) {
            if (!(dates[i - 1] < dates[i]))
                throw Error(ErrorCode::ParseError,
                            "dates not strictly increasing at index " + std::to_string(i));
        }
    }
    return PriceSeries{std::move(ticker), std::move(prices), std::move(dates)};
}

std::vector<double> returns_from_prices(const PriceSeries& series) {
    if (series.prices.size() < 2)
        throw Error(ErrorCode::TooShort, "price series needs at least 2 prices");
    std::vector<double> out;
    out.reserve(series.prices.size() - 1);
    for (std::size_t k = 0; k < series.prices.size(); ++k) {
        if (!(series.prices[k] > 0.0))
            throw Error(ErrorCode::NonPositivePrice,
                        "price at index " + std::to_string(k) + " is not positive");
        if (k > 0) {
            const double prev = series.prices[k - 1];
            out.push_back((series.prices[k] - prev) / prev);
        }
    }
    return out;
}

EmpiricalPMF pmf_from_returns(std::span<const double> returns) {
    if (returns.empty()) throw Error(ErrorCode::EmptyInput, "no returns to build a PMF from");
    std::map<double, std::size_t> counts;
    for (double x : returns) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidModel, "non-finite return");
        if (!(x > -1.0))
            throw Error(ErrorCode::ReturnBelowNegOne, "return " + fmt_double(x) + " is not above -1");
        ++counts[x];
    }
    const double n = static_cast<double>(returns.size());
    std::vector<Atom> atoms;
    atoms.reserve(counts.size());
    for (const auto& [value, count] : counts) atoms.push_back({value, static_cast<double>(count) / n});
    return EmpiricalPMF::from_atoms(std::move(atoms));
}

std::vector<double> sample_path(const ReturnModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error(ErrorCode::DomainError, "sample_path needs n >= 1");
    Rng rng(seed);
    std::vector<double> out(n);
    model.sample_into(rng, out);
    return out;
}

// --- CSV ingestion ---------------------------------------------------------

using detail::iequals;
using detail::split_row;
using detail::trim;

PriceSeries load_prices_csv(const std::filesystem::path& path, std::string_view column) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());

    std::string line;
    std::size_t row = 0;
    // header, skipping leading blank lines
    while (std::getline(in, line)) {
        ++row;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw Error(ErrorCode::ParseError, path.string() + ": missing header row");
    detail::strip_bom(line);

    const auto header = split_row(line);
    std::size_t price_col = header.size();
    std::size_t date_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == column) price_col = c;
        if (iequals(header[c], "date")) date_col = c;
    }
    if (price_col == header.size())
        throw Error(ErrorCode::MissingColumn,
                    path.string() + ": no column named '" + std::string(column) + "'");

    std::vector<double> prices;
    std::vector<std::string> dates;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_row(line);
        if (fields.size() != header.size())
            throw Error(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) +
                                                   " has " + std::to_string(fields.size()) +
                                                   " fields, header has " + std::to_string(header.size()));
        const auto text = fields[price_col];
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
            throw Error(ErrorCode::ParseError, path.string() + ": row " + std::to_string(row) +
                                                   ", column '" + std::string(column) +
                                                   "': cannot parse '" + std::string(text) + "'");
        if (!(value > 0.0))
            throw Error(ErrorCode::NonPositivePrice, path.string() + ": row " + std::to_string(row) +
                                                         " has price " + std::string(text));
        prices.push_back(value);
        if (date_col < header.size()) dates.emplace_back(fields[date_col]);
    }
    return PriceSeries::make(path.stem().string(), std::move(prices), std::move(dates));
}

}  // namespace dlf
