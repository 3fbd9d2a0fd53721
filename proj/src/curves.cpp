#include "sofr/curves.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sofr/errors.hpp"

namespace sofr {

std::string_view to_string(RateLabel label) {
    switch (label) {
        case RateLabel::s: return "s";
        case RateLabel::e: return "e";
        case RateLabel::u: return "u";
        case RateLabel::c: return "c";
        case RateLabel::h: return "h";
    }
    return "?";
}

std::optional<RateLabel> parse_rate_label(std::string_view name) {
    for (RateLabel l : all_rate_labels)
        if (to_string(l) == name) return l;
    return std::nullopt;
}

PiecewiseConstant::PiecewiseConstant(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    SOFR_REQUIRE(values_.size() == knots_.size() + 1, DomainError,
                 "piecewise-constant curve needs one more value than knots");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        SOFR_REQUIRE(std::isfinite(knots_[i]), DomainError, "non-finite knot");
        if (i > 0) SOFR_REQUIRE(knots_[i - 1] < knots_[i], DomainError, "knots must be strictly increasing");
    }
    for (double v : values_) SOFR_REQUIRE(std::isfinite(v), DomainError, "non-finite curve value");
}

double PiecewiseConstant::value(double t) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return values_[static_cast<std::size_t>(it - knots_.begin())];
}

double PiecewiseConstant::primitive(double t) const {
    // Sum of (width x value) pieces between 0 and t.
    double acc = 0.0;
    const double lo = std::min(0.0, t), hi = std::max(0.0, t);
    double left = lo;
    for (std::size_t i = 0; i <= knots_.size(); ++i) {
        const double right = (i < knots_.size()) ? std::min(knots_[i], hi) : hi;
        if (right > left) {
            acc += (right - left) * values_[i];
            left = right;
        }
        if (left >= hi) break;
    }
    return t >= 0.0 ? acc : -acc;
}

double PiecewiseConstant::integral(double t0, double t1) const {
    if (knots_.empty()) return values_[0] * (t1 - t0);
    return primitive(t1) - primitive(t0);
}

double PiecewiseConstant::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double PiecewiseConstant::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

PiecewiseConstant affine_combination(double w1, const PiecewiseConstant& f, double w2, const PiecewiseConstant& g) {
    std::vector<double> knots;
    std::merge(f.knots().begin(), f.knots().end(), g.knots().begin(), g.knots().end(), std::back_inserter(knots));
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<double> values;
    values.reserve(knots.size() + 1);
    for (std::size_t i = 0; i <= knots.size(); ++i) {
        // Any point inside piece i identifies it; the left knot works by right-continuity.
        const double probe = (i == 0) ? (knots.empty() ? 0.0 : knots.front() - 1.0) : knots[i - 1];
        values.push_back(w1 * f.value(probe) + w2 * g.value(probe));
    }
    return PiecewiseConstant(std::move(knots), std::move(values));
}

BasisCurve effective_basis(const PiecewiseConstant& beta, const BasisCurve& h_basis, const BasisCurve& c_basis) {
    SOFR_REQUIRE(beta.min_value() >= 0.0 && beta.max_value() <= 1.0, DomainError,
                 "collateral fraction beta must lie in [0,1]");
    if (beta.is_constant()) {
        const double b = beta.values()[0];
        if (b == 0.0) return BasisCurve(h_basis.spread, RateLabel::h);
        if (b == 1.0) return BasisCurve(c_basis.spread, RateLabel::h);
        return BasisCurve(affine_combination(1.0 - b, h_basis.spread, b, c_basis.spread), RateLabel::h);
    }
    // (1 - beta) h + beta c with beta itself piecewise constant: merge all three knot sets.
    const PiecewiseConstant one_minus_beta = affine_combination(-1.0, beta, 1.0, PiecewiseConstant(1.0));
    std::vector<double> knots;
    for (const auto* k : {&beta.knots(), &h_basis.spread.knots(), &c_basis.spread.knots()})
        knots.insert(knots.end(), k->begin(), k->end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<double> values;
    for (std::size_t i = 0; i <= knots.size(); ++i) {
        const double probe = (i == 0) ? (knots.empty() ? 0.0 : knots.front() - 1.0) : knots[i - 1];
        values.push_back(one_minus_beta.value(probe) * h_basis.value(probe) + beta.value(probe) * c_basis.value(probe));
    }
    return BasisCurve(PiecewiseConstant(std::move(knots), std::move(values)), RateLabel::h);
}

BasisCurve MarketModel::effective_basis() const {
    return sofr::effective_basis(collateral_fraction, basis(RateLabel::h), basis(RateLabel::c));
}

BasisCurve MarketModel::effective_basis(double beta) const {
    return sofr::effective_basis(PiecewiseConstant(beta), basis(RateLabel::h), basis(RateLabel::c));
}

void MarketModel::validate() const {
    factor.validate();
    for (RateLabel l : all_rate_labels)
        SOFR_REQUIRE(basis(l).label == l, DomainError, "basis curve stored under the wrong label");
    SOFR_REQUIRE(collateral_fraction.min_value() >= 0.0 && collateral_fraction.max_value() <= 1.0, DomainError,
                 "collateral fraction beta must lie in [0,1]");
}

void RatePath::validate() const {
    SOFR_REQUIRE(!times.empty(), DomainError, "empty rate path");
    SOFR_REQUIRE(factor.size() == times.size() && factor_integral.size() == times.size(), DomainError,
                 "rate path arrays differ in length");
    for (std::size_t i = 1; i < times.size(); ++i)
        SOFR_REQUIRE(times[i - 1] < times[i], DomainError, "rate path grid must be strictly increasing");
}

namespace {
constexpr double grid_tol = 1e-10;
}

std::size_t RatePath::index_of(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t - grid_tol);
    if (it == times.end() || std::abs(*it - t) > grid_tol)
        throw CoverageError("time " + std::to_string(t) + " is not on the path grid");
    return static_cast<std::size_t>(it - times.begin());
}

std::size_t RatePath::index_at_or_before(double t) const {
    SOFR_REQUIRE(!times.empty() && t >= times.front() - grid_tol, CoverageError,
                 "time " + std::to_string(t) + " precedes the path");
    const auto it = std::upper_bound(times.begin(), times.end(), t + grid_tol);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

double RatePath::integral(double t0, double t1) const {
    auto cumulative = [this](double t) {
        SOFR_REQUIRE(t <= times.back() + grid_tol, CoverageError,
                     "time " + std::to_string(t) + " is beyond the path");
        const std::size_t i = index_at_or_before(t);
        if (std::abs(times[i] - t) <= grid_tol || i + 1 == times.size()) return factor_integral[i];
        const double w = (t - times[i]) / (times[i + 1] - times[i]);
        return factor_integral[i] + w * (factor_integral[i + 1] - factor_integral[i]);
    };
    return cumulative(t1) - cumulative(t0);
}

double realized_rate(const RatePath& path, const BasisCurve& basis, std::size_t i) {
    return path.factor[i] + basis.value(path.times[i]);
}

double synthetic_bond(const MarketModel& model, const BasisCurve& basis, double x_t, double t, double T,
                      const RatePath* history) {
    if (t <= T) return zcb_kernel(x_t, t, T, model.factor, basis);
    if (history == nullptr)
        throw MissingHistoryError("bond accrual past its maturity needs the realized path");
    return std::exp(history->integral(T, t) + basis.integral(T, t));
}

double synthetic_bond(const MarketModel& model, RateLabel label, double x_t, double t, double T,
                      const RatePath* history) {
    return synthetic_bond(model, model.basis(label), x_t, t, T, history);
}

double account_growth(const RatePath& path, const BasisCurve& basis, double t0, double t1, IntegrationScheme scheme) {
    SOFR_REQUIRE(t0 <= t1, DomainError, "account growth needs t0 <= t1");
    const std::size_t i0 = path.index_of(t0);
    const std::size_t i1 = path.index_of(t1);
    double acc = 0.0;
    switch (scheme) {
        case IntegrationScheme::Exact:
            acc = path.factor_integral[i1] - path.factor_integral[i0] + basis.integral(t0, t1);
            break;
        case IntegrationScheme::LeftRiemann:
            for (std::size_t i = i0; i < i1; ++i)
                acc += realized_rate(path, basis, i) * (path.times[i + 1] - path.times[i]);
            break;
        case IntegrationScheme::Trapezoid:
            for (std::size_t i = i0; i < i1; ++i)
                acc += 0.5 * (realized_rate(path, basis, i) + path.factor[i + 1] + basis.value(path.times[i])) *
                       (path.times[i + 1] - path.times[i]);
            break;
    }
    return std::exp(acc);
}

}  // namespace sofr
