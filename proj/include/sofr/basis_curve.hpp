#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sofr {

/// Overnight rates sharing the common factor: SOFR, EFFR, unsecured funding,
/// collateral remuneration and the hedge funding rate.
enum class RateLabel { s, e, u, c, h };

inline constexpr RateLabel all_rate_labels[] = {RateLabel::s, RateLabel::e, RateLabel::u, RateLabel::c,
                                                RateLabel::h};

std::string_view to_string(RateLabel label);
std::optional<RateLabel> parse_rate_label(std::string_view name);

/// Right-continuous piecewise-constant function of model time.
///
/// `values[i]` applies on [knots[i-1], knots[i]); `values.front()` extends to
/// -infinity and `values.back()` to +infinity, so a constant is `{{}, {c}}`.
class PiecewiseConstant {
   public:
    PiecewiseConstant() : values_{0.0} {}
    explicit PiecewiseConstant(double constant) : values_{constant} {}
    PiecewiseConstant(std::vector<double> knots, std::vector<double> values);

    double value(double t) const;
    /// Exact integral over [t0, t1]; negative when t1 < t0.
    double integral(double t0, double t1) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    bool is_constant() const { return knots_.empty(); }
    double min_value() const;
    double max_value() const;

   private:
    double primitive(double t) const;  // integral from 0 to t

    std::vector<double> knots_;
    std::vector<double> values_;
};

/// w1 * f + w2 * g on the merged knot set.
PiecewiseConstant affine_combination(double w1, const PiecewiseConstant& f, double w2, const PiecewiseConstant& g);

/// Deterministic spread of one overnight rate over the factor.
struct BasisCurve {
    PiecewiseConstant spread;
    RateLabel label = RateLabel::s;

    BasisCurve() = default;
    BasisCurve(PiecewiseConstant s, RateLabel l) : spread(std::move(s)), label(l) {}
    static BasisCurve constant(double value, RateLabel l) { return {PiecewiseConstant(value), l}; }

    double value(double t) const { return spread.value(t); }
    double integral(double t0, double t1) const { return spread.integral(t0, t1); }
};

}  // namespace sofr
