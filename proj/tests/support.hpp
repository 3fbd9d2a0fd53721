#pragma once

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <vector>

#include "sofr/curves.hpp"
#include "sofr/mc.hpp"

namespace sofr::test {

// Reference model used across the suites and the acceptance run.
inline MarketModel reference_model(double beta = 0.0) {
    MarketModel m;
    m.factor = {0.02, 0.3, 0.01, 0.03};
    m.set_basis(RateLabel::s, PiecewiseConstant(-0.0005));
    m.set_basis(RateLabel::e, PiecewiseConstant(0.0));
    m.set_basis(RateLabel::u, PiecewiseConstant(0.003));
    m.set_basis(RateLabel::c, PiecewiseConstant(0.0));
    m.set_basis(RateLabel::h, PiecewiseConstant(0.001));
    m.collateral_fraction = PiecewiseConstant(beta);
    return m;
}

// Adaptive Gauss-Kronrod, the independent quadrature oracle.
template <class F>
double adaptive(F f, double lo, double hi, unsigned max_depth = 6) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, max_depth, 1e-15);
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

// A realized path from 0 to t passing through every date in `dates` below t;
// its last factor value is the state x_t.
inline RatePath history_to(const FactorParams& p, double t, std::vector<double> dates, std::uint64_t seed) {
    dates.push_back(0.0);
    dates.push_back(t);
    std::erase_if(dates, [t](double d) { return d > t || d < 0.0; });
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    if (dates.size() < 2) dates.push_back(t + 1e-9);
    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_paths = 2;
    cfg.grid = dates;
    return PathSimulator(p, cfg).path(0);
}

}  // namespace sofr::test
