#pragma once

// Exact-law Monte-Carlo for the factor: each grid step draws (x_{t+h}, int_t^{t+h} x)
// from their bivariate Gaussian transition, so the only error is statistical.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sofr/curves.hpp"

namespace sofr {

/// Philox4x32-10 block: counter-based, so any (path, step) draw is addressable directly.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

struct SimConfig {
    std::uint64_t seed = 0;
    std::size_t n_paths = 2;
    std::vector<double> grid;  ///< simulation times; x equals the model's x0 at grid.front()
    bool antithetic = false;   ///< paths 2k and 2k+1 share draws with opposite signs
    unsigned threads = 0;      ///< 0 uses the hardware concurrency

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;  ///< independent samples (antithetic pairs count once)

    double z_score(double reference) const;
};

/// Mean and standard error with fixed-order pairwise summation.
McEstimate mc_estimate(std::span<const double> samples);

class PathSimulator {
   public:
    PathSimulator(const FactorParams& params, SimConfig config);

    const SimConfig& config() const { return config_; }
    /// Writes path `index` into `out`, reusing its storage.
    void fill(std::size_t index, RatePath& out) const;
    RatePath path(std::size_t index) const;

   private:
    struct Step {
        double decay;       // e^{-b h}: coefficient of x in E[x_{t+h}]
        double drift;       // a n(h)
        double int_coef;    // n(h): coefficient of x in E[int x]
        double int_drift;   // a int n
        double sd_state;
        double load;        // Cov / sd_state
        double sd_resid;
    };

    FactorParams params_;
    SimConfig config_;
    std::vector<Step> steps_;
};

std::vector<RatePath> simulate_paths(const FactorParams& params, const SimConfig& config);

struct CashFlow {
    double time = 0.0;
    double amount = 0.0;
};

/// Which account discounts the simulated cash flows.
struct Discount {
    enum class Kind { None, Rate, Collateral };
    Kind kind = Kind::None;
    RateLabel label = RateLabel::h;
    double beta = 0.0;

    static Discount none() { return {}; }
    static Discount rate(RateLabel l) { return {Kind::Rate, l, 0.0}; }
    /// r^beta = (1 - beta) r^h + beta r^c
    static Discount collateral(double beta) { return {Kind::Collateral, RateLabel::h, beta}; }
};

using PathPayoff = std::function<std::vector<CashFlow>(const RatePath&)>;

/// Mean and standard error of the discounted payoff, discounting from grid.front().
McEstimate mc_price(const MarketModel& model, const SimConfig& config, const PathPayoff& payoff,
                    Discount discount = Discount::none());

/// Per-path discounted payoff samples (one entry per independent sample).
std::vector<double> mc_samples(const MarketModel& model, const SimConfig& config, const PathPayoff& payoff,
                               Discount discount = Discount::none());

/// Sorted union of the given times, for building a grid that contains every cash-flow date.
std::vector<double> merge_grid(std::initializer_list<std::span<const double>> parts);

}  // namespace sofr
