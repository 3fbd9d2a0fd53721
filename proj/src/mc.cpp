#include "sofr/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "sofr/errors.hpp"

namespace sofr {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint64_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += W0;
            k[1] += W1;
        }
        const std::uint64_t p0 = M0 * c[0];
        const std::uint64_t p1 = M1 * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
}

void SimConfig::validate() const {
    SOFR_REQUIRE(n_paths >= 2, DomainError, "simulation needs at least two paths");
    SOFR_REQUIRE(!antithetic || n_paths % 2 == 0, DomainError, "antithetic simulation needs an even path count");
    SOFR_REQUIRE(!grid.empty(), DomainError, "simulation grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        SOFR_REQUIRE(grid[i - 1] < grid[i], DomainError, "simulation grid must be strictly increasing");
}

double McEstimate::z_score(double reference) const {
    if (se == 0.0) return mean == reference ? 0.0 : std::copysign(INFINITY, mean - reference);
    return (mean - reference) / se;
}

namespace {

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// Uniform in (0,1) from 64 random bits.
double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

McEstimate mc_estimate(std::span<const double> samples) {
    SOFR_REQUIRE(samples.size() >= 2, DomainError, "an estimate needs at least two samples");
    McEstimate e;
    e.n = samples.size();
    e.mean = pairwise_sum(samples.data(), samples.size()) / static_cast<double>(e.n);
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
    const double var = pairwise_sum(dev.data(), dev.size()) / static_cast<double>(e.n - 1);
    e.se = std::sqrt(var / static_cast<double>(e.n));
    return e;
}

PathSimulator::PathSimulator(const FactorParams& params, SimConfig config)
    : params_(params), config_(std::move(config)) {
    params_.validate();
    config_.validate();
    const auto& g = config_.grid;
    steps_.reserve(g.size() - 1);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double t0 = g[i - 1], t1 = g[i];
        const IntegratedFactorLaw law = integrated_factor_law(0.0, t0, t0, t1, params_);
        Step s;
        s.decay = std::exp(-params_.b * (t1 - t0));
        s.drift = law.state_mean;
        s.int_coef = n_factor(t0, t1, params_.b);
        s.int_drift = law.mean;
        s.sd_state = std::sqrt(law.state_variance);
        s.load = s.sd_state > 0.0 ? law.covariance / s.sd_state : 0.0;
        s.sd_resid = std::sqrt(std::max(law.variance - s.load * s.load, 0.0));
        steps_.push_back(s);
    }
}

void PathSimulator::fill(std::size_t index, RatePath& out) const {
    const auto& g = config_.grid;
    const std::size_t n = g.size();
    out.times = g;
    out.factor.resize(n);
    out.factor_integral.resize(n);
    const std::uint64_t stream = config_.antithetic ? index / 2 : index;
    const double sign = (config_.antithetic && index % 2 == 1) ? -1.0 : 1.0;
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(config_.seed),
                                           static_cast<std::uint32_t>(config_.seed >> 32)};
    double x = params_.x0, acc = 0.0;
    out.factor[0] = x;
    out.factor_integral[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const Step& s = steps_[i - 1];
        const auto r = philox4x32({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(stream),
                                   static_cast<std::uint32_t>(stream >> 32), 0u},
                                  key);
        // Box-Muller
        const double u1 = to_unit(r[0], r[1]), u2 = to_unit(r[2], r[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double z1 = sign * rad * std::cos(2.0 * std::numbers::pi * u2);
        const double z2 = sign * rad * std::sin(2.0 * std::numbers::pi * u2);
        const double integral = s.int_coef * x + s.int_drift + s.load * z1 + s.sd_resid * z2;
        x = s.decay * x + s.drift + s.sd_state * z1;
        acc += integral;
        out.factor[i] = x;
        out.factor_integral[i] = acc;
    }
}

RatePath PathSimulator::path(std::size_t index) const {
    RatePath p;
    fill(index, p);
    return p;
}

std::vector<RatePath> simulate_paths(const FactorParams& params, const SimConfig& config) {
    const PathSimulator sim(params, config);
    std::vector<RatePath> paths(config.n_paths);
    for (std::size_t i = 0; i < config.n_paths; ++i) sim.fill(i, paths[i]);
    return paths;
}

std::vector<double> mc_samples(const MarketModel& model, const SimConfig& config, const PathPayoff& payoff,
                               Discount discount) {
    model.validate();
    const PathSimulator sim(model.factor, config);
    BasisCurve disc;
    if (discount.kind == Discount::Kind::Rate) disc = model.basis(discount.label);
    if (discount.kind == Discount::Kind::Collateral) disc = model.effective_basis(discount.beta);
    const double t0 = config.grid.front();

    const std::size_t n = config.n_paths;
    std::vector<double> values(n);
    auto work = [&](std::size_t lo, std::size_t hi) {
        RatePath path;
        for (std::size_t i = lo; i < hi; ++i) {
            sim.fill(i, path);
            double v = 0.0;
            for (const CashFlow& cf : payoff(path)) {
                double df = 1.0;
                if (discount.kind != Discount::Kind::None) {
                    const std::size_t k = path.index_of(cf.time);
                    df = std::exp(-(path.factor_integral[k] + disc.integral(t0, path.times[k])));
                }
                v += cf.amount * df;
            }
            values[i] = v;
        }
    };
    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(values[i]))
            throw NumericalError("non-finite payoff sample on path " + std::to_string(i));
    if (!config.antithetic) return values;
    std::vector<double> pairs(n / 2);
    for (std::size_t k = 0; k < pairs.size(); ++k) pairs[k] = 0.5 * (values[2 * k] + values[2 * k + 1]);
    return pairs;
}

McEstimate mc_price(const MarketModel& model, const SimConfig& config, const PathPayoff& payoff, Discount discount) {
    const std::vector<double> s = mc_samples(model, config, payoff, discount);
    return mc_estimate(s);
}

std::vector<double> merge_grid(std::initializer_list<std::span<const double>> parts) {
    std::vector<double> g;
    for (auto p : parts) g.insert(g.end(), p.begin(), p.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }), g.end());
    return g;
}

}  // namespace sofr
