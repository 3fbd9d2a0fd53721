#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sofr/errors.hpp"
#include "sofr/hedging.hpp"
#include "sofr/mc.hpp"

namespace sofr::app {

using nlohmann::json;

namespace {

const RatePath* history_of(const Scenario& sc) { return sc.history ? &*sc.history : nullptr; }

std::string side_name(Side s) { return s == Side::Payer ? "payer" : "receiver"; }

json leg_json(const Instrument& ins, const LegValue& leg) {
    return {{"index", leg.index},
            {"start", format_date(ins.dates[leg.index - 1])},
            {"end", format_date(ins.dates[leg.index])},
            {"floating", leg.floating},
            {"fixed", leg.fixed},
            {"discount", leg.discount},
            {"in_progress", leg.in_progress}};
}

json caplet_json(const Instrument& ins, const CapletValuation& c, std::size_t index) {
    return {{"index", index},
            {"start", format_date(ins.dates[index - 1])},
            {"end", format_date(ins.dates[index])},
            {"price", c.price},
            {"h_plus", c.h_plus},
            {"h_minus", c.h_minus},
            {"v_y", c.v_y},
            {"futures_growth", c.growth}};
}

json price_one(const Scenario& sc, const Instrument& ins) {
    const MarketModel& m = sc.model.model;
    const double x = sc.factor_value, t = sc.valuation_time;
    const RatePath* hist = history_of(sc);
    json r{{"id", ins.id}, {"kind", to_string(ins.kind)}};
    switch (ins.kind) {
        case InstrumentKind::Swap: {
            const SwapValuation v = swap_valuation(m, x, t, ins.swap, hist);
            r["price"] = v.price;
            r["fair_rate"] = v.fair_rate;
            r["fixed_rate"] = ins.swap.fixed_rate;
            r["annuity"] = v.annuity * ins.swap.notional;
            r["side"] = side_name(ins.swap.side);
            json legs = json::array();
            for (const LegValue& leg : v.legs) legs.push_back(leg_json(ins, leg));
            r["legs"] = legs;
            break;
        }
        case InstrumentKind::Cap:
        case InstrumentKind::Caplet:
        case InstrumentKind::Floor: {
            const CapValuation cv = cap_valuation(m, x, t, ins.cap, hist);
            const SwapValuation sv = swap_valuation(m, x, t, ins.cap.swap(), hist);
            r["price"] = ins.kind == InstrumentKind::Floor ? cv.price - sv.price : cv.price;
            r["strike"] = ins.cap.strike;
            r["fair_rate"] = sv.fair_rate;
            if (ins.kind == InstrumentKind::Floor) {
                r["cap_price"] = cv.price;
                r["payer_swap_price"] = sv.price;
            }
            json caplets = json::array();
            const std::size_t first = ins.cap.tenor.periods() - cv.caplets.size() + 1;
            for (std::size_t k = 0; k < cv.caplets.size(); ++k) caplets.push_back(caplet_json(ins, cv.caplets[k], first + k));
            r["caplets"] = caplets;
            break;
        }
        case InstrumentKind::Swaption: {
            const SwaptionValuation v = swaption_valuation(m, x, t, ins.swaption);
            r["price"] = v.price;
            r["strike"] = ins.swaption.underlying.fixed_rate;
            r["side"] = side_name(ins.swaption.underlying.side);
            r["fair_rate"] = forward_swap_rate(m, x, t, ins.swaption.underlying.tenor,
                                               ins.swaption.underlying.collateral_fraction, hist);
            r["quadrature"] = {{"nodes", v.nodes},
                               {"refined_price", v.refined_price},
                               {"node_doubling_diff", v.node_doubling_diff},
                               {"closed_form_price", v.closed_form_price},
                               {"tilt_mean_shift", v.tilt_mean_shift},
                               {"factor_mean", v.factor_mean},
                               {"factor_stdev", v.factor_stdev},
                               {"discount", v.discount},
                               {"exercise_boundary", v.exercise_boundary},
                               {"monotone", v.monotone}};
            break;
        }
        case InstrumentKind::Futures: {
            const FuturesState fs = futures_state_from_history(m, x, t, ins.futures, hist);
            r["rate"] = fs.rate;
            r["price"] = fs.price();
            r["display_price"] = settlement_display_price(fs.rate);
            r["style"] = ins.futures.style == FuturesStyle::ThreeMonthCompound ? "compound" : "simple";
            if (t <= ins.futures.start) r["convexity"] = convexity_adjustment(m, x, t, ins.futures);
            break;
        }
    }
    return r;
}

std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f << std::setprecision(17);
    return f;
}

double constant_beta(const MarketModel& m, std::optional<double> beta) {
    if (beta) return *beta;
    if (!m.collateral_fraction.is_constant())
        throw ConfigError("simulation needs a constant collateral fraction; set collateral_fraction on the instrument");
    return m.collateral_fraction.values()[0];
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
    return buf;
}

}  // namespace

json price_report(const Scenario& sc) {
    json results = json::array();
    for (const Instrument& ins : sc.instruments) results.push_back(price_one(sc, ins));
    return {{"schema_version", schema_version},
            {"command", "price"},
            {"valuation_date", format_date(sc.valuation_date)},
            {"factor_value", sc.factor_value},
            {"results", results}};
}

void write_futures_curve(const Scenario& sc, std::ostream& out) {
    if (sc.curve.empty()) throw ConfigError("scenario has no futures_curve section");
    const auto rows = futures_strip(sc.model.model, sc.factor_value, sc.valuation_time, sc.curve);
    out << "contract_start,contract_end,rate,price\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << format_date(sc.curve_dates[i].first) << ',' << format_date(sc.curve_dates[i].second) << ','
            << fmt(rows[i].rate) << ',' << fmt(rows[i].price) << '\n';
}

std::vector<McCheck> mc_checks(const Scenario& sc, const McOptions& opt) {
    MarketModel m = sc.model.model;
    m.factor.x0 = sc.factor_value;
    const double t = sc.valuation_time;
    const BasisCurve& bs = m.basis(RateLabel::s);
    std::vector<McCheck> out;
    for (const Instrument& ins : sc.instruments) {
        if (sc.model.time_of(ins.dates.front()) < t - 1e-12) continue;  // already fixing

        std::vector<double> dates;
        for (Date d : ins.dates) dates.push_back(sc.model.time_of(d));
        SimConfig cfg;
        cfg.seed = opt.seed;
        cfg.n_paths = opt.paths;
        cfg.antithetic = opt.antithetic;
        const std::vector<double> start{t};
        cfg.grid = merge_grid({start, dates});

        McCheck c;
        c.id = ins.id;
        c.quantity = "price";
        McEstimate e;
        auto growth = [&bs](const RatePath& p, double a, double b) {
            return std::exp(p.integral(a, b) + bs.integral(a, b));
        };
        switch (ins.kind) {
            case InstrumentKind::Swap: {
                const SwapSpec s = ins.swap;
                c.closed_form = swap_price(m, sc.factor_value, t, s);
                e = mc_price(m, cfg, [&](const RatePath& p) {
                    std::vector<CashFlow> cf;
                    for (std::size_t j = 1; j <= s.tenor.periods(); ++j) {
                        const double K = 1.0 + s.tenor.delta(j) * s.fixed_rate;
                        cf.push_back({s.tenor.dates[j],
                                      s.sign() * s.notional * (growth(p, s.tenor.dates[j - 1], s.tenor.dates[j]) - K)});
                    }
                    return cf;
                }, Discount::collateral(constant_beta(m, s.collateral_fraction)));
                break;
            }
            case InstrumentKind::Cap:
            case InstrumentKind::Caplet:
            case InstrumentKind::Floor: {
                const CapSpec s = ins.cap;
                const double dir = ins.kind == InstrumentKind::Floor ? -1.0 : 1.0;
                c.closed_form = ins.kind == InstrumentKind::Floor ? floor_price(m, sc.factor_value, t, s)
                                                                  : cap_price(m, sc.factor_value, t, s);
                e = mc_price(m, cfg, [&](const RatePath& p) {
                    std::vector<CashFlow> cf;
                    for (std::size_t j = 1; j <= s.tenor.periods(); ++j) {
                        const double K = 1.0 + s.tenor.delta(j) * s.strike;
                        const double G = growth(p, s.tenor.dates[j - 1], s.tenor.dates[j]);
                        cf.push_back({s.tenor.dates[j], s.notional * std::max(dir * (G - K), 0.0)});
                    }
                    return cf;
                }, Discount::collateral(constant_beta(m, s.collateral_fraction)));
                break;
            }
            case InstrumentKind::Swaption: {
                const SwaptionSpec s = ins.swaption;
                c.closed_form = swaption_price(m, sc.factor_value, t, s);
                const double T0 = s.expiry();
                e = mc_price(m, cfg, [&](const RatePath& p) {
                    const double g = swap_value_at_expiry(m, p.factor[p.index_of(T0)], s);
                    return std::vector<CashFlow>{{T0, std::max(g, 0.0)}};
                }, Discount::collateral(constant_beta(m, s.underlying.collateral_fraction)));
                break;
            }
            case InstrumentKind::Futures: {
                const FuturesContract f = ins.futures;
                c.quantity = "futures_rate";
                c.closed_form = futures_rate(m, sc.factor_value, t, f);
                e = mc_price(m, cfg, [&](const RatePath& p) {
                    return std::vector<CashFlow>{{f.end(), (growth(p, f.start, f.end()) - 1.0) / f.delta}};
                });
                break;
            }
        }
        c.mc_mean = e.mean;
        c.se = e.se;
        c.z = e.z_score(c.closed_form);
        out.push_back(c);
    }
    return out;
}

void write_mc_table(const std::vector<McCheck>& checks, std::ostream& out) {
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %-13s %18s %18s %12s %8s\n", "id", "quantity", "closed_form", "mc_mean",
                  "se", "z");
    out << line;
    for (const McCheck& c : checks) {
        std::snprintf(line, sizeof line, "%-18s %-13s %18.10g %18.10g %12.4g %8.3f\n", c.id.c_str(),
                      c.quantity.c_str(), c.closed_form, c.mc_mean, c.se, c.z);
        out << line;
    }
}

HedgeReport hedge_report(const Scenario& sc, const HedgeOptions& opt) {
    const Instrument& ins = find_instrument(sc, opt.instrument);
    MarketModel m = sc.model.model;
    m.factor.x0 = sc.factor_value;
    const double start = sc.valuation_time;
    if (sc.model.time_of(ins.dates.front()) < start - 1e-12)
        throw ConfigError("hedge-sim starts on or before the instrument's first fixing date");

    HedgeProgram prog;
    std::string beta_note;
    switch (ins.kind) {
        case InstrumentKind::Swap:
            prog = swap_program(m, ins.swap);
            break;
        case InstrumentKind::Caplet:
        case InstrumentKind::Cap:
            if (ins.cap.tenor.periods() != 1) throw ConfigError("hedge-sim covers single-period caps (caplets) only");
            prog = caplet_program(m, ins.cap.tenor.contract(1), ins.cap.strike, ins.cap.notional,
                                  constant_beta(m, ins.cap.collateral_fraction));
            break;
        default:
            throw ConfigError("hedge-sim supports swap and caplet instruments");
    }
    const IntegrationScheme scheme = opt.scheme == "exact"       ? IntegrationScheme::Exact
                                     : opt.scheme == "trapezoid" ? IntegrationScheme::Trapezoid
                                                                 : IntegrationScheme::LeftRiemann;
    std::vector<double> dts;
    for (int s : opt.steps_per_year) dts.push_back(1.0 / s);
    const ReplicationStudy study = replication_study(m, prog, start, dts, opt.paths, opt.seed, scheme);

    // Which point the tracking threshold is judged at: daily rebalancing if run, else the coarsest.
    std::size_t check = 0;
    for (std::size_t i = 0; i < opt.steps_per_year.size(); ++i) {
        if (opt.steps_per_year[i] == 360) {
            check = i;
            break;
        }
        if (opt.steps_per_year[i] < opt.steps_per_year[check]) check = i;
    }
    HedgeReport rep;
    const double limit = opt.threshold * prog.notional;
    rep.breached = study.points[check].mean_max_abs_error > limit;

    json points = json::array();
    for (std::size_t i = 0; i < study.points.size(); ++i)
        points.push_back({{"steps_per_year", opt.steps_per_year[i]},
                          {"dt", study.points[i].dt},
                          {"mean_abs_terminal_error", study.points[i].mean_abs_terminal_error},
                          {"mean_max_abs_error", study.points[i].mean_max_abs_error}});
    rep.summary = {{"schema_version", schema_version},
                   {"command", "hedge-sim"},
                   {"instrument", ins.id},
                   {"kind", to_string(ins.kind)},
                   {"collateral_fraction", prog.beta},
                   {"notional", prog.notional},
                   {"paths", opt.paths},
                   {"seed", opt.seed},
                   {"scheme", opt.scheme},
                   {"points", points},
                   {"mean_tracking_error", study.points[check].mean_abs_terminal_error},
                   {"max_tracking_error", study.points[check].mean_max_abs_error},
                   {"threshold", limit},
                   {"breached", rep.breached}};
    rep.summary["refinement_slope"] = study.points.size() >= 2 ? json(study.slope) : json(nullptr);

    // Ledger of the first path on the first grid, subsampled from the finest grid as in the study.
    const double fine = *std::min_element(dts.begin(), dts.end());
    const auto n_fine = static_cast<std::size_t>(std::llround((prog.maturity - start) / fine));
    const auto stride = static_cast<std::size_t>(std::llround(dts.front() / fine));
    SimConfig cfg;
    cfg.seed = opt.seed;
    cfg.n_paths = 2;
    cfg.threads = 1;
    cfg.grid.resize(n_fine + 1);
    for (std::size_t k = 0; k <= n_fine; ++k)
        cfg.grid[k] = start + (prog.maturity - start) * static_cast<double>(k) / static_cast<double>(n_fine);
    const RatePath full = PathSimulator(m.factor, cfg).path(0);
    RatePath path;
    for (std::size_t k = 0; k <= n_fine; k += stride) {
        path.times.push_back(full.times[k]);
        path.factor.push_back(full.factor[k]);
        path.factor_integral.push_back(full.factor_integral[k]);
    }
    const WealthLedger L = run_hedge(m, path, prog, scheme, opt.threshold);
    std::ostringstream csv;
    csv << "t,V,Vp,C,phi0";
    for (std::size_t k = 1; k <= prog.contracts.size(); ++k) csv << ",phi" << k;
    csv << ",target,error\n";
    for (std::size_t i = 0; i < L.times.size(); ++i) {
        csv << fmt(L.times[i]) << ',' << fmt(L.wealth[i]) << ',' << fmt(L.portfolio[i]) << ',' << fmt(L.collateral[i])
            << ',' << fmt(L.funding_units[i]);
        for (double phi : L.positions[i]) csv << ',' << fmt(phi);
        csv << ',' << fmt(L.target[i]) << ',' << fmt(L.error[i]) << '\n';
    }
    rep.ledger_csv = csv.str();
    return rep;
}

int run(const std::string& command, const std::filesystem::path& scenario, const RunOptions& opt, std::ostream& out,
        std::ostream& err) {
    try {
        const Scenario sc = load_scenario(scenario);
        if (command == "price") {
            const std::string text = price_report(sc).dump(2) + "\n";
            if (opt.output)
                open_output(*opt.output) << text;
            else
                out << text;
            return exit_ok;
        }
        if (command == "futures-curve") {
            if (opt.output) {
                std::ofstream f = open_output(*opt.output);
                write_futures_curve(sc, f);
            } else {
                write_futures_curve(sc, out);
            }
            return exit_ok;
        }
        if (command == "mc-verify") {
            if (!sc.mc) throw ConfigError(scenario.string() + ": scenario has no mc section (seed is mandatory)");
            McOptions o = *sc.mc;
            if (opt.paths) o.paths = *opt.paths;
            if (opt.seed) o.seed = *opt.seed;
            const auto checks = mc_checks(sc, o);
            write_mc_table(checks, out);
            if (opt.output) {
                json rows = json::array();
                for (const McCheck& c : checks)
                    rows.push_back({{"id", c.id}, {"quantity", c.quantity}, {"closed_form", c.closed_form},
                                    {"mc_mean", c.mc_mean}, {"se", c.se}, {"z", c.z}});
                open_output(*opt.output) << json{{"schema_version", schema_version},
                                                 {"command", "mc-verify"},
                                                 {"paths", o.paths},
                                                 {"seed", o.seed},
                                                 {"z_limit", o.z_limit},
                                                 {"checks", rows}}
                                                .dump(2)
                                         << "\n";
            }
            for (const McCheck& c : checks)
                if (!(std::abs(c.z) <= o.z_limit)) {
                    err << "mc-verify: " << c.id << " z-score " << c.z << " exceeds " << o.z_limit << "\n";
                    return exit_numerical;
                }
            return exit_ok;
        }
        if (command == "hedge-sim") {
            if (!sc.hedge) throw ConfigError(scenario.string() + ": scenario has no hedge section (seed is mandatory)");
            HedgeOptions o = *sc.hedge;
            if (opt.paths) o.paths = *opt.paths;
            if (opt.seed) o.seed = *opt.seed;
            const HedgeReport rep = hedge_report(sc, o);
            const std::string text = rep.summary.dump(2) + "\n";
            if (opt.output)
                open_output(*opt.output) << text;
            else
                out << text;
            if (opt.ledger) open_output(*opt.ledger) << rep.ledger_csv;
            if (rep.breached) {
                err << "hedge-sim: tracking error above threshold\n";
                return exit_numerical;
            }
            return exit_ok;
        }
        throw ConfigError("unknown command '" + command + "'");
    } catch (const NumericalError& e) {
        err << "numerical check failed: " << e.what() << "\n";
        return exit_numerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
}

}  // namespace sofr::app
