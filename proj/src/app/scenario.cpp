#include "app/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sofr/errors.hpp"

namespace sofr::app {

using nlohmann::json;

std::string to_string(InstrumentKind k) {
    switch (k) {
        case InstrumentKind::Swap: return "swap";
        case InstrumentKind::Cap: return "cap";
        case InstrumentKind::Floor: return "floor";
        case InstrumentKind::Caplet: return "caplet";
        case InstrumentKind::Swaption: return "swaption";
        case InstrumentKind::Futures: return "futures";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "non-finite number");
    return v;
}

double number_field(const json& j, const char* key, const std::string& where) {
    return number(field(j, key, where), where + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

std::string string_field(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

Date date_value(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected an ISO date string");
    try {
        return parse_date(j.get<std::string>());
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

std::uint64_t seed_field(const json& j, const std::string& where) {
    const json& v = field(j, "seed", where);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail(where + ".seed", "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

void check_schema(const json& j, const std::string& where) {
    const json& v = field(j, "schema_version", where);
    if (!v.is_number_integer() || v.get<int>() != schema_version)
        fail(where + ".schema_version", "unsupported schema version (expected " + std::to_string(schema_version) + ")");
}

PiecewiseConstant curve_value(const json& j, const ModelFile& m, const std::string& where) {
    if (j.is_number()) return PiecewiseConstant(number(j, where));
    if (!j.is_object()) fail(where, "expected a number or {knots, values}");
    const json& knots = field(j, "knots", where);
    const json& values = field(j, "values", where);
    if (!knots.is_array() || !values.is_array()) fail(where, "knots and values must be arrays");
    std::vector<double> k, v;
    for (std::size_t i = 0; i < knots.size(); ++i)
        k.push_back(m.time_of(date_value(knots[i], where + ".knots[" + std::to_string(i) + "]")));
    for (std::size_t i = 0; i < values.size(); ++i)
        v.push_back(number(values[i], where + ".values[" + std::to_string(i) + "]"));
    try {
        return PiecewiseConstant(std::move(k), std::move(v));
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::vector<Date> date_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of dates");
    std::vector<Date> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(date_value(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Date add_months(Date d, int months) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    year_month_day shifted = ymd + std::chrono::months{months};
    if (!shifted.ok()) shifted = year_month_day_last{shifted.year(), month_day_last{shifted.month()}};
    return sys_days{shifted};
}

// Either an explicit "dates" list or start/end with a period length in months.
std::vector<Date> schedule(const json& j, const std::string& where) {
    if (j.contains("dates")) return date_list(j.at("dates"), where + ".dates");
    const Date start = date_value(field(j, "start", where), where + ".start");
    const Date end = date_value(field(j, "end", where), where + ".end");
    const int months = static_cast<int>(number_or(j, "period_months", 3, where));
    if (months <= 0) fail(where + ".period_months", "must be positive");
    std::vector<Date> d{start};
    for (int k = 1; d.back() < end; ++k) d.push_back(std::min(add_months(start, k * months), end));
    return d;
}

TenorStructure tenor_of(const std::vector<Date>& dates, const ModelFile& m, const std::string& where) {
    std::vector<double> t;
    for (Date d : dates) t.push_back(m.time_of(d));
    try {
        return TenorStructure(std::move(t));
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

Side side_of(const json& j, const std::string& where) {
    if (!j.contains("side")) return Side::Payer;
    const json& s = j.at("side");
    if (s == "payer") return Side::Payer;
    if (s == "receiver") return Side::Receiver;
    fail(where + ".side", "expected \"payer\" or \"receiver\"");
}

std::optional<double> beta_of(const json& j, const std::string& where) {
    if (!j.contains("collateral_fraction")) return std::nullopt;
    const double b = number(j.at("collateral_fraction"), where + ".collateral_fraction");
    if (b < 0.0 || b > 1.0) fail(where + ".collateral_fraction", "must lie in [0,1]");
    return b;
}

Instrument parse_instrument(const json& j, const ModelFile& m, const std::string& where) {
    Instrument ins;
    ins.id = string_field(j, "id", where);
    const std::string kind = string_field(j, "kind", where);
    const double notional = number_or(j, "notional", 1.0, where);
    if (notional <= 0.0) fail(where + ".notional", "must be positive");

    if (kind == "futures") {
        ins.kind = InstrumentKind::Futures;
        const Date s = date_value(field(j, "start", where), where + ".start");
        const Date e = date_value(field(j, "end", where), where + ".end");
        if (!(s < e)) fail(where, "futures start must precede end");
        ins.dates = {s, e};
        ins.futures.start = m.time_of(s);
        ins.futures.delta = m.time_of(e) - ins.futures.start;
        const std::string style = j.value("style", std::string("compound"));
        if (style == "compound")
            ins.futures.style = FuturesStyle::ThreeMonthCompound;
        else if (style == "simple")
            ins.futures.style = FuturesStyle::OneMonthSimple;
        else
            fail(where + ".style", "expected \"compound\" or \"simple\"");
        return ins;
    }

    ins.dates = schedule(j, where);
    const TenorStructure tenor = tenor_of(ins.dates, m, where);
    const std::optional<double> beta = beta_of(j, where);

    auto strike = [&](const char* key) {
        const json& k = field(j, key, where);
        if (k.is_string()) {
            if (k == "fair" || k == "atm") {
                ins.fair_rate = true;
                return 0.0;
            }
            fail(where + "." + key, "expected a number or \"fair\"");
        }
        return number(k, where + "." + key);
    };

    if (kind == "swap" || kind == "swaption") {
        ins.kind = kind == "swap" ? InstrumentKind::Swap : InstrumentKind::Swaption;
        ins.swap.tenor = tenor;
        ins.swap.fixed_rate = strike(kind == "swap" ? "fixed_rate" : "strike");
        ins.swap.notional = notional;
        ins.swap.side = side_of(j, where);
        ins.swap.collateral_fraction = beta;
        if (ins.kind == InstrumentKind::Swaption) {
            ins.swaption.underlying = ins.swap;
            ins.swaption.nodes = static_cast<std::size_t>(number_or(j, "nodes", 64, where));
        }
        return ins;
    }
    if (kind == "cap" || kind == "floor" || kind == "caplet") {
        ins.kind = kind == "cap" ? InstrumentKind::Cap : kind == "floor" ? InstrumentKind::Floor : InstrumentKind::Caplet;
        if (ins.kind == InstrumentKind::Caplet && tenor.periods() != 1)
            fail(where, "a caplet covers exactly one period");
        ins.cap.tenor = tenor;
        ins.cap.strike = strike("strike");
        if (!ins.fair_rate && ins.cap.strike <= 0.0) fail(where + ".strike", "must be positive");
        ins.cap.notional = notional;
        ins.cap.collateral_fraction = beta;
        return ins;
    }
    fail(where + ".kind", "unknown instrument kind '" + kind + "'");
}

}  // namespace

ModelFile parse_model(const json& j) {
    const std::string where = "model";
    check_schema(j, where);
    ModelFile m;
    m.epoch = date_value(field(j, "epoch", where), where + ".epoch");
    if (j.contains("day_count")) {
        try {
            m.day_count = parse_day_count(j.at("day_count").get<std::string>());
        } catch (const std::exception& e) {
            fail(where + ".day_count", e.what());
        }
    }
    const json& f = field(j, "factor", where);
    m.model.factor.a = number_field(f, "a", where + ".factor");
    m.model.factor.b = number_field(f, "b", where + ".factor");
    m.model.factor.sigma = number_field(f, "sigma", where + ".factor");
    m.model.factor.x0 = number_field(f, "x0", where + ".factor");
    if (j.contains("bases")) {
        const json& b = j.at("bases");
        if (!b.is_object()) fail(where + ".bases", "expected an object keyed by s, e, u, c, h");
        for (auto it = b.begin(); it != b.end(); ++it) {
            const auto label = parse_rate_label(it.key());
            if (!label) fail(where + ".bases", "unknown rate label '" + it.key() + "'");
            m.model.set_basis(*label, curve_value(it.value(), m, where + ".bases." + it.key()));
        }
    }
    if (j.contains("collateral_fraction"))
        m.model.collateral_fraction = curve_value(j.at("collateral_fraction"), m, where + ".collateral_fraction");
    if (j.contains("holidays"))
        for (Date d : date_list(j.at("holidays"), where + ".holidays")) m.calendar.add_holiday(d);
    try {
        m.model.validate();
    } catch (const Error& e) {
        fail(where, e.what());
    }
    return m;
}

ModelFile load_model(const std::filesystem::path& path) {
    try {
        return parse_model(read_json(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

RatePath history_from_fixings(const ModelFile& m, const std::vector<RateRow>& rows, Date until) {
    std::vector<RateRow> used;
    for (const RateRow& r : rows)
        if (r.date < until) used.push_back(r);
    if (used.empty()) throw MissingHistoryError("no fixings before " + format_date(until));
    const BasisCurve& s = m.model.basis(RateLabel::s);
    const double dpy = days_per_year(m.day_count);
    RatePath p;
    double acc = 0.0;
    for (std::size_t j = 0; j < used.size(); ++j) {
        const Date d = used[j].date;
        const Date expected = m.calendar.next_business_day(d);
        const Date next = (j + 1 < used.size()) ? used[j + 1].date : until;
        if (j + 1 < used.size() && next != expected)
            throw CoverageError("missing fixing for business day " + format_date(expected));
        if (j + 1 == used.size() && expected < until)
            throw CoverageError("missing fixing for business day " + format_date(expected));
        const double t0 = m.time_of(d), t1 = m.time_of(next);
        const int n = static_cast<int>((next - d).count());
        p.times.push_back(t0);
        p.factor.push_back(used[j].rate - s.value(t0));
        p.factor_integral.push_back(acc);
        acc += std::log1p(n * used[j].rate / dpy) - s.integral(t0, t1);
    }
    p.times.push_back(m.time_of(until));
    p.factor.push_back(p.factor.back());
    p.factor_integral.push_back(acc);
    return p;
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
    const std::string where = "scenario";
    check_schema(j, where);
    Scenario sc;
    const json& mj = field(j, "model", where);
    if (mj.is_string())
        sc.model = load_model(base_dir / mj.get<std::string>());
    else
        sc.model = parse_model(mj);
    const ModelFile& m = sc.model;

    sc.valuation_date = j.contains("valuation_date") ? date_value(j.at("valuation_date"), where + ".valuation_date")
                                                     : m.epoch;
    if (sc.valuation_date < m.epoch) fail(where + ".valuation_date", "precedes the model epoch");
    sc.valuation_time = m.time_of(sc.valuation_date);

    if (j.contains("fixings")) {
        const json& fj = j.at("fixings");
        if (!fj.is_string()) fail(where + ".fixings", "expected a path to a date,rate file");
        sc.history = history_from_fixings(m, read_fixings_csv(base_dir / fj.get<std::string>()), sc.valuation_date);
    }
    if (j.contains("factor_value")) {
        sc.factor_value = number(j.at("factor_value"), where + ".factor_value");
    } else if (sc.valuation_date == m.epoch) {
        sc.factor_value = m.model.factor.x0;
    } else {
        fail(where, "factor_value is required when the valuation date differs from the model epoch");
    }

    if (j.contains("instruments")) {
        const json& arr = j.at("instruments");
        if (!arr.is_array()) fail(where + ".instruments", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Instrument ins = parse_instrument(arr[i], m, where + ".instruments[" + std::to_string(i) + "]");
            for (const Instrument& other : sc.instruments)
                if (other.id == ins.id) fail(where + ".instruments[" + std::to_string(i) + "]", "duplicate id " + ins.id);
            sc.instruments.push_back(std::move(ins));
        }
    }

    if (j.contains("futures_curve")) {
        const json& fc = j.at("futures_curve");
        const std::string w = where + ".futures_curve";
        std::vector<std::pair<Date, Date>> periods;
        if (fc.contains("contracts")) {
            const json& cs = fc.at("contracts");
            if (!cs.is_array()) fail(w + ".contracts", "expected an array");
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const std::string wi = w + ".contracts[" + std::to_string(i) + "]";
                periods.emplace_back(date_value(field(cs[i], "start", wi), wi + ".start"),
                                     date_value(field(cs[i], "end", wi), wi + ".end"));
            }
        } else {
            const Date first = date_value(field(fc, "first", w), w + ".first");
            const int count = static_cast<int>(number_field(fc, "count", w));
            const int months = static_cast<int>(number_or(fc, "period_months", 3, w));
            if (count <= 0 || months <= 0) fail(w, "count and period_months must be positive");
            for (int k = 0; k < count; ++k)
                periods.emplace_back(add_months(first, k * months), add_months(first, (k + 1) * months));
        }
        for (auto [s, e] : periods) {
            if (!(s < e)) fail(w, "contract start must precede its end");
            sc.curve.push_back({m.time_of(s), m.time_of(e) - m.time_of(s), FuturesStyle::ThreeMonthCompound});
            sc.curve_dates.emplace_back(s, e);
        }
    }

    if (j.contains("hedge")) {
        const json& h = j.at("hedge");
        const std::string w = where + ".hedge";
        HedgeOptions o;
        o.instrument = string_field(h, "instrument", w);
        o.seed = seed_field(h, w);
        sc.has_seed = true;
        o.paths = static_cast<std::size_t>(number_or(h, "paths", 50, w));
        o.threshold = number_or(h, "threshold", 1e-3, w);
        o.scheme = h.value("scheme", std::string("left"));
        if (o.scheme != "left" && o.scheme != "trapezoid" && o.scheme != "exact")
            fail(w + ".scheme", "expected \"left\", \"trapezoid\" or \"exact\"");
        if (h.contains("steps_per_year")) {
            o.steps_per_year.clear();
            const json& s = h.at("steps_per_year");
            if (!s.is_array() || s.empty()) fail(w + ".steps_per_year", "expected a nonempty array");
            for (const json& v : s) {
                if (!v.is_number_integer() || v.get<int>() <= 0) fail(w + ".steps_per_year", "expected positive integers");
                o.steps_per_year.push_back(v.get<int>());
            }
        }
        if (o.paths < 2) fail(w + ".paths", "need at least two paths");
        sc.hedge = o;
    }
    if (j.contains("mc")) {
        const json& mc = j.at("mc");
        const std::string w = where + ".mc";
        McOptions o;
        o.seed = seed_field(mc, w);
        sc.has_seed = true;
        o.paths = static_cast<std::size_t>(number_or(mc, "paths", 200000, w));
        o.antithetic = mc.value("antithetic", false);
        o.z_limit = number_or(mc, "z_limit", 4.0, w);
        if (o.paths < 4) fail(w + ".paths", "need at least four paths");
        if (o.antithetic && o.paths % 2) fail(w + ".paths", "antithetic runs need an even path count");
        sc.mc = o;
    }

    // Resolve "fair" strikes at the valuation state.
    const RatePath* hist = sc.history ? &*sc.history : nullptr;
    for (Instrument& ins : sc.instruments) {
        if (!ins.fair_rate) continue;
        const TenorStructure& ten = ins.kind == InstrumentKind::Swap || ins.kind == InstrumentKind::Swaption
                                        ? ins.swap.tenor
                                        : ins.cap.tenor;
        const std::optional<double> beta = ins.kind == InstrumentKind::Swap || ins.kind == InstrumentKind::Swaption
                                               ? ins.swap.collateral_fraction
                                               : ins.cap.collateral_fraction;
        const double k = forward_swap_rate(m.model, sc.factor_value, sc.valuation_time, ten, beta, hist);
        ins.swap.fixed_rate = k;
        ins.swaption.underlying.fixed_rate = k;
        ins.cap.strike = k;
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    const json j = read_json(path);
    Scenario sc;
    try {
        sc = parse_scenario(j, path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    sc.source = path;
    return sc;
}

const Instrument& find_instrument(const Scenario& s, const std::string& id) {
    for (const Instrument& i : s.instruments)
        if (i.id == id) return i;
    throw ConfigError("no instrument with id '" + id + "'");
}

}  // namespace sofr::app
