#include "sofr/calendar.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sofr/errors.hpp"

namespace sofr {

namespace {

int parse_int(std::string_view s, std::string_view whole) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ConfigError("invalid date '" + std::string(whole) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Date parse_date(std::string_view iso) {
    using namespace std::chrono;
    iso = trim(iso);
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        throw ConfigError("invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
    const year_month_day ymd{year{parse_int(iso.substr(0, 4), iso)},
                             month{static_cast<unsigned>(parse_int(iso.substr(5, 2), iso))},
                             day{static_cast<unsigned>(parse_int(iso.substr(8, 2), iso))}};
    if (!ymd.ok()) throw ConfigError("invalid calendar date '" + std::string(iso) + "'");
    return sys_days{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DayCount parse_day_count(std::string_view name) {
    if (name == "act/360" || name == "ACT/360" || name == "Act360") return DayCount::Act360;
    if (name == "act/365" || name == "ACT/365" || name == "Act365Fixed") return DayCount::Act365Fixed;
    throw ConfigError("unknown day count '" + std::string(name) + "'");
}

double days_per_year(DayCount dc) { return dc == DayCount::Act360 ? 360.0 : 365.0; }

double year_fraction(Date start, Date end, DayCount dc) {
    return static_cast<double>((end - start).count()) / days_per_year(dc);
}

bool Calendar::is_business_day(Date d) const {
    const std::chrono::weekday wd{d};
    if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) return false;
    return !holidays_.contains(d);
}

Date Calendar::next_business_day(Date d) const {
    do {
        d += std::chrono::days{1};
    } while (!is_business_day(d));
    return d;
}

std::vector<Date> Calendar::business_days(Date start, Date end) const {
    std::vector<Date> out;
    for (Date d = start; d < end; d += std::chrono::days{1})
        if (is_business_day(d)) out.push_back(d);
    return out;
}

AccrualPeriod::AccrualPeriod(Date s, Date e, DayCount dc) : start(s), end(e), day_count(dc) {
    SOFR_REQUIRE(start < end, DomainError, "accrual period must have start < end");
}

int AccrualPeriod::calendar_days() const { return static_cast<int>((end - start).count()); }

double AccrualPeriod::year_fraction() const { return sofr::year_fraction(start, end, day_count); }

void FixingSeries::validate() const {
    SOFR_REQUIRE(dates.size() == values.size() && dates.size() == weights.size(), CalendarError,
                 "fixing series: dates, values and weights differ in length");
    SOFR_REQUIRE(!dates.empty(), CoverageError, "fixing series is empty");
    for (std::size_t j = 0; j < dates.size(); ++j) {
        SOFR_REQUIRE(weights[j] >= 1, CalendarError, "fixing weight below 1 on " + format_date(dates[j]));
        SOFR_REQUIRE(std::isfinite(values[j]), DomainError, "non-finite fixing on " + format_date(dates[j]));
        if (j > 0)
            SOFR_REQUIRE(dates[j - 1] < dates[j], CalendarError, "fixing dates not strictly increasing");
    }
}

namespace {

// Checks the fixings tile the period: first fixing on the start date, each one
// applying exactly up to the next, total weight equal to n_c.
void check_coverage(const FixingSeries& f, const AccrualPeriod& p) {
    f.validate();
    SOFR_REQUIRE(f.dates.front() == p.start, CoverageError,
                 "no fixing on period start " + format_date(p.start));
    SOFR_REQUIRE(f.dates.back() < p.end, CoverageError, "fixing on or after period end");
    for (std::size_t j = 0; j + 1 < f.size(); ++j) {
        if (f.dates[j] + std::chrono::days{f.weights[j]} != f.dates[j + 1])
            throw CoverageError("coverage gap or overlap after fixing " + format_date(f.dates[j]));
    }
    long total = 0;
    for (int w : f.weights) total += w;
    if (total != p.calendar_days())
        throw CalendarError("fixing weights sum to " + std::to_string(total) + " but period has " +
                            std::to_string(p.calendar_days()) + " calendar days");
}

}  // namespace

FixingSeries make_fixing_series(const Calendar& cal, const AccrualPeriod& period,
                                std::span<const Date> dates, std::span<const double> rates) {
    SOFR_REQUIRE(dates.size() == rates.size(), ConfigError, "dates and rates differ in length");
    const auto bdays = cal.business_days(period.start, period.end);
    if (bdays.size() != dates.size())
        throw CoverageError("expected " + std::to_string(bdays.size()) + " fixings in period, got " +
                            std::to_string(dates.size()));
    FixingSeries out;
    for (std::size_t j = 0; j < bdays.size(); ++j) {
        if (bdays[j] != dates[j]) throw CoverageError("missing fixing for business day " + format_date(bdays[j]));
        const Date next = (j + 1 < bdays.size()) ? bdays[j + 1] : period.end;
        out.dates.push_back(bdays[j]);
        out.values.push_back(rates[j]);
        out.weights.push_back(static_cast<int>((next - bdays[j]).count()));
    }
    return out;
}

FixingSeries constant_fixing_series(const Calendar& cal, const AccrualPeriod& period, double rate) {
    const auto bdays = cal.business_days(period.start, period.end);
    std::vector<double> rates(bdays.size(), rate);
    return make_fixing_series(cal, period, bdays, rates);
}

namespace {

// growth - 1, carried directly: (1 + d)(1 + y) - 1 = d + y + d y keeps full
// relative precision where forming the product first would cancel.
double compound_excess(const FixingSeries& fixings, const AccrualPeriod& period) {
    check_coverage(fixings, period);
    const double basis = days_per_year(period.day_count);
    double d = 0.0;
    for (std::size_t j = 0; j < fixings.size(); ++j) {
        const double y = fixings.weights[j] * fixings.values[j] / basis;
        d = d + y + d * y;
    }
    return d;
}

}  // namespace

double compound_growth(const FixingSeries& fixings, const AccrualPeriod& period) {
    return 1.0 + compound_excess(fixings, period);
}

double compound_average(const FixingSeries& fixings, const AccrualPeriod& period) {
    return compound_excess(fixings, period) / period.year_fraction();
}

double simple_average(const FixingSeries& fixings, const AccrualPeriod& period) {
    check_coverage(fixings, period);
    const double basis = days_per_year(period.day_count);
    double sum = 0.0;
    for (std::size_t j = 0; j < fixings.size(); ++j) sum += fixings.weights[j] * fixings.values[j] / basis;
    return sum / period.year_fraction();
}

double ois_fixed_leg(double ois_rate, const FixingSeries& calendar_weights, const AccrualPeriod& period) {
    SOFR_REQUIRE(std::isfinite(ois_rate), DomainError, "OIS rate must be finite");
    FixingSeries fixed = calendar_weights;
    std::fill(fixed.values.begin(), fixed.values.end(), ois_rate);
    return compound_average(fixed, period);
}

double ois_fixed_leg(double ois_rate, const Calendar& cal, const AccrualPeriod& period) {
    return ois_fixed_leg(ois_rate, constant_fixing_series(cal, period, 0.0), period);
}

double round_to_tenth_bp(double rate) {
    constexpr double tenth_bp = 1e-5;
    return std::round(rate / tenth_bp) * tenth_bp;
}

double settlement_display_price(double rate) {
    // Rounded in percent units (3 decimals) so the display is exact in decimal.
    const double pct = std::round(rate * 1e5) / 1e3;
    return std::round((100.0 - pct) * 1e3) / 1e3;
}

std::vector<RateRow> read_fixings_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open fixings file '" + path.string() + "'");
    std::vector<RateRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const auto comma = sv.find(',');
        if (comma == std::string_view::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 'date,rate'");
        const auto date_field = trim(sv.substr(0, comma));
        const auto rate_field = trim(sv.substr(comma + 1));
        if (lineno == 1 && date_field == "date") continue;
        try {
            RateRow row{parse_date(date_field), 0.0};
            std::size_t used = 0;
            row.rate = std::stod(std::string(rate_field), &used);
            if (used != rate_field.size()) throw ConfigError("trailing characters in rate");
            if (!rows.empty() && !(rows.back().date < row.date))
                throw ConfigError("dates must be strictly increasing");
            rows.push_back(row);
        } catch (const std::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

}  // namespace sofr
