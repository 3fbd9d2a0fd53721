#pragma once

// Business-day calendars, day counts and the discrete averaging conventions
// applied to published overnight fixings (SOFR, EFFR).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sofr {

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD).
Date parse_date(std::string_view iso);
std::string format_date(Date d);

enum class DayCount { Act360, Act365Fixed };

DayCount parse_day_count(std::string_view name);
double days_per_year(DayCount dc);

/// Year fraction of (start, end] under the given convention.
double year_fraction(Date start, Date end, DayCount dc = DayCount::Act360);

/// Weekends plus an optional holiday list. The default calendar is weekends-only.
class Calendar {
   public:
    Calendar() = default;
    explicit Calendar(std::set<Date> holidays) : holidays_(std::move(holidays)) {}

    bool is_business_day(Date d) const;
    Date next_business_day(Date d) const;
    /// Business days in [start, end).
    std::vector<Date> business_days(Date start, Date end) const;

    void add_holiday(Date d) { holidays_.insert(d); }
    const std::set<Date>& holidays() const { return holidays_; }

   private:
    std::set<Date> holidays_;
};

/// Accrual period [start, end] with its year fraction.
struct AccrualPeriod {
    Date start;
    Date end;
    DayCount day_count = DayCount::Act360;

    AccrualPeriod(Date s, Date e, DayCount dc = DayCount::Act360);

    /// Calendar days n_c in the period.
    int calendar_days() const;
    double year_fraction() const;
};

/// Published overnight fixings with the calendar-day weight each one applies to.
struct FixingSeries {
    std::vector<Date> dates;
    std::vector<double> values;
    std::vector<int> weights;

    std::size_t size() const { return dates.size(); }
    void validate() const;
};

/// Attaches calendar weights to fixings on every business day of `period`.
/// A fixing applies until the next business day (Friday -> 3, longer across holidays);
/// the last one runs to the period end. Rates must be given for exactly the
/// business days of the period.
FixingSeries make_fixing_series(const Calendar& cal, const AccrualPeriod& period,
                                std::span<const Date> dates, std::span<const double> rates);

/// Constant fixing on every business day of the period.
FixingSeries constant_fixing_series(const Calendar& cal, const AccrualPeriod& period, double rate);

/// Daily-compounded growth factor prod(1 + n_j rho_j / 360) over the period.
double compound_growth(const FixingSeries& fixings, const AccrualPeriod& period);

/// Act/360 compounded average: (360/n_c)[prod(1 + n_j rho_j/360) - 1].
double compound_average(const FixingSeries& fixings, const AccrualPeriod& period);

/// Simple average: (360/n_c) sum n_j rho_j / 360.
double simple_average(const FixingSeries& fixings, const AccrualPeriod& period);

/// Fixed leg of an OIS: the constant OIS rate compounded on the floating leg's calendar.
double ois_fixed_leg(double ois_rate, const FixingSeries& calendar_weights, const AccrualPeriod& period);
double ois_fixed_leg(double ois_rate, const Calendar& cal, const AccrualPeriod& period);

/// Rounds a decimal rate to the nearest 1/10 of a basis point.
double round_to_tenth_bp(double rate);

/// Exchange settlement display in index points: 100 minus the rounded rate in percent.
double settlement_display_price(double rate);

/// Reads `date,rate` rows (ISO dates, decimal rates). An optional header line is skipped.
struct RateRow {
    Date date;
    double rate;
};
std::vector<RateRow> read_fixings_csv(const std::filesystem::path& path);

}  // namespace sofr
