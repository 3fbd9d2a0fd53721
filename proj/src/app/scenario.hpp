#pragma once

// Model and scenario files. Everything in them is dated; dates become model
// times (year fractions from the model epoch) here and nowhere else.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sofr/calendar.hpp"
#include "sofr/curves.hpp"
#include "sofr/futures.hpp"
#include "sofr/options.hpp"
#include "sofr/swaps.hpp"

namespace sofr::app {

inline constexpr int schema_version = 1;

struct ModelFile {
    MarketModel model;
    Date epoch;
    DayCount day_count = DayCount::Act360;
    Calendar calendar;

    double time_of(Date d) const { return year_fraction(epoch, d, day_count); }
};

enum class InstrumentKind { Swap, Cap, Floor, Caplet, Swaption, Futures };

std::string to_string(InstrumentKind k);

struct Instrument {
    std::string id;
    InstrumentKind kind = InstrumentKind::Swap;
    std::vector<Date> dates;  ///< payment dates T_0..T_n (futures: start, end)
    bool fair_rate = false;   ///< strike set to the forward swap rate at valuation
    SwapSpec swap;            ///< swaps, and the underlying of swaptions
    CapSpec cap;              ///< caps, floors, caplets
    SwaptionSpec swaption;
    FuturesContract futures;
};

struct HedgeOptions {
    std::string instrument;
    std::vector<int> steps_per_year{360, 720, 1440};
    std::size_t paths = 50;
    std::uint64_t seed = 0;
    double threshold = 1e-3;  ///< per unit notional
    std::string scheme = "left";
};

struct McOptions {
    std::size_t paths = 200000;
    std::uint64_t seed = 0;
    bool antithetic = false;
    double z_limit = 4.0;
};

struct Scenario {
    std::filesystem::path source;
    ModelFile model;
    Date valuation_date;
    double valuation_time = 0.0;
    double factor_value = 0.0;            ///< x at the valuation time
    std::optional<RatePath> history;      ///< realized factor path up to the valuation time
    std::vector<Instrument> instruments;
    std::vector<FuturesContract> curve;   ///< contracts for futures-curve
    std::vector<std::pair<Date, Date>> curve_dates;
    std::optional<HedgeOptions> hedge;
    std::optional<McOptions> mc;
    bool has_seed = false;
};

ModelFile parse_model(const nlohmann::json& j);
ModelFile load_model(const std::filesystem::path& path);

/// Loads a scenario; relative file references resolve against the scenario's directory.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Realized factor path from SOFR fixings: each fixing's daily growth
/// ln(1 + n_j rho_j / 360) less the s-basis over its days is the factor integral.
RatePath history_from_fixings(const ModelFile& m, const std::vector<RateRow>& rows, Date until);

const Instrument& find_instrument(const Scenario& s, const std::string& id);

}  // namespace sofr::app
