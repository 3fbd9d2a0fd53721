#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "app/scenario.hpp"

namespace sofr::app {

enum ExitCode { exit_ok = 0, exit_validation = 2, exit_numerical = 3 };

struct RunOptions {
    std::optional<std::filesystem::path> output;  ///< main artifact; stdout when unset
    std::optional<std::filesystem::path> ledger;  ///< hedge-sim ledger CSV
    std::optional<std::size_t> paths;             ///< overrides the scenario's path count
    std::optional<std::uint64_t> seed;
};

nlohmann::json price_report(const Scenario& sc);
void write_futures_curve(const Scenario& sc, std::ostream& out);

struct McCheck {
    std::string id;
    std::string quantity;
    double closed_form = 0.0;
    double mc_mean = 0.0;
    double se = 0.0;
    double z = 0.0;
};
std::vector<McCheck> mc_checks(const Scenario& sc, const McOptions& opt);
void write_mc_table(const std::vector<McCheck>& checks, std::ostream& out);

struct HedgeReport {
    nlohmann::json summary;
    std::string ledger_csv;
    bool breached = false;
};
HedgeReport hedge_report(const Scenario& sc, const HedgeOptions& opt);

/// Runs one subcommand and maps failures to exit codes: 2 for invalid input,
/// 3 for a failed numerical check. Diagnostics go to `err`.
int run(const std::string& command, const std::filesystem::path& scenario, const RunOptions& opt, std::ostream& out,
        std::ostream& err);

}  // namespace sofr::app
