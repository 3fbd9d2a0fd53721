// sofr: price, hedge-sim, mc-verify and futures-curve over a scenario file.
//
// Exit codes: 0 ok, 2 invalid input, 3 a numerical check failed
// (quadrature disagreement, MC z-score, tracking error above threshold).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Single-factor SOFR model: pricing, hedging and Monte-Carlo checks"};
    app.require_subcommand(1);

    std::string scenario;
    std::string output, ledger;
    std::size_t paths = 0;
    std::uint64_t seed = 0;

    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("scenario", scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output, "write the result here instead of stdout");
        return sub;
    };
    add("price", "price every instrument in the scenario (JSON)");
    CLI::App* hedge = add("hedge-sim", "simulate the self-financing hedge of the scenario's hedge instrument");
    hedge->add_option("--ledger", ledger, "CSV wealth ledger of the first path");
    hedge->add_option("--paths", paths, "number of simulated paths");
    hedge->add_option("--seed", seed, "override the scenario seed");
    CLI::App* mc = add("mc-verify", "compare closed-form prices with Monte-Carlo estimates");
    mc->add_option("--paths", paths, "number of simulated paths");
    mc->add_option("--seed", seed, "override the scenario seed");
    add("futures-curve", "futures rates for the scenario's contract strip (CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sofr::app::exit_validation;
    }

    const CLI::App* used = app.get_subcommands().front();
    sofr::app::RunOptions opt;
    if (!output.empty()) opt.output = output;
    if (!ledger.empty()) opt.ledger = ledger;
    if (const CLI::Option* o = used->get_option_no_throw("--paths"); o && o->count()) opt.paths = paths;
    if (const CLI::Option* o = used->get_option_no_throw("--seed"); o && o->count()) opt.seed = seed;
    return sofr::app::run(used->get_name(), scenario, opt, std::cout, std::cerr);
}
