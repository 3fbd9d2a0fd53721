// Python bindings: model setup, closed-form prices and the scenario commands.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "app/commands.hpp"
#include "sofr/calendar.hpp"
#include "sofr/errors.hpp"
#include "sofr/futures.hpp"
#include "sofr/options.hpp"
#include "sofr/swaps.hpp"

namespace py = pybind11;
using namespace sofr;

namespace {

RateLabel label_of(const std::string& name) {
    if (auto l = parse_rate_label(name)) return *l;
    throw py::value_error("unknown rate label '" + name + "'");
}

SwapSpec make_swap(std::vector<double> dates, double fixed_rate, double notional, bool payer,
                   std::optional<double> beta) {
    SwapSpec s;
    s.tenor = TenorStructure(std::move(dates));
    s.fixed_rate = fixed_rate;
    s.notional = notional;
    s.side = payer ? Side::Payer : Side::Receiver;
    s.collateral_fraction = beta;
    return s;
}

}  // namespace

PYBIND11_MODULE(sofr, m) {
    m.doc() = "Single-factor multi-curve SOFR model";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    py::class_<FactorParams>(m, "FactorParams")
        .def(py::init([](double a, double b, double sigma, double x0) {
                 FactorParams p{a, b, sigma, x0};
                 p.validate();
                 return p;
             }),
             py::arg("a"), py::arg("b"), py::arg("sigma"), py::arg("x0"))
        .def_readwrite("a", &FactorParams::a)
        .def_readwrite("b", &FactorParams::b)
        .def_readwrite("sigma", &FactorParams::sigma)
        .def_readwrite("x0", &FactorParams::x0);

    py::class_<MarketModel>(m, "MarketModel")
        .def(py::init([](const FactorParams& f, double beta) {
                 MarketModel mm;
                 mm.factor = f;
                 mm.collateral_fraction = PiecewiseConstant(beta);
                 mm.validate();
                 return mm;
             }),
             py::arg("factor"), py::arg("collateral_fraction") = 0.0)
        .def_readwrite("factor", &MarketModel::factor)
        .def("set_basis", [](MarketModel& mm, const std::string& label, double spread) {
            mm.set_basis(label_of(label), PiecewiseConstant(spread));
        }, py::arg("label"), py::arg("spread"))
        .def("basis", [](const MarketModel& mm, const std::string& label, double t) {
            return mm.basis(label_of(label)).value(t);
        }, py::arg("label"), py::arg("t") = 0.0);

    m.def("bond", [](const MarketModel& mm, const std::string& label, double x, double t, double T) {
        return synthetic_bond(mm, label_of(label), x, t, T);
    }, py::arg("model"), py::arg("label"), py::arg("x"), py::arg("t"), py::arg("T"));

    m.def("futures_rate", [](const MarketModel& mm, double x, double t, double start, double delta,
                             std::optional<double> accrued) {
        return futures_rate(mm, x, t, FuturesContract{start, delta}, accrued);
    }, py::arg("model"), py::arg("x"), py::arg("t"), py::arg("start"), py::arg("delta"), py::arg("accrued") = py::none());

    m.def("swap_price", [](const MarketModel& mm, double x, double t, std::vector<double> dates, double fixed_rate,
                           double notional, bool payer, std::optional<double> beta) {
        return swap_price(mm, x, t, make_swap(std::move(dates), fixed_rate, notional, payer, beta));
    }, py::arg("model"), py::arg("x"), py::arg("t"), py::arg("dates"), py::arg("fixed_rate"),
       py::arg("notional") = 1.0, py::arg("payer") = true, py::arg("collateral_fraction") = py::none());

    m.def("forward_swap_rate", [](const MarketModel& mm, double x, double t, std::vector<double> dates,
                                  std::optional<double> beta) {
        return forward_swap_rate(mm, x, t, TenorStructure(std::move(dates)), beta);
    }, py::arg("model"), py::arg("x"), py::arg("t"), py::arg("dates"), py::arg("collateral_fraction") = py::none());

    m.def("caplet_price", [](const MarketModel& mm, double x, double t, double start, double delta, double strike,
                             double notional) {
        const FuturesContract c{start, delta};
        return caplet_price(mm, x, t, c, strike, futures_state(mm, x, t, c), notional);
    }, py::arg("model"), py::arg("x"), py::arg("t"), py::arg("start"), py::arg("delta"), py::arg("strike"),
       py::arg("notional") = 1.0);

    m.def("swaption_price", [](const MarketModel& mm, double x, double t, std::vector<double> dates, double strike,
                               double notional, bool payer) {
        SwaptionSpec s;
        s.underlying = make_swap(std::move(dates), strike, notional, payer, std::nullopt);
        return swaption_price(mm, x, t, s);
    }, py::arg("model"), py::arg("x"), py::arg("t"), py::arg("dates"), py::arg("strike"), py::arg("notional") = 1.0,
       py::arg("payer") = true);

    m.def("settlement_display_price", &settlement_display_price, py::arg("rate"));

    m.def("price_scenario", [](const std::string& path) {
        return app::price_report(app::load_scenario(path)).dump();
    }, py::arg("path"), "Price every instrument in a scenario file; returns the JSON report as a string.");

    m.def("futures_curve_csv", [](const std::string& path) {
        std::ostringstream out;
        app::write_futures_curve(app::load_scenario(path), out);
        return out.str();
    }, py::arg("path"));
}
