#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "sofr/errors.hpp"
#include "sofr/quadrature.hpp"

using namespace sofr;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre nodes and weights match tabulated values") {
    const QuadratureRule r = gauss_legendre(20);
    // boost tabulates the nonnegative half of the symmetric rule
    using table = boost::math::quadrature::gauss<double, 20>;
    const auto& x = table::abscissa();
    const auto& w = table::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool found = false;
        for (std::size_t k = 0; k < r.nodes.size(); ++k)
            if (std::abs(r.nodes[k] - x[i]) <= 1e-14) {
                CHECK(r.weights[k] == doctest::Approx(w[i]).epsilon(1e-13));
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (std::size_t n : {1ul, 2ul, 5ul, 16ul, 64ul}) {
        const QuadratureRule r = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        for (std::size_t k = 0; k <= 2 * n - 1 && k <= 30; ++k) {
            const double q = integrate_legendre(r, 0.0, 2.0, [k](double x) { return std::pow(x, static_cast<double>(k)); });
            CHECK(q == doctest::Approx(std::pow(2.0, k + 1.0) / (k + 1.0)).epsilon(1e-13));
        }
    }
    CHECK(integrate_legendre(gauss_legendre(32), 0.0, std::acos(-1.0), [](double x) { return std::sin(x); }) ==
          doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(gauss_legendre(0), DomainError);
}

TEST_CASE("Gauss-Hermite for the standard normal weight") {
    for (std::size_t n : {4ul, 10ul, 40ul}) {
        const QuadratureRule r = gauss_hermite_normal(n);
        auto moment = [&](int k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
            return s;
        };
        CHECK(moment(0) == doctest::Approx(1.0).epsilon(1e-14));
        double dfact = 1.0;  // (k-1)!!
        for (int k = 2; k <= static_cast<int>(2 * n - 1) && k <= 16; k += 2) {
            dfact *= k - 1;
            CHECK(moment(k) == doctest::Approx(dfact).epsilon(1e-11));
            CHECK(std::abs(moment(k - 1)) <= 1e-12 * dfact);
        }
    }
    const QuadratureRule r = gauss_hermite_normal(40);
    double mgf = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) mgf += r.weights[i] * std::exp(0.7 * r.nodes[i]);
    CHECK(mgf == doctest::Approx(std::exp(0.245)).epsilon(1e-14));
}

}  // TEST_SUITE
