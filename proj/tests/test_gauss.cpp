#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "csc/gauss.hpp"
#include "doctest.h"

using namespace csc;

TEST_CASE("legendre rules integrate polynomials of degree 2m-1 exactly") {
    for (int m : {1, 2, 3, 5, 8, 16, 33}) {
        const auto& r = gauss::legendre(m);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

        // int_{-1}^{1} x^d dx = 2/(d+1) for even d, 0 for odd d.
        for (int d = 0; d <= 2 * m - 1; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.nodes.size(); ++i)
                s += r.weights[i] * std::pow(r.nodes[i], d);
            const double exact = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
            CHECK(std::abs(s - exact) < 2e-13);
        }
    }
}

TEST_CASE("node symmetry") {
    const auto& r = gauss::legendre(12);
    for (int i = 0; i < 6; ++i) {
        CHECK(r.nodes[i] == doctest::Approx(-r.nodes[11 - i]).epsilon(1e-15));
        CHECK(r.weights[i] == doctest::Approx(r.weights[11 - i]).epsilon(1e-15));
    }
}

TEST_CASE("adaptive integration on known integrals") {
    auto sinf = [](double x) { return std::sin(x); };
    auto res = gauss::integrate_adaptive(sinf, 0.0, std::numbers::pi, 1e-13);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(2.0).epsilon(1e-12));

    auto expf = [](double x) { return std::exp(-x); };
    res = gauss::integrate_adaptive(expf, 0.0, 10.0, 1e-13);
    CHECK(res.value == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));
}

TEST_CASE("adaptive integration resolves a sharp Lorentzian peak") {
    const double a = 1e-3;
    auto f = [&](double x) { return 1.0 / (a * a + x * x); };
    auto res = gauss::integrate_adaptive(f, -1.0, 1.0, 1e-12);
    const double exact = 2.0 / a * std::atan(1.0 / a);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(exact).epsilon(1e-11));
    CHECK(res.panels > 8);
}

TEST_CASE("adaptive error estimate is honest on a smooth integrand") {
    auto f = [](double x) { return std::cos(3.0 * x) * std::exp(x); };
    auto res = gauss::integrate_adaptive(f, 0.0, 2.0, 1e-12);
    const double exact =
        (std::exp(2.0) * (std::cos(6.0) + 3.0 * std::sin(6.0)) - 1.0) / 10.0;
    CHECK(std::abs(res.value - exact) <= std::max(res.err_est, 1e-13 * std::abs(exact)) * 10.0);
}
