#include "csc/dimension.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "csc/gauss.hpp"

namespace csc {

double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double bubble_mass_radial(int n, double lambda, double rtol) {
    if (n < 3) throw std::invalid_argument("bubble_mass_radial: n must be >= 3");
    if (!(lambda > 0.0)) throw std::invalid_argument("bubble_mass_radial: lambda must be > 0");
    const double c = std::sqrt(static_cast<double>(n) * (n - 2));
    auto f = [&](double r) {
        return std::pow(lambda * c / (lambda * lambda + r * r), n) * std::pow(r, n - 1);
    };
    // Main part on [0, 50 lambda]; the tail maps onto [0, lambda/50] under
    // r -> lambda^2 / r, which preserves the integrand. Both pieces are
    // evaluated by the same adaptive rule.
    const double cut = 50.0 * lambda;
    auto main_part = gauss::integrate_adaptive(f, 0.0, cut, rtol);
    auto tail_part = gauss::integrate_adaptive(f, 0.0, lambda * lambda / cut, rtol);
    return unit_sphere_area(n) * (main_part.value + tail_part.value);
}

DimensionContext make_context(int n) {
    if (n < 3) throw std::invalid_argument("make_context: n must be >= 3");
    DimensionContext ctx;
    ctx.n = n;
    ctx.p = static_cast<double>(n + 2) / (n - 2);
    ctx.q = static_cast<double>(2 * n) / (n - 2);
    ctx.alpha_n = std::pow(static_cast<double>(n) * (n - 2), 0.25 * (n - 2));
    ctx.sphere_area = unit_sphere_area(n);
    ctx.bubble_mass = bubble_mass_radial(n, 1.0);
    return ctx;
}

}  // namespace csc
