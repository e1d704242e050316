#pragma once

#include <functional>
#include <vector>

namespace csc::gauss {

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes/weights for an m-point Gauss-Legendre rule (cached per order).
/// Nodes are found by Newton iteration on P_m; accurate to ~1 ulp.
const Rule& legendre(int m);

/// Fixed-order integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int order = 24);

struct AdaptiveResult {
    double value = 0.0;
    double err_est = 0.0;
    int panels = 0;
    bool converged = true;
};

/// Adaptive bisection with |coarse - refined| panel error estimates.
/// Accepts a panel when the estimate is below its share of max(atol, rtol*|whole|).
/// Stops subdividing (and reports converged = false) once max_panels panels
/// have been accepted, so a tolerance below the integrand's noise floor
/// degrades to a finite answer with an honest error bound instead of hanging.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rtol = 1e-12, double atol = 0.0, int max_depth = 48,
                                  int max_panels = 20000);

}  // namespace csc::gauss
