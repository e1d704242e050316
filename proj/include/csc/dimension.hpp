#pragma once

namespace csc {

/// Dimension-dependent constants for the conformal scalar curvature equation
///     Delta u + K u^{(n+2)/(n-2)} = 0   on R^n, n >= 3.
///
/// The critical exponents are kept as integer fractions (numerator over n-2)
/// and the doubles are derived from them, so p*(n-2) == n+2 and
/// q*(n-2) == 2n hold exactly.
struct DimensionContext {
    int n = 0;

    // p = (n+2)/(n-2): the equation's nonlinearity.
    // q = 2n/(n-2):    the volume-integrand exponent (q = p + 1).
    double p = 0.0;
    double q = 0.0;

    /// alpha_n = [n(n-2)]^{(n-2)/4}, the standard-bubble amplitude.
    double alpha_n = 0.0;

    /// Surface area of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
    double sphere_area = 0.0;

    /// V_n: the q-mass of one standard bubble over all of R^n, evaluated by
    /// radial quadrature in make_context (scale-invariant in lambda).
    double bubble_mass = 0.0;

    /// (n-2)/2: radial decay exponent of the bubble, also the cylinder weight.
    double bubble_exp() const { return 0.5 * (n - 2); }
};

/// Builds the context for dimension n. Throws std::invalid_argument for n < 3.
DimensionContext make_context(int n);

/// Unit-sphere area 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

/// The bubble q-mass computed as a radial integral at scale lambda:
///     omega_n * int_0^inf ( sqrt(n(n-2)) lambda / (lambda^2 + r^2) )^n r^{n-1} dr.
/// The value is independent of lambda; the quadrature runs in r (no rescaling),
/// with the far tail folded in through the exact inversion symmetry of the
/// integrand, so evaluating at several lambdas genuinely re-exercises the rule.
double bubble_mass_radial(int n, double lambda, double rtol = 1e-12);

}  // namespace csc
