#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "csc/dimension.hpp"
#include "csc/fields.hpp"

namespace csc {

// Quadrature nodes on the unit sphere S^{n-1}, built as a recursive tensor
// product: midpoint nodes in each polar angle with sin^k weights, a trapezoid
// ring at the bottom.  Antipodally symmetric at every level, all weights
// positive, weights summing to (a spectrally accurate approximation of) the
// sphere area.  Cost grows like 2^{(n-1) level}.
struct SphereRule {
    std::vector<Vec> directions;
    std::vector<double> weights;
};

const SphereRule& sphere_rule(int n, int level);

struct SphereResult {
    double value = 0.0;
    double err_est = 0.0;
    int level = 0;
    bool converged = false;
    std::size_t evals = 0;
};

// Adaptive integral of f over S^{n-1}: doubles the rule level until two
// successive levels agree to max(rtol*|value|, atol).  The error estimate is
// the last successive difference and is reported whether or not the target
// was met.
SphereResult sphere_integrate(int n, const std::function<double(const Vec&)>& f,
                              double rtol = 1e-10, double atol = 0.0, int min_level = 1,
                              int max_level = 8, int threads = 1);

// Deterministic orthonormal frame whose first column is the given axis.
std::vector<Vec> orthonormal_frame(const Vec& axis);

// Integrand over a ball, evaluated through the field so implementations can
// choose capped or true evaluation and use anchored offsets near centers.
using FieldFunctional =
    std::function<double(const SolutionField&, const FieldPoint&, const CapSet*)>;

// u^exponent, evaluated without derivatives.
FieldFunctional power_integrand(double exponent);

// Divergence-form integrand for the volume curvature-moment integral:
//   integral_B (x . grad K) u^q
//     = -R surface_integral(u lap u) + integral_B lap u (n u + q x . grad u),
// using K u^q = -u lap u and K u^{q-1} = -lap u (both exact since q = p + 1).
// This is the volume part only; the matching surface part lives with the
// sphere functionals in the analysis layer.
FieldFunctional curvature_moment_volume_integrand();

// Direct form (x . grad K) u^q with grad K by central differences of the
// induced curvature; step = step_scale * max(|x|, 1) (or the anchored offset
// scale when anchored).  Accurate on smooth fields; kept as a cross-check.
FieldFunctional curvature_moment_fd_integrand(double step_scale = 1e-6);

struct BallOptions {
    double rtol = 1e-9;
    double atol = 0.0;
    int min_sphere_level = 2;
    int max_sphere_level = 8;
    int cap_min_level = 2;
    int cap_max_level = 7;
    double radial_rtol_factor = 0.05;  // radial tolerance = this * rtol
    double cap_radius_factor = 0.3;    // cap radius <= this * |center|
    double cap_separation_factor = 0.45;  // and <= this * nearest-center distance
    double sharp_ratio = 64.0;         // de-peak iff lambda <= cap radius / this
    // Worker threads for the directional sweeps.  Results are written into
    // index-addressed slots and reduced in index order, so every thread count
    // produces bitwise identical output.
    int threads = 1;
};

struct BallResult {
    double value = 0.0;
    double err_est = 0.0;
    bool converged = false;
    int sphere_level = 0;
    int cap_count = 0;
    std::size_t evals = 0;
};

// Caps used by ball_integrate at outer radius R: every bubble narrow enough
// to defeat direct quadrature (lambda small against its geometric cap radius)
// whose cap region intersects the ball.
CapSet choose_caps(const SolutionField& f, double R, const BallOptions& opt = {});

// Integral of g over the ball of radius R about the origin.  Global part:
// adaptive sphere of ray directions, each ray integrated adaptively with
// exact breakpoints where it crosses cap boundaries, evaluating the de-peaked
// field.  Each cap then gets a local correction integral of
// [true - de-peaked] in bubble-centered spherical coordinates, truncated
// exactly at the ball boundary direction by direction.
BallResult ball_integrate(const SolutionField& f, double R, const FieldFunctional& g,
                          const BallOptions& opt = {});

// Fraction of a single bubble's u^q mass lying within radius t * lambda of
// its center (scale-free), and the radius of half mass (equal to 1 in every
// dimension; computed by bisection as a check of that).
double bubble_mass_fraction(const DimensionContext& ctx, double t, double rtol = 1e-12);
double bubble_half_mass_radius(int n, double tol = 1e-12);

}  // namespace csc
