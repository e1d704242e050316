#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "csc/dimension.hpp"

namespace csc {

// Radial solutions on the cylinder obey the autonomous second-order equation
//
//     v'' - ((n-2)^2/4) v + (n(n-2)/4) v^{(n+2)/(n-2)} = 0,   v > 0,
//
// with the first integral
//
//     E = v'^2/2 - ((n-2)^2/8) (v^2 - v^{2n/(n-2)}).
//
// The phase plane has one positive rest point v* (the constant cylinder
// solution), a homoclinic orbit v(s) = (cosh s)^{-(n-2)/2} at E = 0, and a
// one-parameter family of periodic orbits filling the E < 0 well between
// them.  Each periodic orbit is indexed by its necksize, the minimum of v
// over a period.

struct FowlerSample {
    double s = 0.0;
    double v = 0.0;
    double vp = 0.0;
    double energy = 0.0;
};

struct FowlerOrbit {
    int n = 0;
    double v0 = 0.0;
    double v0p = 0.0;
    std::vector<FowlerSample> samples;

    double energy0 = 0.0;       // first integral at the initial state
    double energy_drift = 0.0;  // max |E - energy0| over accepted steps
    bool blow_up = false;       // v reached 0 before the span ended

    // filled by the periodic-orbit solver
    bool periodic = false;
    bool degenerate = false;  // constant orbit at the bottom of the well
    double necksize = 0.0;    // min v over one period
    double period = 0.0;      // 0 unless periodic
    double v_max = 0.0;       // max v over one period
};

// v'' as a function of v; NaN for v <= 0 (the equation lives on v > 0, and
// the integrator uses the NaN to reject any step that leaves the domain).
double cylinder_ode_rhs(const DimensionContext& ctx, double v);

// v'' - ((n-2)^2/4) v + (n(n-2)/4) v^p for a candidate second derivative.
double cylinder_ode_residual(const DimensionContext& ctx, double v, double vpp);

// The conserved energy at a phase point.
double orbit_energy(const DimensionContext& ctx, double v, double vp);

// The constant solution v* = ((n-2)/n)^{(n-2)/4}; also the largest necksize.
double fixed_point(const DimensionContext& ctx);

// Multiply a unit-curvature cylinder profile by this factor to obtain a
// solution of the equation above; the bubble profile alpha_n (2 cosh s)^{-m}
// maps exactly onto the homoclinic orbit (cosh s)^{-m}.
double unit_curvature_scale(const DimensionContext& ctx);

struct FowlerOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    // Extra per-step rejection bound on the energy change; the first
    // integral is what downstream checks rely on, so conservation shares
    // control of the step size with the embedded error estimate.
    double energy_drift_tol = 1e-11;
    // Step-size ceiling.  Near-trivial dynamics would otherwise let the
    // controller grow h until the oscillatory mode sits far outside the
    // stability region, where roundoff is amplified instead of damped.
    double max_step = 1.0;
    std::size_t max_steps = 1'000'000;
    double search_span = 1e4;  // giving up distance for the period search
    int threads = 1;           // family evaluation only
};

// Integrate from (v0, v0p) over s in [0, s_span]; a negative span runs
// backward.  Samples are the accepted steps.  Throws for v0 <= 0.  Reaching
// v = 0 in finite s is reported through blow_up, not an error.
FowlerOrbit integrate_orbit(const DimensionContext& ctx, double v0, double v0p, double s_span,
                            const FowlerOptions& opt = {});

// The periodic orbit through (eps, 0) for eps in (0, fixed_point].  The
// period is located by the first return of v' to zero with v > eps (half a
// period, doubled), the crossing refined on a cubic interpolant to 1e-10 in
// s.  eps == fixed_point yields the degenerate constant orbit.  Throws for
// eps outside the interval, or if the search budget is exhausted.
FowlerOrbit necksize_orbit(const DimensionContext& ctx, double eps, const FowlerOptions& opt = {});

// Largest |v'| along a stored orbit (extremum-refined), together with the
// analytic bound sqrt(2 max(0, E + ((n-2)^2/8) sup(v^2 - v^q))), the sup
// taken over v > 0.  Finiteness of the bound reflects that the equation is
// autonomous and the potential confines every positive orbit.
struct SlopeBound {
    double observed = 0.0;
    double bound = 0.0;
};
SlopeBound slope_bound(const DimensionContext& ctx, const FowlerOrbit& orbit);

struct FamilyRow {
    double eps = 0.0;
    double period = 0.0;
    double v_max = 0.0;
    double max_slope = 0.0;
};

// One necksize orbit per grid entry.  Orbits are independent, so the rows
// are computed in index-addressed slots (optionally across opt.threads
// workers) and the output is identical for every thread count.
std::vector<FamilyRow> necksize_family(const DimensionContext& ctx,
                                       const std::vector<double>& eps_grid,
                                       const FowlerOptions& opt = {});

// CSV emitters: orbit rows are (s, v, v_prime, energy); family rows are
// (eps, period, v_max, max_slope).  Values are printed with %.17g so a
// round trip through the text preserves every bit.
std::string orbit_csv(const FowlerOrbit& orbit);
std::string family_csv(const std::vector<FamilyRow>& rows);

}  // namespace csc
