#pragma once

#include <functional>
#include <string>
#include <vector>

#include "csc/fields.hpp"
#include "csc/quadrature.hpp"

namespace csc {

// ---- cylinder transform ----------------------------------------------------

/// The field seen through v(s, theta) = r^{(n-2)/2} u(r theta), r = e^s.
/// Carries its own copy of the source so it can outlive the caller's field.
struct CylinderField {
    SolutionField source;
};

CylinderField to_cylinder(const SolutionField& f);

struct CylinderPoint {
    double v = 0.0;
    double v_s = 0.0;     // e^{s n/2} [u_r + (n-2) u / (2r)]
    Vec theta_gradient;   // r^{n/2} * tangential part of grad u; orthogonal to theta
};

CylinderPoint cylinder_eval(const CylinderField& cyl, double s, const Vec& theta);
double cylinder_value(const CylinderField& cyl, double s, const Vec& theta);

/// Inverse transform: u(x) = |x|^{-(n-2)/2} v(ln|x|, x/|x|).
double cylinder_restore(const CylinderField& cyl, const Vec& x);

/// max over thetas of |v_ss + Lap_theta v - ((n-2)/2)^2 v + K v^p|, the
/// cylinder equation residual. v_ss by a central difference in s and
/// Lap_theta by geodesic second differences along an orthonormal tangent
/// frame (both with step 1e-4); K is the induced curvature at e^s theta, so
/// for a smooth field the residual measures only the difference error.
double cylinder_residual(const CylinderField& cyl, double s, const std::vector<Vec>& thetas);

// ---- Pohozaev functional ---------------------------------------------------

struct PohozaevOptions {
    double rtol = 1e-9;
    /// Measure grad K by central differences of the induced curvature instead
    /// of the exact divergence rewrite (cross-check mode; noisier near sharp
    /// bubbles, tolerances should stay above ~1e-6).
    bool fd_gradient = false;
    double fd_step_scale = 1e-6;
    int threads = 1;
};

struct PohozaevValue {
    double value = 0.0;
    double err_est = 0.0;
    bool converged = false;
};

/// (n-2)/(2n) * integral over B_o(r) of x . grad K u^{2n/(n-2)}. The default
/// route rewrites the integrand through K u^q = -u Lap u into a bulk term
/// with closed-form derivatives plus a boundary integral of u Lap u, which
/// is exact and avoids differencing K across bubble cores.
PohozaevValue pohozaev_volume(const SolutionField& f, double r,
                              const PohozaevOptions& opt = {});

/// Boundary form: integral over the sphere |x| = r of
///   r u_r^2 - (r/2)|grad u|^2 + (n-2)/(2n) r K u^q + (n-2)/2 u u_r,
/// with K u^q collapsed to -u Lap u (exact for the induced curvature).
PohozaevValue pohozaev_surface(const SolutionField& f, double r, double rtol = 1e-10,
                               int threads = 1);

struct PohozaevReport {
    double r = 0.0;
    double volume = 0.0;
    double surface = 0.0;
    double discrepancy = 0.0;
    double err_combined = 0.0;
    bool converged = false;
    std::string mode;  // "divergence" or "finite-difference"
};

PohozaevReport pohozaev_check(const SolutionField& f, double r, const PohozaevOptions& opt = {});

// ---- energy on the cylinder ------------------------------------------------

/// w(s) = 1/2 int_{S^{n-1}} v^2(s, theta) dtheta.
double w_energy(const CylinderField& cyl, double s, double rtol = 1e-11, int threads = 1);

struct IdentityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
};

/// w''(s) (five-point difference, step 0.02) against the exact combination
///   int (v_s)^2 + int |grad_theta v|^2 + ((n-2)/2)^2 int v^2 - int K v^q,
/// with K v^q evaluated as -r^n u Lap u. The gap is dominated by the w''
/// difference error.
IdentityCheck w_second_derivative_identity(const CylinderField& cyl, double s,
                                           double rtol = 1e-11, int threads = 1);

/// 2 P(u, e^s) from the ball quadrature against the cylinder-side combination
///   int (v_s)^2 - int |grad_theta v|^2 - ((n-2)/2)^2 int v^2
///   + (n-2)/n int K v^q.
IdentityCheck pohozaev_cylinder_identity(const CylinderField& cyl, double s,
                                         const PohozaevOptions& opt = {});

// ---- growth and sphere norms -----------------------------------------------

struct GrowthRow {
    double r = 0.0;
    double value = 0.0;     // integral of u^q over B_o(r)
    double err_est = 0.0;
    double per_log = 0.0;   // value / ln r (NaN for r <= 1)
    double per_target = 0.0;  // value / target(r) (NaN without a target)
    bool converged = false;
};

std::vector<GrowthRow> volume_growth(const SolutionField& f, const std::vector<double>& radii,
                                     const std::function<double(double)>& target = {},
                                     const BallOptions& opt = {});

struct SphereNorm {
    double value = 0.0;       // int_{S^{n-1}} u^{p_exp}(r theta) dtheta
    double normalized = 0.0;  // value * r^{(n-2) p_exp / 2}
    double err_est = 0.0;
    bool converged = false;
};

SphereNorm sphere_lp(const SolutionField& f, double r, double p_exp, double rtol = 1e-9,
                     int max_level = 8, int threads = 1);

struct DecayRow {
    double r = 0.0;
    double sup_scaled = 0.0;  // sup over probed directions of r^{(n-2)/2} u(r theta)
};

/// The slow-decay envelope along spheres. Probe directions are the sphere
/// rule's nodes plus every bubble-center direction (the sup sits near the
/// centers, so those rays are always included).
std::vector<DecayRow> slow_decay_measure(const SolutionField& f,
                                         const std::vector<double>& radii,
                                         int sphere_level = 3);

// ---- hypothesis diagnostics ------------------------------------------------

struct DiagnosticsConfig {
    double young_lambda = 0.5;  // exponent in the e^{lambda s} comparison
    double log_eps = 0.1;       // epsilon in the (ln r)^{1+eps} floor
    double c11 = 1.0;           // additive constant in the pointwise bound
    int sphere_level = 3;
    double pohozaev_rtol = 1e-8;
    int threads = 1;
};

struct DiagnosticsRow {
    double s = 0.0;
    double r = 0.0;
    double ds_ratio = 0.0;      // int (v_s)^2 / (1 + int v^2)
    double ratio_max = 0.0;     // max over theta of |v_s| / v
    double c12_required = 0.0;  // max over theta of (|v_s| - c11) / v
    double young_decay = 0.0;   // e^{-lambda s} int |v_s|^q
    double radial_floor = 0.0;  // min over theta of r^2 dK/dr
    double log_floor = 0.0;     // min over theta of r^{(n+2)/2} (ln r)^{1+eps} dK/dr
    double p_value = 0.0;       // P(u, r)
};

struct DiagnosticsReport {
    std::vector<DiagnosticsRow> rows;
    double p_inf = 0.0;  // min of p_value over the grid: the -delta^2 candidate
};

/// Measured (never asserted) quantities behind the growth theorems'
/// hypotheses, tabulated over s_grid at r = e^s. dK/dr is a central
/// difference of the induced curvature with step 1e-6 r.
DiagnosticsReport diagnostics(const SolutionField& f, const std::vector<double>& s_grid,
                              const DiagnosticsConfig& cfg = {});

}  // namespace csc
