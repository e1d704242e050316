#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csc/dimension.hpp"
#include "csc/vecn.hpp"
#include "json.hpp"

namespace csc {

/// One standard bubble u(x) = alpha_n (lambda / (lambda^2 + |x - center|^2))^{(n-2)/2}.
struct BubbleTerm {
    Vec center;
    double lambda = 1.0;
};

/// The slowly decaying term u(x) = (|x|^2 + b^2)^{(2-n)/4}.
struct FlatBubbleTerm {
    double b = 1.0;
};

/// A positive superposition: optional flat term + optional baseline bubble
/// u_o = bubble(0, 1) + a list of further bubbles. tail_bound_coeff tau
/// certifies that the truncated (not materialized) remainder of an infinite
/// construction is bounded pointwise by tau * u_o.
struct SolutionField {
    DimensionContext ctx;
    std::optional<FlatBubbleTerm> flat;
    bool baseline = false;
    std::vector<BubbleTerm> bubbles;
    double tail_bound_coeff = 0.0;

    int n() const { return ctx.n; }
};

struct EvalResult {
    double value = 0.0;
    Vec gradient;
    double laplacian = 0.0;
};

/// Freeze bubble `bubble_index` at distance `radius` from its center: inside
/// that ball the term contributes its boundary values (constant value, zero
/// gradient, boundary laplacian). The resulting integrand is continuous and
/// free of the lambda-scale spike; the ball integrator adds the difference
/// back through a separate bubble-centered integral.
struct Cap {
    int bubble_index = -1;
    double radius = 0.0;
};
using CapSet = std::vector<Cap>;

/// Evaluation point. When `anchor >= 0` the point was formed as
/// bubbles[anchor].center + offset, and the anchored bubble's distance is
/// taken as |offset| directly. This matters when offset is at the bubble's
/// lambda scale: recovering it from x - center would round away near a
/// far-out center.
struct FieldPoint {
    Vec x;
    int anchor = -1;
    Vec offset;
};

FieldPoint at_point(Vec x);
FieldPoint at_offset(const SolutionField& f, int anchor, Vec offset);

// ---- single terms ---------------------------------------------------------

double bubble_value(const DimensionContext& ctx, double lambda, double r);
double bubble_radial_derivative(const DimensionContext& ctx, double lambda, double r);
/// Gradient as coefficient * rel, rel = x - center; returns the coefficient.
double bubble_gradient_coefficient(const DimensionContext& ctx, double lambda, double r);
/// Closed form -bubble_value^p (the bubble solves Delta u + u^p = 0).
double bubble_laplacian(const DimensionContext& ctx, double lambda, double r);

double flat_value(const DimensionContext& ctx, double b, double rho);
double flat_radial_derivative(const DimensionContext& ctx, double b, double rho);
double flat_gradient_coefficient(const DimensionContext& ctx, double b, double rho);
double flat_laplacian(const DimensionContext& ctx, double b, double rho);
/// Curvature induced by the flat term alone:
///   K_b(x) = n(n-2)/2 * (1 - (n+2)/(2n) * rho^2/(rho^2 + b^2)).
double flat_curvature(const DimensionContext& ctx, double b, double rho);
/// Limits of K_b: (n-2)^2/4 at infinity (min), n(n-2)/2 at the origin (max).
double flat_curvature_min(const DimensionContext& ctx);
double flat_curvature_max(const DimensionContext& ctx);

// ---- field evaluation ------------------------------------------------------

EvalResult eval(const SolutionField& f, const FieldPoint& pt, const CapSet* caps = nullptr);
double value(const SolutionField& f, const FieldPoint& pt, const CapSet* caps = nullptr);
inline EvalResult eval(const SolutionField& f, const Vec& x) { return eval(f, at_point(x)); }
inline double value(const SolutionField& f, const Vec& x) { return value(f, at_point(x)); }

/// K(x) = -Delta u / u^p for the full field. Positive for every field made of
/// the terms above; non-positive values signal an invalid field or overflow.
double induced_curvature(const SolutionField& f, const FieldPoint& pt,
                         const CapSet* caps = nullptr);
inline double induced_curvature(const SolutionField& f, const Vec& x) {
    return induced_curvature(f, at_point(x));
}

// ---- sampling --------------------------------------------------------------

/// Deterministic scan points: a uniform lattice on a ball, radial rays through
/// every bubble center (log-spaced out to ray_extent), and dense geometric
/// shells inside B(center, 1/4) down to lambda/4 around every bubble.
struct SamplingPlan {
    double ball_radius = 12.0;
    int grid_per_axis = 0;  // 0 = derive from target_points
    int target_points = 10000;
    double ray_extent = 1e5;
    int ray_points = 140;
    int center_shells = 40;
};

std::vector<Vec> sample_points(const SolutionField& f, const SamplingPlan& plan);

struct CurvatureScan {
    double min_value = 0.0;
    double max_value = 0.0;
    Vec argmin, argmax;
    bool all_positive = true;
    int count = 0;
    double chain_c1 = 0.0;            // 3^{p-1}, from splitting (a+b+c)^p
    double chain_c2_empirical = 0.0;  // max of u^p / (-Delta u) over the scan
};

CurvatureScan curvature_bounds(const SolutionField& f, const std::vector<Vec>& pts);

// ---- serialization ---------------------------------------------------------

nlohmann::ordered_json field_to_json(const SolutionField& f);
SolutionField field_from_json(const nlohmann::json& j);
void save_field(const SolutionField& f, const std::string& path);
SolutionField load_field(const std::string& path);

// ---- factories -------------------------------------------------------------

SolutionField single_bubble_field(int n, Vec center, double lambda);
SolutionField flat_bubble_field(int n, double b);
SolutionField baseline_field(int n);

}  // namespace csc
