#pragma once

#include <string>
#include <vector>

#include "csc/dimension.hpp"
#include "csc/fields.hpp"
#include "json.hpp"

namespace csc {

/// eps_k = ratio^k. Decreasing, and sum_{k>=1} ratio^k <= 1 iff ratio <= 1/2,
/// so the whole-series budget stays certifiable after truncation.
struct EpsRule {
    double ratio = 0.5;
    double at(int k) const;
    /// sum_{k > k_max} ratio^k = ratio^{k_max+1} / (1 - ratio).
    double tail_sum(int k_max) const;
};

/// Center distances along the first axis: r_k = e^k, or start + (k-1)*step.
/// Either way r_1 >= 1 and consecutive gaps >= 1 are required.
struct RadiusRule {
    bool exponential = true;
    double start = 1.0;
    double step = 1.0;
    double at(int k) const;
};

/// Unboundedness targets M_k = scale * k (monotone, -> infinity).
struct GrowthRule {
    double scale = 1.0;
    double at(int k) const;
};

struct ConstructionAParams {
    int n = 3;
    int k_max = 5;  // off-origin bubbles retained (k = 1..k_max)
    EpsRule eps;
    RadiusRule radius;
    GrowthRule growth;
    double flat_b = 1.0;
};

/// Tabulated nondecreasing growth target on [0, radius.back()], evaluated by
/// linear interpolation. The table must start at radius 0 and reach at least
/// k_max + 2 so ring sizing never extrapolates.
struct PhiTable {
    std::vector<double> radius;
    std::vector<double> value;
    double operator()(double r) const;
};

struct ConstructionBParams {
    int n = 3;
    int k_max = 6;  // rings retained (ring k sits at distance k)
    PhiTable phi;
    double flat_b = 1.0;
    /// Ring k gets per-bubble budget eps_ratio^k / N_k, so the weighted sum
    /// over a ring is eps_ratio^k and the whole-series budget telescopes to
    /// eps_ratio/(1 - eps_ratio) <= 1 independent of the ring sizes.
    double eps_ratio = 0.5;
};

/// One verified inequality; margin is "how far on the right side" (>= 0 when
/// satisfied), in the inequality's own units.
struct ConstructionCheck {
    std::string name;
    bool ok = false;
    double margin = 0.0;
};

struct ConstructionReport {
    std::vector<ConstructionCheck> checks;
    bool all_ok() const;
};

struct Construction {
    SolutionField field;
    ConstructionReport report;
};

nlohmann::ordered_json report_to_json(const ConstructionReport& report);

/// sup over rho >= inner_radius of bubble(rho, lambda) / u_o(rho + center_dist).
/// The sup over R^n of bubble/(baseline) collapses to this radial worst case
/// because the baseline is radial decreasing: on the sphere |x - c| = rho the
/// baseline is smallest at |x| = rho + |c|. Evaluated by a log-grid scan plus
/// golden-section refinement on [inner_radius, Y] and an analytic bound for
/// the far tail beyond Y.
double domination_sup(const DimensionContext& ctx, double lambda, double center_dist,
                      double inner_radius);

/// sup over rho >= inner_radius of |grad bubble(rho, lambda)|, in closed form:
/// the radial speed peaks at rho = lambda/sqrt(n-1) and decreases past it.
double bubble_gradient_sup(const DimensionContext& ctx, double lambda, double inner_radius);

struct LambdaChoice {
    double lambda = 0.0;
    double domination = 0.0;  // sup of bubble / (target_ratio * baseline)
    double gradient = 0.0;    // sup of |grad bubble| outside the inner radius
    int halvings = 0;
};

/// Largest lambda of the form ceiling/2^j with
///   (i) center value alpha_n lambda^{-(n-2)/2} >= M_k (the ceiling),
///   (ii) bubble <= eps_k * baseline outside distance 1/4 from the center,
///   (iii) |grad bubble| < eps_k outside distance 1/4.
/// Halving is deterministic; throws if 300 halvings do not suffice (they
/// always do -- the sup is increasing in lambda at these scales).
LambdaChoice choose_lambda_unbounded(const DimensionContext& ctx, double eps_k, double r_k,
                                     double M_k);

/// Ring analogue: inner radius pi/(10 * ring_size), ceiling from the
/// half-mass condition (the bubble must keep half its q-mass inside the inner
/// radius, i.e. lambda <= inner_radius / t_half), then the same halving against
/// the domination and gradient bounds at distance ring_radius from the origin.
LambdaChoice choose_lambda_ring(const DimensionContext& ctx, double eps_k, int ring_size,
                                double ring_radius);

/// Ring size N_k = ceil(2 phi(k+2) / V_n), at least 1. The ceiling is nudged
/// by 1e-9 so that an exactly-integer ratio (phi == const * V_n) does not
/// round up on the last bit.
int ring_count(const DimensionContext& ctx, const PhiTable& phi, int k);

/// Flat term + baseline + one bubble per k = 1..k_max at (r_k, 0, ..., 0),
/// with lambda_k from choose_lambda_unbounded. k_max = 0 degenerates to the
/// flat term alone. The report carries every per-bubble margin, the series
/// budget, the completeness proxy u^{4/(n-2)} >= |x|^{-2}/2 at |x| in
/// {10, 100, 1000}, and the growth of r_k^{(n-2)/2} u at the centers.
Construction build_unbounded(const ConstructionAParams& params);

/// Flat term + baseline + rings: ring k puts N_k bubbles equally spaced on
/// the circle of radius k in the first two coordinates, all with the ring's
/// lambda_k. The report carries ring-size floors, per-ring domination and
/// gradient margins, per-ring half-mass fractions, and the series budget.
Construction build_prescribed_growth(const ConstructionBParams& params);

}  // namespace csc
