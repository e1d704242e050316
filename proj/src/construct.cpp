#include "csc/construct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "csc/quadrature.hpp"

namespace csc {

double EpsRule::at(int k) const { return std::pow(ratio, k); }

double EpsRule::tail_sum(int k_max) const { return std::pow(ratio, k_max + 1) / (1.0 - ratio); }

double RadiusRule::at(int k) const {
    if (exponential) return std::exp(static_cast<double>(k));
    return start + (k - 1) * step;
}

double GrowthRule::at(int k) const { return scale * k; }

double PhiTable::operator()(double r) const {
    if (radius.empty()) throw std::invalid_argument("growth table is empty");
    if (r < radius.front() || r > radius.back())
        throw std::invalid_argument("growth table does not cover the requested radius");
    auto hi = std::lower_bound(radius.begin(), radius.end(), r);
    if (hi == radius.begin()) return value.front();
    const std::size_t i = static_cast<std::size_t>(hi - radius.begin());
    const double t = (r - radius[i - 1]) / (radius[i] - radius[i - 1]);
    return value[i - 1] + t * (value[i] - value[i - 1]);
}

bool ConstructionReport::all_ok() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

nlohmann::ordered_json report_to_json(const ConstructionReport& report) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name}, {"ok", c.ok}, {"margin", c.margin}});
    }
    return {{"all_ok", report.all_ok()}, {"checks", checks}};
}

namespace {

void validate_phi(const PhiTable& phi, int k_max) {
    if (phi.radius.size() != phi.value.size() || phi.radius.size() < 2)
        throw std::invalid_argument("growth table needs matching radius/value lists, >= 2 rows");
    if (phi.radius.front() != 0.0)
        throw std::invalid_argument("growth table must start at radius 0");
    for (std::size_t i = 0; i + 1 < phi.radius.size(); ++i) {
        if (!(phi.radius[i + 1] > phi.radius[i]))
            throw std::invalid_argument("growth table radii must be strictly increasing");
        if (phi.value[i + 1] < phi.value[i])
            throw std::invalid_argument("growth table values must be nondecreasing");
    }
    if (phi.value.front() < 0.0)
        throw std::invalid_argument("growth table values must be nonnegative");
    if (phi.radius.back() < static_cast<double>(k_max) + 2.0)
        throw std::invalid_argument("growth table must reach k_max + 2");
}

/// Target for domination_sup: bubble over baseline, both evaluated along the
/// worst ray. Positive and smooth in rho.
double domination_ratio(const DimensionContext& ctx, double lambda, double center_dist,
                        double rho) {
    return bubble_value(ctx, lambda, rho) / bubble_value(ctx, 1.0, rho + center_dist);
}

}  // namespace

double domination_sup(const DimensionContext& ctx, double lambda, double center_dist,
                      double inner_radius) {
    if (!(lambda > 0.0) || !(center_dist >= 0.0) || !(inner_radius > 0.0))
        throw std::invalid_argument("domination_sup: bad arguments");
    const double far_edge = std::max(1e3, 10.0 * (center_dist + 1.0));
    auto h = [&](double rho) { return domination_ratio(ctx, lambda, center_dist, rho); };

    // Log-spaced bracket scan. The ratio is decreasing past a tiny threshold
    // near lambda^2/center_dist, so the grid only has to localize a possible
    // maximum near the inner edge.
    constexpr int kGrid = 240;
    const double la = std::log(inner_radius), lb = std::log(far_edge);
    double best = h(inner_radius);
    int best_i = 0;
    for (int i = 1; i <= kGrid; ++i) {
        const double v = h(std::exp(la + (lb - la) * i / kGrid));
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    // Golden-section refinement around the best grid point.
    const double gl = std::exp(la + (lb - la) * std::max(0, best_i - 1) / kGrid);
    const double gr = std::exp(la + (lb - la) * std::min(kGrid, best_i + 1) / kGrid);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = gl, b = gr;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = h(c), fd = h(d);
    for (int it = 0; it < 90 && (b - a) > 1e-14 * b; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = h(d);
        }
    }
    best = std::max({best, fc, fd});

    // Past far_edge: (rho + d)^2 <= rho^2 (1 + d/Y)^2 and lambda^2 + rho^2 >=
    // rho^2 give ratio <= [lambda (1 + d/Y)^2 (1 + 1/Y^2)]^{(n-2)/2}.
    const double grow = 1.0 + center_dist / far_edge;
    const double far_bound =
        std::pow(lambda * grow * grow * (1.0 + 1.0 / (far_edge * far_edge)), ctx.bubble_exp());
    return std::max(best, far_bound);
}

double bubble_gradient_sup(const DimensionContext& ctx, double lambda, double inner_radius) {
    if (!(lambda > 0.0) || !(inner_radius > 0.0))
        throw std::invalid_argument("bubble_gradient_sup: bad arguments");
    const double peak = lambda / std::sqrt(static_cast<double>(ctx.n - 1));
    const double rho = std::max(inner_radius, peak);
    return std::abs(bubble_radial_derivative(ctx, lambda, rho));
}

namespace {

LambdaChoice halve_until_dominated(const DimensionContext& ctx, double eps, double ceiling,
                                   double center_dist, double inner_radius) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("bubble budget eps must lie in (0, 1]");
    LambdaChoice out;
    out.lambda = ceiling;
    for (int j = 0; j <= 300; ++j) {
        out.domination = domination_sup(ctx, out.lambda, center_dist, inner_radius);
        out.gradient = bubble_gradient_sup(ctx, out.lambda, inner_radius);
        if (out.domination <= eps && out.gradient < eps) {
            out.halvings = j;
            return out;
        }
        out.lambda *= 0.5;
    }
    throw std::runtime_error("lambda halving exhausted its budget; numerics are off");
}

}  // namespace

LambdaChoice choose_lambda_unbounded(const DimensionContext& ctx, double eps_k, double r_k,
                                     double M_k) {
    if (!(r_k >= 1.0)) throw std::invalid_argument("center distance must be >= 1");
    if (!(M_k > 0.0)) throw std::invalid_argument("center floor must be positive");
    const double from_floor = std::pow(ctx.alpha_n / M_k, 2.0 / (ctx.n - 2));
    const double ceiling = std::min(1.0, from_floor);
    return halve_until_dominated(ctx, eps_k, ceiling, r_k, 0.25);
}

LambdaChoice choose_lambda_ring(const DimensionContext& ctx, double eps_k, int ring_size,
                                double ring_radius) {
    if (ring_size < 1) throw std::invalid_argument("ring size must be >= 1");
    if (!(ring_radius >= 1.0)) throw std::invalid_argument("ring radius must be >= 1");
    const double inner = std::numbers::pi / (10.0 * ring_size);
    // Half of the bubble's q-mass must stay inside the inner radius; the mass
    // fraction depends on inner/lambda only, so the ceiling is inner / t_half.
    const double ceiling = inner / bubble_half_mass_radius(ctx.n);
    return halve_until_dominated(ctx, eps_k, ceiling, ring_radius, inner);
}

int ring_count(const DimensionContext& ctx, const PhiTable& phi, int k) {
    if (k < 1) throw std::invalid_argument("ring index must be >= 1");
    const double floor_ratio = 2.0 * phi(static_cast<double>(k) + 2.0) / ctx.bubble_mass;
    const int count = static_cast<int>(std::ceil(floor_ratio - 1e-9));
    return std::max(1, count);
}

namespace {

void push_check(ConstructionReport& rep, std::string name, double margin, bool strict = false) {
    const bool ok = strict ? margin > 0.0 : margin >= 0.0;
    rep.checks.push_back({std::move(name), ok, margin});
}

/// Completeness proxy: u^{4/(n-2)} |x|^2 >= 1/2 at |x| = r, probed along a
/// small direction set (the axis through the off-origin centers, its
/// opposite, a transverse axis, and a diagonal).
void check_completeness(const SolutionField& f, ConstructionReport& rep) {
    const int n = f.n();
    const double ex = 4.0 / (n - 2);
    std::vector<Vec> dirs;
    dirs.push_back(basis_vec(n, 0));
    dirs.push_back(basis_vec(n, 0, -1.0));
    dirs.push_back(basis_vec(n, 1));
    Vec diag(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    dirs.push_back(diag);
    for (double r : {10.0, 100.0, 1000.0}) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& dir : dirs) {
            const double u = value(f, scaled(dir, r));
            worst = std::min(worst, std::pow(u, ex) * r * r - 0.5);
        }
        push_check(rep, "completeness proxy at |x| = " + std::to_string(static_cast<int>(r)),
                   worst);
    }
}

}  // namespace

Construction build_unbounded(const ConstructionAParams& params) {
    if (params.n < 3) throw std::invalid_argument("dimension must be >= 3");
    if (params.k_max < 0) throw std::invalid_argument("bubble count must be >= 0");
    if (!(params.eps.ratio > 0.0) || params.eps.ratio > 0.5)
        throw std::invalid_argument("eps ratio must lie in (0, 1/2] to keep the series sum <= 1");
    if (!(params.flat_b > 0.0)) throw std::invalid_argument("flat term scale must be positive");
    if (!params.radius.exponential) {
        if (!(params.radius.start >= 1.0))
            throw std::invalid_argument("first center distance must be >= 1");
        if (!(params.radius.step >= 1.0))
            throw std::invalid_argument("center spacing must be >= 1");
    }
    if (!(params.growth.scale > 0.0))
        throw std::invalid_argument("growth scale must be positive");

    Construction out;
    out.field.ctx = make_context(params.n);
    out.field.flat = FlatBubbleTerm{params.flat_b};
    out.field.baseline = params.k_max >= 1;
    out.field.tail_bound_coeff = params.eps.tail_sum(params.k_max);

    const DimensionContext& ctx = out.field.ctx;
    std::vector<double> m_floor;
    double eps_sum = 0.0;
    for (int k = 1; k <= params.k_max; ++k) {
        const double eps_k = params.eps.at(k);
        const double r_k = params.radius.at(k);
        const double M_k = params.growth.at(k);
        eps_sum += eps_k;
        const LambdaChoice pick = choose_lambda_unbounded(ctx, eps_k, r_k, M_k);
        out.field.bubbles.push_back({basis_vec(params.n, 0, r_k), pick.lambda});
        m_floor.push_back(M_k);

        const std::string tag = "bubble " + std::to_string(k);
        const double center_peak =
            bubble_value(ctx, pick.lambda, 0.0);  // alpha_n lambda^{-(n-2)/2}
        push_check(out.report, tag + ": peak reaches its floor", center_peak - M_k);
        push_check(out.report, tag + ": dominated by eps_k * baseline beyond 1/4",
                   eps_k - pick.domination);
        push_check(out.report, tag + ": gradient below eps_k beyond 1/4", eps_k - pick.gradient,
                   /*strict=*/true);
    }
    push_check(out.report, "series budget: retained eps sum plus tail <= 1",
               1.0 - (eps_sum + out.field.tail_bound_coeff));

    // Field-level consequences: the field value at each center clears the
    // floor (the other terms only add), the peak sequence is unbounded, and
    // the centers kill slow decay: r_k^{(n-2)/2} u(center_k) keeps growing.
    const double m = ctx.bubble_exp();
    double prev_scaled = 0.0, peak_max = 0.0;
    for (int k = 1; k <= params.k_max; ++k) {
        const auto& bub = out.field.bubbles[static_cast<std::size_t>(k - 1)];
        const double u_center = value(out.field, at_offset(out.field, k - 1, zero_vec(params.n)));
        peak_max = std::max(peak_max, u_center);
        push_check(out.report,
                   "field value at center " + std::to_string(k) + " clears the floor",
                   u_center - m_floor[static_cast<std::size_t>(k - 1)]);
        const double scaled_peak = std::pow(norm(bub.center), m) * u_center;
        if (k >= 2) {
            push_check(out.report,
                       "scaled peak grows from center " + std::to_string(k - 1) + " to " +
                           std::to_string(k),
                       scaled_peak - prev_scaled, /*strict=*/true);
        }
        prev_scaled = scaled_peak;
    }
    if (params.k_max >= 1) {
        push_check(out.report, "peaks exceed the last floor",
                   peak_max - params.growth.at(params.k_max));
    }
    check_completeness(out.field, out.report);
    return out;
}

Construction build_prescribed_growth(const ConstructionBParams& params) {
    if (params.n < 3) throw std::invalid_argument("dimension must be >= 3");
    if (params.k_max < 1) throw std::invalid_argument("ring count must be >= 1");
    if (!(params.eps_ratio > 0.0) || params.eps_ratio > 0.5)
        throw std::invalid_argument("eps ratio must lie in (0, 1/2] to keep the series sum <= 1");
    if (!(params.flat_b > 0.0)) throw std::invalid_argument("flat term scale must be positive");
    validate_phi(params.phi, params.k_max);

    Construction out;
    out.field.ctx = make_context(params.n);
    out.field.flat = FlatBubbleTerm{params.flat_b};
    out.field.baseline = true;
    // Ring k's weighted budget is N_k * (ratio^k / N_k) = ratio^k, so the
    // untruncated remainder telescopes the same way as the single-bubble rule.
    EpsRule series{params.eps_ratio};
    out.field.tail_bound_coeff = series.tail_sum(params.k_max);

    const DimensionContext& ctx = out.field.ctx;
    double weighted_sum = 0.0;
    for (int k = 1; k <= params.k_max; ++k) {
        const int count = ring_count(ctx, params.phi, k);
        const double eps_k = series.at(k) / count;
        weighted_sum += count * eps_k;
        const double ring_radius = static_cast<double>(k);
        const LambdaChoice pick = choose_lambda_ring(ctx, eps_k, count, ring_radius);
        const double inner = std::numbers::pi / (10.0 * count);
        const double theta = 2.0 * std::numbers::pi / count;
        for (int j = 1; j <= count; ++j) {
            Vec center = zero_vec(params.n);
            center[0] = ring_radius * std::sin(j * theta);
            center[1] = ring_radius * std::cos(j * theta);
            out.field.bubbles.push_back({std::move(center), pick.lambda});
        }

        const std::string tag = "ring " + std::to_string(k);
        push_check(out.report, tag + ": size covers the growth target",
                   count - 2.0 * params.phi(static_cast<double>(k) + 2.0) / ctx.bubble_mass);
        push_check(out.report, tag + ": dominated by eps_k * baseline beyond pi/(10 N)",
                   eps_k - pick.domination);
        push_check(out.report, tag + ": gradient below eps_k beyond pi/(10 N)",
                   eps_k - pick.gradient, /*strict=*/true);
        push_check(out.report, tag + ": half the bubble mass inside pi/(10 N)",
                   bubble_mass_fraction(ctx, inner / pick.lambda) - 0.5);
    }
    push_check(out.report, "series budget: weighted ring sum plus tail <= 1",
               1.0 - (weighted_sum + out.field.tail_bound_coeff));
    check_completeness(out.field, out.report);
    return out;
}

}  // namespace csc
