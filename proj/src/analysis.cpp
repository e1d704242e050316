#include "csc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csc {

namespace {

constexpr double kCylinderStep = 1e-4;   // s and geodesic second differences
constexpr double kEnergyStep = 0.02;     // five-point w'' stencil
constexpr double kCurvatureStep = 1e-6;  // relative step for dK/dr

CylinderPoint from_eval(const DimensionContext& ctx, double r, const Vec& theta,
                        const EvalResult& e) {
    const double m = ctx.bubble_exp();
    const double u_r = dot(theta, e.gradient);
    const double rm = std::pow(r, m);
    CylinderPoint out;
    out.v = rm * e.value;
    out.v_s = rm * r * (u_r + m * e.value / r);
    out.theta_gradient = scaled(sub(e.gradient, scaled(theta, u_r)), rm * r);
    return out;
}

}  // namespace

CylinderField to_cylinder(const SolutionField& f) { return CylinderField{f}; }

CylinderPoint cylinder_eval(const CylinderField& cyl, double s, const Vec& theta) {
    const double r = std::exp(s);
    const EvalResult e = eval(cyl.source, at_point(scaled(theta, r)));
    return from_eval(cyl.source.ctx, r, theta, e);
}

double cylinder_value(const CylinderField& cyl, double s, const Vec& theta) {
    const double r = std::exp(s);
    return std::pow(r, cyl.source.ctx.bubble_exp()) *
           value(cyl.source, at_point(scaled(theta, r)));
}

double cylinder_restore(const CylinderField& cyl, const Vec& x) {
    const double r = norm(x);
    if (!(r > 0.0)) throw std::invalid_argument("cylinder_restore: x must be nonzero");
    return std::pow(r, -cyl.source.ctx.bubble_exp()) *
           cylinder_value(cyl, std::log(r), scaled(x, 1.0 / r));
}

double cylinder_residual(const CylinderField& cyl, double s, const std::vector<Vec>& thetas) {
    const SolutionField& f = cyl.source;
    const int n = f.ctx.n;
    const double m = f.ctx.bubble_exp();
    const double h = kCylinderStep;
    const double ch = std::cos(h);
    const double sh = std::sin(h);
    double worst = 0.0;
    for (const Vec& raw : thetas) {
        const double len = norm(raw);
        if (!(len > 0.0)) throw std::invalid_argument("cylinder_residual: zero direction");
        const Vec theta = scaled(raw, 1.0 / len);
        const double v0 = cylinder_value(cyl, s, theta);
        const double v_ss =
            (cylinder_value(cyl, s + h, theta) - 2.0 * v0 + cylinder_value(cyl, s - h, theta)) /
            (h * h);
        // Laplace-Beltrami as the sum of geodesic second derivatives along an
        // orthonormal tangent frame.
        const std::vector<Vec> frame = orthonormal_frame(theta);
        double lap_theta = 0.0;
        for (int i = 1; i < n; ++i) {
            const Vec plus = add(scaled(theta, ch), scaled(frame[i], sh));
            const Vec minus = add(scaled(theta, ch), scaled(frame[i], -sh));
            lap_theta += cylinder_value(cyl, s, plus) + cylinder_value(cyl, s, minus) - 2.0 * v0;
        }
        lap_theta /= h * h;
        const double kappa = induced_curvature(f, at_point(scaled(theta, std::exp(s))));
        const double res = v_ss + lap_theta - m * m * v0 + kappa * std::pow(v0, f.ctx.p);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

PohozaevValue pohozaev_volume(const SolutionField& f, double r, const PohozaevOptions& opt) {
    if (!(r > 0.0)) throw std::invalid_argument("pohozaev_volume: radius must be positive");
    const int n = f.ctx.n;
    const double m = f.ctx.bubble_exp();
    BallOptions ball;
    ball.rtol = opt.rtol;
    ball.threads = opt.threads;
    PohozaevValue out;
    if (opt.fd_gradient) {
        const BallResult moment =
            ball_integrate(f, r, curvature_moment_fd_integrand(opt.fd_step_scale), ball);
        out.value = (m / n) * moment.value;
        out.err_est = (m / n) * moment.err_est;
        out.converged = moment.converged;
        return out;
    }
    const BallResult bulk = ball_integrate(f, r, curvature_moment_volume_integrand(), ball);
    auto boundary = [&](const Vec& theta) {
        const EvalResult e = eval(f, at_point(scaled(theta, r)));
        return e.value * e.laplacian;
    };
    const SphereResult surf = sphere_integrate(n, boundary, opt.rtol, 0.0, 1, 8, opt.threads);
    const double rn = std::pow(r, n);
    out.value = (m / n) * (bulk.value - rn * surf.value);
    out.err_est = (m / n) * (bulk.err_est + rn * surf.err_est);
    out.converged = bulk.converged && surf.converged;
    return out;
}

PohozaevValue pohozaev_surface(const SolutionField& f, double r, double rtol, int threads) {
    if (!(r > 0.0)) throw std::invalid_argument("pohozaev_surface: radius must be positive");
    const int n = f.ctx.n;
    const double m = f.ctx.bubble_exp();
    auto integrand = [&](const Vec& theta) {
        const EvalResult e = eval(f, at_point(scaled(theta, r)));
        const double u_r = dot(theta, e.gradient);
        // K u^q = -u lap u keeps the curvature term closed-form.
        return r * u_r * u_r - 0.5 * r * norm2(e.gradient) -
               (m / n) * r * e.value * e.laplacian + m * e.value * u_r;
    };
    const SphereResult res = sphere_integrate(n, integrand, rtol, 0.0, 1, 8, threads);
    const double scale = std::pow(r, n - 1);
    PohozaevValue out;
    out.value = scale * res.value;
    out.err_est = scale * res.err_est;
    out.converged = res.converged;
    return out;
}

PohozaevReport pohozaev_check(const SolutionField& f, double r, const PohozaevOptions& opt) {
    PohozaevReport rep;
    rep.r = r;
    rep.mode = opt.fd_gradient ? "finite-difference" : "divergence";
    const PohozaevValue vol = pohozaev_volume(f, r, opt);
    const PohozaevValue surf = pohozaev_surface(f, r, std::min(opt.rtol, 1e-10), opt.threads);
    rep.volume = vol.value;
    rep.surface = surf.value;
    rep.discrepancy = std::abs(vol.value - surf.value);
    rep.err_combined = vol.err_est + surf.err_est;
    rep.converged = vol.converged && surf.converged;
    return rep;
}

double w_energy(const CylinderField& cyl, double s, double rtol, int threads) {
    auto integrand = [&](const Vec& theta) {
        const double v = cylinder_value(cyl, s, theta);
        return 0.5 * v * v;
    };
    return sphere_integrate(cyl.source.ctx.n, integrand, rtol, 0.0, 1, 8, threads).value;
}

IdentityCheck w_second_derivative_identity(const CylinderField& cyl, double s, double rtol,
                                           int threads) {
    const SolutionField& f = cyl.source;
    const int n = f.ctx.n;
    const double m = f.ctx.bubble_exp();
    const double h = kEnergyStep;
    IdentityCheck out;
    out.lhs = (-w_energy(cyl, s + 2.0 * h, rtol, threads) +
               16.0 * w_energy(cyl, s + h, rtol, threads) -
               30.0 * w_energy(cyl, s, rtol, threads) +
               16.0 * w_energy(cyl, s - h, rtol, threads) -
               w_energy(cyl, s - 2.0 * h, rtol, threads)) /
              (12.0 * h * h);
    const double r = std::exp(s);
    const double rn = std::pow(r, n);
    auto integrand = [&](const Vec& theta) {
        const EvalResult e = eval(f, at_point(scaled(theta, r)));
        const CylinderPoint cp = from_eval(f.ctx, r, theta, e);
        // -K v^q = r^n u lap u for the induced curvature.
        return cp.v_s * cp.v_s + norm2(cp.theta_gradient) + m * m * cp.v * cp.v +
               rn * e.value * e.laplacian;
    };
    out.rhs = sphere_integrate(n, integrand, rtol, 0.0, 1, 8, threads).value;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

IdentityCheck pohozaev_cylinder_identity(const CylinderField& cyl, double s,
                                         const PohozaevOptions& opt) {
    const SolutionField& f = cyl.source;
    const int n = f.ctx.n;
    const double m = f.ctx.bubble_exp();
    const double r = std::exp(s);
    const double rn = std::pow(r, n);
    IdentityCheck out;
    out.lhs = 2.0 * pohozaev_volume(f, r, opt).value;
    auto integrand = [&](const Vec& theta) {
        const EvalResult e = eval(f, at_point(scaled(theta, r)));
        const CylinderPoint cp = from_eval(f.ctx, r, theta, e);
        // (n-2)/n K v^q = -(n-2)/n r^n u lap u.
        return cp.v_s * cp.v_s - norm2(cp.theta_gradient) - m * m * cp.v * cp.v -
               (2.0 * m / n) * rn * e.value * e.laplacian;
    };
    out.rhs = sphere_integrate(n, integrand, std::min(opt.rtol, 1e-10), 0.0, 1, 8, opt.threads).value;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

std::vector<GrowthRow> volume_growth(const SolutionField& f, const std::vector<double>& radii,
                                     const std::function<double(double)>& target,
                                     const BallOptions& opt) {
    std::vector<GrowthRow> rows;
    rows.reserve(radii.size());
    for (const double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("volume_growth: radii must be positive");
        if (!rows.empty() && r <= rows.back().r)
            throw std::invalid_argument("volume_growth: radii must be increasing");
        const BallResult res = ball_integrate(f, r, power_integrand(f.ctx.q), opt);
        GrowthRow row;
        row.r = r;
        row.value = res.value;
        row.err_est = res.err_est;
        row.converged = res.converged;
        row.per_log =
            r > 1.0 ? res.value / std::log(r) : std::numeric_limits<double>::quiet_NaN();
        row.per_target = std::numeric_limits<double>::quiet_NaN();
        if (target) {
            const double t = target(r);
            if (t > 0.0) row.per_target = res.value / t;
        }
        rows.push_back(row);
    }
    return rows;
}

SphereNorm sphere_lp(const SolutionField& f, double r, double p_exp, double rtol,
                     int max_level, int threads) {
    if (!(r > 0.0)) throw std::invalid_argument("sphere_lp: radius must be positive");
    if (!(p_exp >= 1.0)) throw std::invalid_argument("sphere_lp: exponent must be >= 1");
    auto integrand = [&](const Vec& theta) {
        return std::pow(value(f, at_point(scaled(theta, r))), p_exp);
    };
    const SphereResult res = sphere_integrate(f.ctx.n, integrand, rtol, 0.0, 2, max_level, threads);
    SphereNorm out;
    out.value = res.value;
    out.err_est = res.err_est;
    out.converged = res.converged;
    out.normalized = res.value * std::pow(r, f.ctx.bubble_exp() * p_exp);
    return out;
}

std::vector<DecayRow> slow_decay_measure(const SolutionField& f,
                                         const std::vector<double>& radii, int sphere_level) {
    const double m = f.ctx.bubble_exp();
    std::vector<Vec> dirs = sphere_rule(f.ctx.n, sphere_level).directions;
    for (const BubbleTerm& b : f.bubbles) {
        const double len = norm(b.center);
        if (len > 0.0) dirs.push_back(scaled(b.center, 1.0 / len));
    }
    std::vector<DecayRow> rows;
    rows.reserve(radii.size());
    for (const double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("slow_decay_measure: radii must be positive");
        double sup = 0.0;
        for (const Vec& d : dirs)
            sup = std::max(sup, value(f, at_point(scaled(d, r))));
        rows.push_back(DecayRow{r, std::pow(r, m) * sup});
    }
    return rows;
}

DiagnosticsReport diagnostics(const SolutionField& f, const std::vector<double>& s_grid,
                              const DiagnosticsConfig& cfg) {
    const int n = f.ctx.n;
    const double q = f.ctx.q;
    const CylinderField cyl = to_cylinder(f);
    std::vector<Vec> dirs = sphere_rule(n, cfg.sphere_level).directions;
    for (const BubbleTerm& b : f.bubbles) {
        const double len = norm(b.center);
        if (len > 0.0) dirs.push_back(scaled(b.center, 1.0 / len));
    }
    DiagnosticsReport rep;
    rep.p_inf = std::numeric_limits<double>::infinity();
    for (const double s : s_grid) {
        const double r = std::exp(s);
        DiagnosticsRow row;
        row.s = s;
        row.r = r;
        const double int_vs2 =
            sphere_integrate(n,
                             [&](const Vec& th) {
                                 const CylinderPoint cp = cylinder_eval(cyl, s, th);
                                 return cp.v_s * cp.v_s;
                             },
                             1e-8, 0.0, 1, 8, cfg.threads)
                .value;
        const double int_v2 =
            sphere_integrate(n,
                             [&](const Vec& th) {
                                 const double v = cylinder_value(cyl, s, th);
                                 return v * v;
                             },
                             1e-8, 0.0, 1, 8, cfg.threads)
                .value;
        // |v_s|^q: the absolute value keeps fractional exponents (n = 5 gives
        // q = 10/3) well defined and is what the comparison pairs with.
        const double int_vsq =
            sphere_integrate(n,
                             [&](const Vec& th) {
                                 const CylinderPoint cp = cylinder_eval(cyl, s, th);
                                 return std::pow(std::abs(cp.v_s), q);
                             },
                             1e-6, 0.0, 1, 8, cfg.threads)
                .value;
        row.ds_ratio = int_vs2 / (1.0 + int_v2);
        row.young_decay = std::exp(-cfg.young_lambda * s) * int_vsq;
        double worst_ratio = 0.0;
        double worst_c12 = -std::numeric_limits<double>::infinity();
        double radial_floor = std::numeric_limits<double>::infinity();
        double log_floor = std::numeric_limits<double>::infinity();
        const double hr = kCurvatureStep * r;
        const double log_factor = r > 1.0 ? std::pow(std::log(r), 1.0 + cfg.log_eps) : 0.0;
        for (const Vec& th : dirs) {
            const CylinderPoint cp = cylinder_eval(cyl, s, th);
            const double abs_vs = std::abs(cp.v_s);
            worst_ratio = std::max(worst_ratio, abs_vs / cp.v);
            worst_c12 = std::max(worst_c12, (abs_vs - cfg.c11) / cp.v);
            const double k_plus = induced_curvature(f, at_point(scaled(th, r + hr)));
            const double k_minus = induced_curvature(f, at_point(scaled(th, r - hr)));
            const double dk = (k_plus - k_minus) / (2.0 * hr);
            radial_floor = std::min(radial_floor, r * r * dk);
            log_floor = std::min(log_floor, std::pow(r, 0.5 * (n + 2)) * log_factor * dk);
        }
        row.ratio_max = worst_ratio;
        row.c12_required = worst_c12;
        row.radial_floor = radial_floor;
        row.log_floor = log_floor;
        PohozaevOptions popt;
        popt.rtol = cfg.pohozaev_rtol;
        popt.threads = cfg.threads;
        row.p_value = pohozaev_volume(f, r, popt).value;
        rep.p_inf = std::min(rep.p_inf, row.p_value);
        rep.rows.push_back(row);
    }
    if (rep.rows.empty()) rep.p_inf = 0.0;
    return rep;
}

}  // namespace csc
