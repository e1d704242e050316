#include "csc/fowler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>

namespace csc {

namespace {

double m_of(const DimensionContext& ctx) { return ctx.bubble_exp(); }

// cubic Hermite interpolation on [0, 1] with endpoint values y0, y1 and
// endpoint derivatives d0, d1 given per unit of the original variable
double hermite(double t, double dt, double y0, double y1, double d0, double d1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * dt * d0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * dt * d1;
}

}  // namespace

double cylinder_ode_rhs(const DimensionContext& ctx, double v) {
    if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double m = m_of(ctx);
    return m * m * v - m * (m + 1.0) * std::pow(v, ctx.p);
}

double cylinder_ode_residual(const DimensionContext& ctx, double v, double vpp) {
    const double m = m_of(ctx);
    return vpp - m * m * v + m * (m + 1.0) * std::pow(v, ctx.p);
}

double orbit_energy(const DimensionContext& ctx, double v, double vp) {
    const double m = m_of(ctx);
    return 0.5 * vp * vp - 0.5 * m * m * (v * v - std::pow(v, ctx.q));
}

double fixed_point(const DimensionContext& ctx) {
    return std::pow(static_cast<double>(ctx.n - 2) / ctx.n, 0.25 * (ctx.n - 2));
}

double unit_curvature_scale(const DimensionContext& ctx) {
    return std::pow(4.0 / (static_cast<double>(ctx.n) * (ctx.n - 2)), 0.25 * (ctx.n - 2));
}

namespace {

// One accepted Dormand-Prince 5(4) step from (s, v, vp) toward s_end,
// clipping at the endpoint.  The embedded estimate controls the step; a
// step is also rejected when it moves the first integral by more than the
// drift tolerance, since conservation is what the downstream checks lean
// on.  Returns false when rejections drive |h| under h_floor, which on this
// confined phase plane means the orbit is running into v = 0.
bool dp54_step(const DimensionContext& ctx, const FowlerOptions& opt, double& s, double& v,
               double& vp, double& h, double s_end, double h_floor) {
    const double e_start = orbit_energy(ctx, v, vp);
    for (int attempt = 0; attempt < 200; ++attempt) {
        double ht = h;
        bool clipped = false;
        const double remaining = s_end - s;
        if (ht * remaining <= 0.0 || std::abs(ht) >= std::abs(remaining)) {
            // would land on or past the endpoint: take exactly the remainder
            ht = remaining;
            clipped = true;
        }

        const double k1v = vp, k1p = cylinder_ode_rhs(ctx, v);
        double av = v + ht * (0.2 * k1v);
        double ap = vp + ht * (0.2 * k1p);
        const double k2v = ap, k2p = cylinder_ode_rhs(ctx, av);
        av = v + ht * (3.0 / 40.0 * k1v + 9.0 / 40.0 * k2v);
        ap = vp + ht * (3.0 / 40.0 * k1p + 9.0 / 40.0 * k2p);
        const double k3v = ap, k3p = cylinder_ode_rhs(ctx, av);
        av = v + ht * (44.0 / 45.0 * k1v - 56.0 / 15.0 * k2v + 32.0 / 9.0 * k3v);
        ap = vp + ht * (44.0 / 45.0 * k1p - 56.0 / 15.0 * k2p + 32.0 / 9.0 * k3p);
        const double k4v = ap, k4p = cylinder_ode_rhs(ctx, av);
        av = v + ht * (19372.0 / 6561.0 * k1v - 25360.0 / 2187.0 * k2v +
                       64448.0 / 6561.0 * k3v - 212.0 / 729.0 * k4v);
        ap = vp + ht * (19372.0 / 6561.0 * k1p - 25360.0 / 2187.0 * k2p +
                        64448.0 / 6561.0 * k3p - 212.0 / 729.0 * k4p);
        const double k5v = ap, k5p = cylinder_ode_rhs(ctx, av);
        av = v + ht * (9017.0 / 3168.0 * k1v - 355.0 / 33.0 * k2v + 46732.0 / 5247.0 * k3v +
                       49.0 / 176.0 * k4v - 5103.0 / 18656.0 * k5v);
        ap = vp + ht * (9017.0 / 3168.0 * k1p - 355.0 / 33.0 * k2p + 46732.0 / 5247.0 * k3p +
                        49.0 / 176.0 * k4p - 5103.0 / 18656.0 * k5p);
        const double k6v = ap, k6p = cylinder_ode_rhs(ctx, av);

        const double v5 = v + ht * (35.0 / 384.0 * k1v + 500.0 / 1113.0 * k3v +
                                    125.0 / 192.0 * k4v - 2187.0 / 6784.0 * k5v +
                                    11.0 / 84.0 * k6v);
        const double p5 = vp + ht * (35.0 / 384.0 * k1p + 500.0 / 1113.0 * k3p +
                                     125.0 / 192.0 * k4p - 2187.0 / 6784.0 * k5p +
                                     11.0 / 84.0 * k6p);
        const double k7v = p5, k7p = cylinder_ode_rhs(ctx, v5);

        const double ev = ht * (71.0 / 57600.0 * k1v - 71.0 / 16695.0 * k3v +
                                71.0 / 1920.0 * k4v - 17253.0 / 339200.0 * k5v +
                                22.0 / 525.0 * k6v - 1.0 / 40.0 * k7v);
        const double ep = ht * (71.0 / 57600.0 * k1p - 71.0 / 16695.0 * k3p +
                                71.0 / 1920.0 * k4p - 17253.0 / 339200.0 * k5p +
                                22.0 / 525.0 * k6p - 1.0 / 40.0 * k7p);

        const double wv = opt.atol + opt.rtol * std::max(std::abs(v), std::abs(v5));
        const double wp = opt.atol + opt.rtol * std::max(std::abs(vp), std::abs(p5));
        const double rv = ev / wv, rp = ep / wp;
        const double err = std::sqrt(0.5 * (rv * rv + rp * rp));

        bool ok = err <= 1.0 && v5 > 0.0;
        if (ok && std::abs(ht) > 64.0 * h_floor &&
            std::abs(orbit_energy(ctx, v5, p5) - e_start) > opt.energy_drift_tol)
            ok = false;

        double factor = 0.2;
        if (err > 0.0 && std::isfinite(err))
            factor = std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
        else if (err == 0.0)
            factor = 5.0;

        if (ok) {
            s = clipped ? s_end : s + ht;
            v = v5;
            vp = p5;
            h = ht * factor;
            if (std::abs(h) > opt.max_step) h = (h > 0.0 ? opt.max_step : -opt.max_step);
            return true;
        }
        h = ht * std::min(factor, 0.5);
        if (std::abs(h) < h_floor) return false;
    }
    return false;
}

}  // namespace

FowlerOrbit integrate_orbit(const DimensionContext& ctx, double v0, double v0p, double s_span,
                            const FowlerOptions& opt) {
    if (!(v0 > 0.0)) throw std::invalid_argument("integrate_orbit: need v0 > 0");
    FowlerOrbit orb;
    orb.n = ctx.n;
    orb.v0 = v0;
    orb.v0p = v0p;
    orb.energy0 = orbit_energy(ctx, v0, v0p);
    orb.samples.push_back({0.0, v0, v0p, orb.energy0});
    if (s_span == 0.0) return orb;

    const double dir = s_span > 0.0 ? 1.0 : -1.0;
    const double h_floor = 1e-13 * std::max(1.0, std::abs(s_span));
    double s = 0.0, v = v0, vp = v0p;
    double h = dir * std::min({0.1, 0.01 * std::abs(s_span), opt.max_step});
    std::size_t steps = 0;
    while (dir * (s_span - s) > 0.0) {
        if (++steps > opt.max_steps)
            throw std::runtime_error("integrate_orbit: step budget exceeded");
        if (!dp54_step(ctx, opt, s, v, vp, h, s_span, h_floor)) {
            orb.blow_up = true;
            break;
        }
        const double e = orbit_energy(ctx, v, vp);
        orb.energy_drift = std::max(orb.energy_drift, std::abs(e - orb.energy0));
        orb.samples.push_back({s, v, vp, e});
    }
    return orb;
}

FowlerOrbit necksize_orbit(const DimensionContext& ctx, double eps, const FowlerOptions& opt) {
    const double vstar = fixed_point(ctx);
    if (!(eps > 0.0) || !(eps <= vstar * (1.0 + 1e-9)))
        throw std::invalid_argument("necksize_orbit: need eps in (0, fixed_point]");

    FowlerOrbit orb;
    orb.n = ctx.n;
    orb.v0 = eps;
    orb.v0p = 0.0;
    orb.energy0 = orbit_energy(ctx, eps, 0.0);
    orb.necksize = eps;
    orb.samples.push_back({0.0, eps, 0.0, orb.energy0});
    if (eps >= vstar * (1.0 - 1e-12)) {
        orb.degenerate = true;
        orb.v_max = eps;
        return orb;
    }

    const double h_floor = 1e-13 * std::max(1.0, opt.search_span);
    double s = 0.0, v = eps, vp = 0.0;
    double h = std::min(1e-3, opt.max_step);
    std::size_t steps = 0;
    double s_half = 0.0, v_top = 0.0;
    bool found = false;
    while (s < opt.search_span) {
        if (++steps > opt.max_steps)
            throw std::runtime_error("necksize_orbit: step budget exceeded");
        const double ps = s, pv = v, pvp = vp;
        if (!dp54_step(ctx, opt, s, v, vp, h, opt.search_span, h_floor)) {
            orb.blow_up = true;
            break;
        }
        const double e = orbit_energy(ctx, v, vp);
        orb.energy_drift = std::max(orb.energy_drift, std::abs(e - orb.energy0));
        orb.samples.push_back({s, v, vp, e});
        if (pvp > 0.0 && vp <= 0.0) {
            // v' crosses zero at the top of the well: refine on the cubic
            // interpolant, whose slope data v'' follows from the equation
            const double dt = s - ps;
            const double a0 = cylinder_ode_rhs(ctx, pv), a1 = cylinder_ode_rhs(ctx, v);
            double lo = 0.0, hi = 1.0;
            while ((hi - lo) * dt > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                (hermite(mid, dt, pvp, vp, a0, a1) > 0.0 ? lo : hi) = mid;
            }
            const double t = 0.5 * (lo + hi);
            s_half = ps + t * dt;
            v_top = hermite(t, dt, pv, v, pvp, vp);
            found = true;
            break;
        }
    }
    if (!found) {
        if (!orb.blow_up) throw std::runtime_error("necksize_orbit: no return within the search span");
        return orb;
    }

    orb.periodic = true;
    orb.period = 2.0 * s_half;
    // finish the revolution so the stored trajectory covers one full period
    while (s < orb.period) {
        if (++steps > opt.max_steps)
            throw std::runtime_error("necksize_orbit: step budget exceeded");
        if (!dp54_step(ctx, opt, s, v, vp, h, orb.period, h_floor)) {
            orb.blow_up = true;
            break;
        }
        const double e = orbit_energy(ctx, v, vp);
        orb.energy_drift = std::max(orb.energy_drift, std::abs(e - orb.energy0));
        orb.samples.push_back({s, v, vp, e});
    }

    double lo = orb.samples.front().v, hi = v_top;
    for (const FowlerSample& smp : orb.samples) {
        lo = std::min(lo, smp.v);
        hi = std::max(hi, smp.v);
    }
    orb.necksize = lo;
    orb.v_max = hi;
    return orb;
}

SlopeBound slope_bound(const DimensionContext& ctx, const FowlerOrbit& orbit) {
    const double m = m_of(ctx);
    const double vstar = fixed_point(ctx);
    SlopeBound out;
    for (const FowlerSample& smp : orbit.samples)
        out.observed = std::max(out.observed, std::abs(smp.vp));
    // |v'| peaks where v'' = 0, i.e. where the trajectory crosses the rest
    // value; refine those crossings on the cubic interpolant
    for (std::size_t i = 0; i + 1 < orbit.samples.size(); ++i) {
        const FowlerSample& a = orbit.samples[i];
        const FowlerSample& b = orbit.samples[i + 1];
        if ((a.v - vstar) * (b.v - vstar) >= 0.0) continue;
        const double dt = b.s - a.s;
        double lo = 0.0, hi = 1.0;
        const bool rising = b.v > a.v;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool above = hermite(mid, dt, a.v, b.v, a.vp, b.vp) > vstar;
            (above == rising ? hi : lo) = mid;
        }
        const double t = 0.5 * (lo + hi);
        const double slope = hermite(t, dt, a.vp, b.vp, cylinder_ode_rhs(ctx, a.v),
                                     cylinder_ode_rhs(ctx, b.v));
        out.observed = std::max(out.observed, std::abs(slope));
    }
    // sup of v^2 - v^q over v > 0 sits exactly at the rest value
    const double g = vstar * vstar - std::pow(vstar, ctx.q);
    out.bound = std::sqrt(2.0 * std::max(0.0, orbit.energy0 + 0.5 * m * m * g));
    return out;
}

std::vector<FamilyRow> necksize_family(const DimensionContext& ctx,
                                       const std::vector<double>& eps_grid,
                                       const FowlerOptions& opt) {
    const double vstar = fixed_point(ctx);
    for (const double eps : eps_grid)
        if (!(eps > 0.0) || !(eps <= vstar * (1.0 + 1e-9)))
            throw std::invalid_argument("necksize_family: eps out of range");

    std::vector<FamilyRow> rows(eps_grid.size());
    auto fill = [&](std::size_t i) {
        const FowlerOrbit orb = necksize_orbit(ctx, eps_grid[i], opt);
        rows[i] = {eps_grid[i], orb.period, orb.v_max, slope_bound(ctx, orb).observed};
    };
    const std::size_t count = rows.size();
    const std::size_t workers =
        std::min<std::size_t>(opt.threads > 1 ? static_cast<std::size_t>(opt.threads) : 1, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fill(i);
    } else {
        // index-addressed slots, contiguous blocks: identical for any count
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t a = count * w / workers;
            const std::size_t b = count * (w + 1) / workers;
            pool.emplace_back([a, b, &fill] {
                for (std::size_t i = a; i < b; ++i) fill(i);
            });
        }
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

namespace {

void append_g17(std::string& out, double x, char tail) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
    out += tail;
}

}  // namespace

std::string orbit_csv(const FowlerOrbit& orbit) {
    std::string out = "s,v,v_prime,energy\n";
    for (const FowlerSample& smp : orbit.samples) {
        append_g17(out, smp.s, ',');
        append_g17(out, smp.v, ',');
        append_g17(out, smp.vp, ',');
        append_g17(out, smp.energy, '\n');
    }
    return out;
}

std::string family_csv(const std::vector<FamilyRow>& rows) {
    std::string out = "eps,period,v_max,max_slope\n";
    for (const FamilyRow& row : rows) {
        append_g17(out, row.eps, ',');
        append_g17(out, row.period, ',');
        append_g17(out, row.v_max, ',');
        append_g17(out, row.max_slope, '\n');
    }
    return out;
}

}  // namespace csc
