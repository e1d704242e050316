#include "csc/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace csc {

bool SuiteReport::all_pass() const {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace {

std::string note_fmt(const char* pattern, ...) {
    char buf[256];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return std::string(buf);
}

int term_count(const SolutionField& f) {
    return static_cast<int>(f.bubbles.size()) + (f.flat ? 1 : 0) + (f.baseline ? 1 : 0);
}

// A single round term induces K == 1 identically; that pins the scan and the
// functional to closed-form expectations.
bool unit_curvature(const SolutionField& f) { return !f.flat && term_count(f) == 1; }

}  // namespace

SuiteReport curvature_suite(const SolutionField& f, const SuiteOptions& opt) {
    SuiteReport rep;
    rep.suite = "curvature";
    SamplingPlan plan;
    plan.target_points = opt.sample_points;
    const CurvatureScan scan = curvature_bounds(f, sample_points(f, plan));

    {
        CheckResult c;
        c.name = "induced curvature stays positive";
        c.measured = scan.min_value;
        c.limit = 0.0;
        c.pass = scan.all_positive && scan.min_value > 0.0;
        c.note = note_fmt("min %.17g over %d points, at |x| = %.6g", scan.min_value,
                          scan.count, norm(scan.argmin));
        rep.checks.push_back(c);
    }
    {
        // Each term contributes K_term u_term^p with K_term below its own sup,
        // and (sum u)^p >= sum u^p, so the superposition cannot exceed the
        // largest per-term sup.
        double bound = 0.0;
        if (f.baseline || !f.bubbles.empty()) bound = 1.0;
        if (f.flat) bound = std::max(bound, flat_curvature_max(f.ctx));
        CheckResult c;
        c.name = "induced curvature stays below the per-term sup";
        c.measured = scan.max_value;
        c.limit = bound;
        c.pass = scan.max_value <= bound + 1e-9;
        c.note = note_fmt("max %.17g at |x| = %.6g", scan.max_value, norm(scan.argmax));
        rep.checks.push_back(c);
    }
    if (unit_curvature(f)) {
        CheckResult c;
        c.name = "curvature is constant and equal to one";
        c.measured =
            std::max(std::abs(scan.min_value - 1.0), std::abs(scan.max_value - 1.0));
        c.limit = 1e-11;
        c.pass = c.measured <= c.limit;
        c.note = note_fmt("range [%.17g, %.17g]", scan.min_value, scan.max_value);
        rep.checks.push_back(c);
    }
    if (f.flat && f.bubbles.empty() && !f.baseline) {
        const double lo = flat_curvature_min(f.ctx);
        const double hi = flat_curvature_max(f.ctx);
        CheckResult floor;
        floor.name = "scan reaches the closed-form window floor";
        floor.measured = std::abs(scan.min_value - lo);
        floor.limit = 1e-9;
        floor.pass = floor.measured <= floor.limit;
        floor.note = note_fmt("min %.17g vs (n-2)^2/4 = %.17g", scan.min_value, lo);
        rep.checks.push_back(floor);
        CheckResult ceil;
        ceil.name = "scan reaches the closed-form window ceiling";
        ceil.measured = std::abs(scan.max_value - hi);
        ceil.limit = 1e-9;
        ceil.pass = ceil.measured <= ceil.limit;
        ceil.note = note_fmt("max %.17g vs n(n-2)/2 = %.17g", scan.max_value, hi);
        rep.checks.push_back(ceil);
    }
    return rep;
}

SuiteReport pohozaev_suite(const SolutionField& f, const SuiteOptions& opt) {
    SuiteReport rep;
    rep.suite = "pohozaev";
    PohozaevOptions popt;
    popt.rtol = opt.rtol;
    popt.threads = opt.threads;
    const bool unit_k = unit_curvature(f);
    for (const double r : opt.radii) {
        const PohozaevReport pr = pohozaev_check(f, r, popt);
        CheckResult c;
        c.name = note_fmt("surface and volume forms agree at r = %.6g", r);
        c.measured = pr.discrepancy;
        c.limit = 10.0 * (pr.err_combined + 1e-8);
        c.err_est = pr.err_combined;
        c.pass = pr.discrepancy <= c.limit;
        c.note = note_fmt("volume %.17g surface %.17g (%s%s)", pr.volume, pr.surface,
                          pr.mode.c_str(), pr.converged ? "" : ", unconverged");
        rep.checks.push_back(c);
        if (unit_k) {
            CheckResult z;
            z.name = note_fmt("constant-curvature functional vanishes at r = %.6g", r);
            z.measured = std::max(std::abs(pr.volume), std::abs(pr.surface));
            z.limit = 1e-9;
            z.err_est = pr.err_combined;
            z.pass = z.measured <= z.limit;
            z.note = note_fmt("volume %.3g surface %.3g", pr.volume, pr.surface);
            rep.checks.push_back(z);
        }
    }
    return rep;
}

SuiteReport growth_suite(const SolutionField& f, const SuiteOptions& opt) {
    SuiteReport rep;
    rep.suite = "growth";
    BallOptions bopt;
    bopt.rtol = opt.rtol;
    bopt.threads = opt.threads;
    const std::vector<GrowthRow> rows = volume_growth(f, opt.radii, opt.growth_target, bopt);
    for (const GrowthRow& row : rows) {
        CheckResult c;
        c.name = note_fmt("conformal volume is positive at r = %.6g", row.r);
        c.measured = row.value;
        c.limit = 0.0;
        c.err_est = row.err_est;
        c.pass = row.value > 0.0;
        c.note = note_fmt("integral %.17g, per ln r %.6g%s", row.value, row.per_log,
                          row.converged ? "" : ", unconverged");
        rep.checks.push_back(c);
        if (opt.growth_target) {
            CheckResult t;
            t.name = note_fmt("growth clears the prescribed target at r = %.6g", row.r);
            t.measured = row.per_target;
            t.limit = 1.0;
            t.err_est = row.err_est;
            t.pass = row.per_target >= 1.0;
            t.note = note_fmt("integral %.17g is %.6g times the target", row.value,
                              row.per_target);
            rep.checks.push_back(t);
        }
    }
    if (rows.size() >= 2) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < rows.size(); ++i)
            worst = std::min(worst, rows[i].value - rows[i - 1].value);
        CheckResult c;
        c.name = "conformal volume grows with the radius";
        c.measured = worst;
        c.limit = 0.0;
        c.pass = worst > 0.0;
        c.note = note_fmt("smallest increment across %zu radii", rows.size());
        rep.checks.push_back(c);
    }
    return rep;
}

SuiteReport cylinder_suite(const SolutionField& f, const SuiteOptions& opt) {
    SuiteReport rep;
    rep.suite = "cylinder";
    const int n = f.ctx.n;
    const CylinderField cyl = to_cylinder(f);
    const std::vector<Vec>& probes = sphere_rule(n, 1).directions;

    {
        double worst = 0.0;
        for (const double r : {0.7, 2.3}) {
            for (const Vec& d : probes) {
                const Vec x = scaled(d, r);
                const double direct = value(f, x);
                worst = std::max(worst,
                                 std::abs(cylinder_restore(cyl, x) - direct) / direct);
            }
        }
        CheckResult c;
        c.name = "transform round trip returns the field";
        c.measured = worst;
        c.limit = 1e-13;
        c.pass = worst <= c.limit;
        c.note = note_fmt("worst relative gap over %zu probe points", 2 * probes.size());
        rep.checks.push_back(c);
    }
    for (const double s : opt.s_grid) {
        const double res = cylinder_residual(cyl, s, probes);
        CheckResult c;
        c.name = note_fmt("cylinder equation residual at s = %.6g", s);
        c.measured = res;
        c.limit = 1e-6;
        c.pass = res <= c.limit;
        c.note = note_fmt("max over %zu directions, central differences", probes.size());
        rep.checks.push_back(c);
    }
    {
        PohozaevOptions popt;
        popt.rtol = opt.rtol;
        popt.threads = opt.threads;
        for (const double s : opt.s_grid) {
            const IdentityCheck id = pohozaev_cylinder_identity(cyl, s, popt);
            CheckResult c;
            c.name = note_fmt("functional matches the cylinder energy at s = %.6g", s);
            c.measured = id.gap;
            c.limit = 1e-5;
            c.pass = id.gap <= c.limit;
            c.note = note_fmt("ball side %.17g cylinder side %.17g", id.lhs, id.rhs);
            rep.checks.push_back(c);
        }
    }
    if (!opt.s_grid.empty()) {
        const IdentityCheck id =
            w_second_derivative_identity(cyl, opt.s_grid.front(), 1e-11, opt.threads);
        CheckResult c;
        c.name = note_fmt("energy curvature identity at s = %.6g", opt.s_grid.front());
        c.measured = id.gap;
        c.limit = 1e-4;
        c.pass = id.gap <= c.limit;
        c.note = note_fmt("difference %.17g exact %.17g", id.lhs, id.rhs);
        rep.checks.push_back(c);
    }
    return rep;
}

std::vector<SuiteReport> run_suites(const SolutionField& f, const std::string& which,
                                    const SuiteOptions& opt) {
    const bool all = which == "all";
    if (!all && which != "curvature" && which != "pohozaev" && which != "growth" &&
        which != "cylinder")
        throw std::invalid_argument("run_suites: unknown suite '" + which + "'");
    std::vector<SuiteReport> out;
    if (all || which == "curvature") out.push_back(curvature_suite(f, opt));
    if (all || which == "pohozaev") out.push_back(pohozaev_suite(f, opt));
    if (all || which == "growth") out.push_back(growth_suite(f, opt));
    if (all || which == "cylinder") out.push_back(cylinder_suite(f, opt));
    return out;
}

}  // namespace csc
