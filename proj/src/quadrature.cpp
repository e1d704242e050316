#include "csc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "csc/gauss.hpp"

namespace csc {

// ---- sphere rules ----------------------------------------------------------

namespace {

// Polar nodes for the slice weight sin^{n-2}(gamma) on [0, pi].  With
// tau = cos(gamma) the weight becomes (1-tau^2)^{(n-3)/2}: a polynomial for
// odd n, absorbed into Gauss-Legendre nodes in tau; for even n the sin power
// is even, where the periodic midpoint rule is spectrally accurate.  Both
// node sets are symmetric under gamma -> pi - gamma.
struct PolarNode {
    double cos_gamma, sin_gamma, weight;
};

std::vector<PolarNode> polar_nodes(int n, int count) {
    std::vector<PolarNode> out;
    if (n % 2 == 1) {
        const gauss::Rule& gl = gauss::legendre(count);
        for (int k = 0; k < count; ++k) {
            const double tau = gl.nodes[static_cast<std::size_t>(k)];
            const double s2 = 1.0 - tau * tau;
            out.push_back({tau, std::sqrt(s2),
                           gl.weights[static_cast<std::size_t>(k)] *
                               std::pow(s2, (n - 3) / 2)});
        }
    } else {
        const double h = M_PI / count;
        for (int j = 0; j < count; ++j) {
            const double gamma = (j + 0.5) * h;
            const double s = std::sin(gamma);
            out.push_back({std::cos(gamma), s, std::pow(s, n - 2) * h});
        }
    }
    return out;
}

SphereRule build_sphere_rule(int n, int level) {
    SphereRule rule;
    if (n == 2) {
        // trapezoid ring; midpoint phase so no node sits on an axis
        const int count = 4 << level;
        const double h = 2.0 * M_PI / count;
        for (int i = 0; i < count; ++i) {
            const double t = (i + 0.5) * h;
            rule.directions.push_back({std::cos(t), std::sin(t)});
            rule.weights.push_back(h);
        }
        return rule;
    }
    const SphereRule& sub = sphere_rule(n - 1, level);
    for (const PolarNode& p : polar_nodes(n, 2 << level)) {
        for (std::size_t i = 0; i < sub.directions.size(); ++i) {
            Vec dir(static_cast<std::size_t>(n));
            dir[0] = p.cos_gamma;
            for (int k = 1; k < n; ++k)
                dir[static_cast<std::size_t>(k)] =
                    p.sin_gamma * sub.directions[i][static_cast<std::size_t>(k - 1)];
            rule.directions.push_back(std::move(dir));
            rule.weights.push_back(p.weight * sub.weights[i]);
        }
    }
    return rule;
}

// node count without building the rule; guards the adaptive loops against
// tensor blow-up in higher dimensions
std::size_t rule_size(int n, int level) {
    std::size_t size = static_cast<std::size_t>(4) << level;
    for (int m = 3; m <= n; ++m) size *= static_cast<std::size_t>(2) << level;
    return size;
}

constexpr std::size_t kMaxRuleNodes = 4'000'000;

// Evaluate fn(i) for i in [0, count), optionally across worker threads in
// contiguous index blocks.  Each call writes only its own slot of a
// caller-owned results array and the caller reduces in index order, so the
// outcome is bitwise independent of the thread count.
template <typename Fn>
void run_indexed(std::size_t count, int threads, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(threads > 1 ? static_cast<std::size_t>(threads) : 1, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = count * w / workers;
        const std::size_t hi = count * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

}  // namespace

const SphereRule& sphere_rule(int n, int level) {
    if (n < 2) throw std::invalid_argument("sphere_rule: need n >= 2");
    if (level < 0) throw std::invalid_argument("sphere_rule: need level >= 0");
    static std::mutex mu;
    static std::map<std::pair<int, int>, SphereRule> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({n, level});
        if (it != cache.end()) return it->second;
    }
    // build outside the lock: construction recurses into lower dimensions
    SphereRule built = build_sphere_rule(n, level);
    std::lock_guard<std::mutex> lock(mu);
    return cache.try_emplace({n, level}, std::move(built)).first->second;
}

SphereResult sphere_integrate(int n, const std::function<double(const Vec&)>& f, double rtol,
                              double atol, int min_level, int max_level, int threads) {
    SphereResult out;
    double prev = 0.0;
    for (int level = min_level; level <= max_level; ++level) {
        if (rule_size(n, level) > kMaxRuleNodes) break;
        const SphereRule& rule = sphere_rule(n, level);
        std::vector<double> vals(rule.directions.size());
        run_indexed(rule.directions.size(), threads,
                    [&](std::size_t i) { vals[i] = f(rule.directions[i]); });
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.directions.size(); ++i)
            acc += rule.weights[i] * vals[i];
        out.evals += rule.directions.size();
        out.level = level;
        out.value = acc;
        if (level > min_level) {
            out.err_est = std::abs(acc - prev);
            if (out.err_est <= std::max(rtol * std::abs(acc), atol)) {
                out.converged = true;
                return out;
            }
        }
        prev = acc;
    }
    return out;
}

std::vector<Vec> orthonormal_frame(const Vec& axis) {
    const int n = static_cast<int>(axis.size());
    const double a = norm(axis);
    if (!(a > 0.0)) throw std::invalid_argument("orthonormal_frame: zero axis");
    std::vector<Vec> frame;
    frame.push_back(scaled(axis, 1.0 / a));
    for (int i = 0; i < n && static_cast<int>(frame.size()) < n; ++i) {
        Vec v = basis_vec(n, i, 1.0);
        for (const Vec& u : frame) axpy(v, -dot(v, u), u);
        const double len = norm(v);
        if (len > 1e-8) frame.push_back(scaled(v, 1.0 / len));
    }
    if (static_cast<int>(frame.size()) != n)
        throw std::runtime_error("orthonormal_frame: degenerate axis");
    return frame;
}

// ---- standard integrands ---------------------------------------------------

FieldFunctional power_integrand(double exponent) {
    return [exponent](const SolutionField& f, const FieldPoint& pt, const CapSet* caps) {
        return std::pow(value(f, pt, caps), exponent);
    };
}

FieldFunctional curvature_moment_volume_integrand() {
    return [](const SolutionField& f, const FieldPoint& pt, const CapSet* caps) {
        const EvalResult e = eval(f, pt, caps);
        return e.laplacian * (f.ctx.n * e.value + f.ctx.q * dot(pt.x, e.gradient));
    };
}

FieldFunctional curvature_moment_fd_integrand(double step_scale) {
    return [step_scale](const SolutionField& f, const FieldPoint& pt, const CapSet* caps) {
        double local = 1.0;
        if (pt.anchor >= 0)
            local = std::max(norm(pt.offset),
                             f.bubbles[static_cast<std::size_t>(pt.anchor)].lambda);
        const double h = step_scale * std::max(norm(pt.x), local);
        double moment = 0.0;
        for (int i = 0; i < f.ctx.n; ++i) {
            FieldPoint plus = pt, minus = pt;
            plus.x[static_cast<std::size_t>(i)] += h;
            minus.x[static_cast<std::size_t>(i)] -= h;
            if (pt.anchor >= 0) {
                plus.offset[static_cast<std::size_t>(i)] += h;
                minus.offset[static_cast<std::size_t>(i)] -= h;
            }
            const double dk =
                (induced_curvature(f, plus, caps) - induced_curvature(f, minus, caps)) /
                (2.0 * h);
            moment += pt.x[static_cast<std::size_t>(i)] * dk;
        }
        return moment * std::pow(value(f, pt, caps), f.ctx.q);
    };
}

// ---- ball integration ------------------------------------------------------

CapSet choose_caps(const SolutionField& f, double R, const BallOptions& opt) {
    CapSet caps;
    const int count = static_cast<int>(f.bubbles.size());
    for (int j = 0; j < count; ++j) {
        const BubbleTerm& bj = f.bubbles[static_cast<std::size_t>(j)];
        const double cj = norm(bj.center);
        double sep = std::numeric_limits<double>::infinity();
        for (int i = 0; i < count; ++i)
            if (i != j)
                sep = std::min(sep, dist(bj.center, f.bubbles[static_cast<std::size_t>(i)].center));
        const double radius =
            std::min(opt.cap_radius_factor * cj, opt.cap_separation_factor * sep);
        if (!(radius > 0.0)) continue;                       // origin-centered: rays resolve it
        if (bj.lambda > radius / opt.sharp_ratio) continue;  // broad enough for direct quadrature
        if (cj - radius >= R) continue;                      // cap region misses the ball
        caps.push_back(Cap{j, radius});
    }
    return caps;
}

namespace {

struct PartialResult {
    double value = 0.0;
    double err = 0.0;
    std::size_t evals = 0;
    bool converged = true;

    void add(const gauss::AdaptiveResult& r, std::size_t fn_evals) {
        value += r.value;
        err += r.err_est;
        evals += fn_evals;
        converged = converged && r.converged;
    }
};

// radial integral along one ray from the origin, split at cap crossings
PartialResult global_ray(const SolutionField& f, const Vec& dir, double R,
                         const FieldFunctional& g, const CapSet& caps, double rtol) {
    std::vector<double> cuts{0.0, R};
    for (const Cap& cap : caps) {
        const Vec& c = f.bubbles[static_cast<std::size_t>(cap.bubble_index)].center;
        const double b = dot(dir, c);
        const double disc = b * b - dot(c, c) + cap.radius * cap.radius;
        if (disc <= 0.0) continue;
        const double root = std::sqrt(disc);
        for (double s : {b - root, b + root})
            if (s > 0.0 && s < R) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    const int n = f.ctx.n;
    std::size_t calls = 0;
    auto integrand = [&](double s) {
        ++calls;
        return g(f, at_point(scaled(dir, s)), &caps) * std::pow(s, n - 1);
    };
    PartialResult out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-14 * R) continue;
        calls = 0;
        out.add(gauss::integrate_adaptive(integrand, cuts[i], cuts[i + 1], rtol, 0.0, 48, 2000),
                0);
        out.evals += calls;
    }
    return out;
}

// radial part of the correction integral for one cap along one local
// direction, truncated exactly where the ray leaves the ball
PartialResult cap_ray(const SolutionField& f, const Cap& cap, double R, const FieldFunctional& g,
                      const CapSet& caps, const Vec& omega, double rtol) {
    PartialResult out;
    const int n = f.ctx.n;
    const BubbleTerm& bj = f.bubbles[static_cast<std::size_t>(cap.bubble_index)];
    const double b = dot(bj.center, omega);
    const double disc = b * b + R * R - dot(bj.center, bj.center);
    if (disc <= 0.0) return out;
    const double root = std::sqrt(disc);
    const double lo = std::max(0.0, -b - root);
    const double hi = std::min(cap.radius, -b + root);
    if (hi <= lo) return out;
    std::size_t calls = 0;
    auto integrand = [&](double s) {
        calls += 2;
        const FieldPoint pt = at_offset(f, cap.bubble_index, scaled(omega, s));
        return (g(f, pt, nullptr) - g(f, pt, &caps)) * std::pow(s, n - 1);
    };
    // resolve the lambda-scale core before the smooth remainder
    double a = lo;
    for (double cut : {std::min(64.0 * bj.lambda, hi), hi}) {
        if (cut > a) {
            calls = 0;
            out.add(gauss::integrate_adaptive(integrand, a, cut, rtol, 0.0, 48, 2000), 0);
            out.evals += calls;
            a = cut;
        }
    }
    return out;
}

// one adaptive pass over sphere levels; ray() maps a direction to a radial
// PartialResult, and the weighted radial errors of the accepted level plus
// the last successive difference form the error estimate
struct SpherePass {
    double value = 0.0;
    double err = 0.0;
    std::size_t evals = 0;
    bool converged = false;
    int level = 0;
};

template <typename Ray>
SpherePass adaptive_sphere_pass(int n, Ray&& ray, double rtol, double atol, double scale_floor,
                                int min_level, int max_level, int threads) {
    SpherePass out;
    double prev = 0.0, diff = 0.0, radial_err = 0.0;
    bool radial_ok = true, seen = false;
    for (int level = min_level; level <= max_level; ++level) {
        if (rule_size(n, level) > kMaxRuleNodes) break;
        const SphereRule& rule = sphere_rule(n, level);
        std::vector<PartialResult> rays(rule.directions.size());
        run_indexed(rule.directions.size(), threads,
                    [&](std::size_t i) { rays[i] = ray(rule.directions[i]); });
        double acc = 0.0;
        radial_err = 0.0;
        radial_ok = true;
        for (std::size_t i = 0; i < rule.directions.size(); ++i) {
            acc += rule.weights[i] * rays[i].value;
            radial_err += rule.weights[i] * rays[i].err;
            radial_ok = radial_ok && rays[i].converged;
            out.evals += rays[i].evals;
        }
        out.value = acc;
        out.level = level;
        if (seen) {
            diff = std::abs(acc - prev);
            const double scale = std::max(std::abs(acc), scale_floor);
            if (diff <= std::max(rtol * scale, atol)) {
                out.err = diff + radial_err;
                out.converged = radial_ok;
                return out;
            }
        }
        seen = true;
        prev = acc;
    }
    out.err = diff + radial_err;
    out.converged = false;
    return out;
}

}  // namespace

BallResult ball_integrate(const SolutionField& f, double R, const FieldFunctional& g,
                          const BallOptions& opt) {
    if (!(R > 0.0)) throw std::invalid_argument("ball_integrate: need R > 0");
    const int n = f.ctx.n;
    const CapSet caps = choose_caps(f, R, opt);
    const double rtol_r = opt.rtol * opt.radial_rtol_factor;

    BallResult out;
    out.cap_count = static_cast<int>(caps.size());

    // cap corrections in bubble-local coordinates
    double cap_total = 0.0, cap_err = 0.0;
    std::size_t evals = 0;
    bool all_ok = true;
    for (const Cap& cap : caps) {
        const BubbleTerm& bj = f.bubbles[static_cast<std::size_t>(cap.bubble_index)];
        const std::vector<Vec> frame = orthonormal_frame(bj.center);
        auto local_ray = [&](const Vec& rdir) {
            Vec omega = zero_vec(n);
            for (int k = 0; k < n; ++k)
                axpy(omega, rdir[static_cast<std::size_t>(k)], frame[static_cast<std::size_t>(k)]);
            return cap_ray(f, cap, R, g, caps, omega, rtol_r);
        };
        const SpherePass pass = adaptive_sphere_pass(n, local_ray, opt.rtol, opt.atol, 1.0,
                                                     opt.cap_min_level, opt.cap_max_level,
                                                     opt.threads);
        cap_total += pass.value;
        cap_err += pass.err;
        evals += pass.evals;
        all_ok = all_ok && pass.converged;
    }

    // global de-peaked part
    auto ray = [&](const Vec& dir) { return global_ray(f, dir, R, g, caps, rtol_r); };
    const SpherePass pass =
        adaptive_sphere_pass(n, ray, opt.rtol, opt.atol, std::abs(cap_total),
                             opt.min_sphere_level, opt.max_sphere_level, opt.threads);

    out.value = pass.value + cap_total;
    out.err_est = pass.err + cap_err;
    out.converged = pass.converged && all_ok;
    out.sphere_level = pass.level;
    out.evals = evals + pass.evals;
    return out;
}

// ---- single-bubble mass profile --------------------------------------------

double bubble_mass_fraction(const DimensionContext& ctx, double t, double rtol) {
    if (t <= 0.0) return 0.0;
    const int n = ctx.n;
    auto integrand = [n](double r) { return std::pow(r, n - 1) * std::pow(1.0 + r * r, -n); };
    // whole mass in closed form via the Beta function:
    // integral_0^inf r^{n-1} (1+r^2)^{-n} dr = Gamma(n/2)^2 / (2 Gamma(n))
    const double whole =
        std::exp(2.0 * std::lgamma(0.5 * n) - std::lgamma(static_cast<double>(n))) / 2.0;
    double partial;
    if (t <= 1.0) {
        partial = gauss::integrate_adaptive(integrand, 0.0, t, rtol).value;
    } else {
        // the tail beyond t maps through r -> 1/r onto a head integral of the
        // same integrand on [0, 1/t]
        partial = whole - gauss::integrate_adaptive(integrand, 0.0, 1.0 / t, rtol).value;
    }
    return partial / whole;
}

double bubble_half_mass_radius(int n, double tol) {
    const DimensionContext ctx = make_context(n);
    double lo = 0.1, hi = 10.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (bubble_mass_fraction(ctx, mid) < 0.5)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace csc
