#include "csc/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csc {

namespace {

constexpr double kLambdaLogGuard = 1e-12;
constexpr double kRadiusLogGuard = 1e8;

// log(a^2 + r^2) without underflow/overflow at extreme scales.
double log_sq_sum(double a, double r) {
    if (r > a) {
        const double t = a / r;
        return 2.0 * std::log(r) + std::log1p(t * t);
    }
    const double t = (a > 0.0) ? r / a : 0.0;
    return 2.0 * std::log(a) + std::log1p(t * t);
}

bool log_path(double lambda, double r) { return lambda < kLambdaLogGuard || r > kRadiusLogGuard; }

double log_bubble_value(const DimensionContext& ctx, double lambda, double r) {
    return std::log(ctx.alpha_n) + ctx.bubble_exp() * (std::log(lambda) - log_sq_sum(lambda, r));
}

// Numerically safe log-sum-exp.
double log_sum_exp(const std::vector<double>& logs) {
    double mx = -HUGE_VAL;
    for (double v : logs) mx = std::max(mx, v);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace

FieldPoint at_point(Vec x) {
    FieldPoint p;
    p.x = std::move(x);
    return p;
}

FieldPoint at_offset(const SolutionField& f, int anchor, Vec offset) {
    FieldPoint p;
    p.anchor = anchor;
    p.x = add(f.bubbles.at(static_cast<std::size_t>(anchor)).center, offset);
    p.offset = std::move(offset);
    return p;
}

// ---- standard bubble -------------------------------------------------------

double bubble_value(const DimensionContext& ctx, double lambda, double r) {
    const double m = ctx.bubble_exp();
    if (log_path(lambda, r)) return std::exp(log_bubble_value(ctx, lambda, r));
    return ctx.alpha_n * std::pow(lambda / (lambda * lambda + r * r), m);
}

double bubble_gradient_coefficient(const DimensionContext& ctx, double lambda, double r) {
    const double m = ctx.bubble_exp();
    const int n = ctx.n;
    if (log_path(lambda, r)) {
        const double lg = std::log((n - 2) * ctx.alpha_n) + m * std::log(lambda) -
                          (m + 1.0) * log_sq_sum(lambda, r);
        return -std::exp(lg);
    }
    const double s = lambda * lambda + r * r;
    return -(n - 2) * ctx.alpha_n * std::pow(lambda, m) * std::pow(s, -(m + 1.0));
}

double bubble_radial_derivative(const DimensionContext& ctx, double lambda, double r) {
    return bubble_gradient_coefficient(ctx, lambda, r) * r;
}

double bubble_laplacian(const DimensionContext& ctx, double lambda, double r) {
    if (log_path(lambda, r)) return -std::exp(ctx.p * log_bubble_value(ctx, lambda, r));
    return -std::pow(bubble_value(ctx, lambda, r), ctx.p);
}

// ---- flat term -------------------------------------------------------------

double flat_value(const DimensionContext& ctx, double b, double rho) {
    const double mu = 0.25 * (ctx.n - 2);
    return std::exp(-mu * log_sq_sum(b, rho));
}

double flat_gradient_coefficient(const DimensionContext& ctx, double b, double rho) {
    const double mu = 0.25 * (ctx.n - 2);
    return -0.5 * (ctx.n - 2) * std::exp(-(mu + 1.0) * log_sq_sum(b, rho));
}

double flat_radial_derivative(const DimensionContext& ctx, double b, double rho) {
    return flat_gradient_coefficient(ctx, b, rho) * rho;
}

double flat_laplacian(const DimensionContext& ctx, double b, double rho) {
    const int n = ctx.n;
    const double mu = 0.25 * (n - 2);
    // -((n-2)/2) S^{-mu-2} (n b^2 + ((n-2)/2) rho^2), S = rho^2 + b^2
    const double ls = log_sq_sum(b, rho);
    double poly;
    if (rho > 1e150) {
        poly = std::exp(2.0 * std::log(rho) + std::log(0.5 * (n - 2)));
    } else {
        poly = n * b * b + 0.5 * (n - 2) * rho * rho;
    }
    return -0.5 * (n - 2) * poly * std::exp(-(mu + 2.0) * ls);
}

double flat_curvature(const DimensionContext& ctx, double b, double rho) {
    const int n = ctx.n;
    double ratio;  // rho^2 / (rho^2 + b^2), stable at both ends
    if (rho > b) {
        const double t = b / rho;
        ratio = 1.0 / (1.0 + t * t);
    } else {
        ratio = rho * rho / (rho * rho + b * b);
    }
    return 0.5 * n * (n - 2) * (1.0 - (n + 2.0) / (2.0 * n) * ratio);
}

double flat_curvature_min(const DimensionContext& ctx) {
    return 0.25 * (ctx.n - 2) * (ctx.n - 2);
}

double flat_curvature_max(const DimensionContext& ctx) { return 0.5 * ctx.n * (ctx.n - 2); }

// ---- field evaluation ------------------------------------------------------

namespace {

const Cap* find_cap(const CapSet* caps, int j) {
    if (!caps) return nullptr;
    for (const Cap& c : *caps)
        if (c.bubble_index == j) return &c;
    return nullptr;
}

double bubble_distance(const SolutionField& f, const FieldPoint& pt, int j) {
    if (pt.anchor == j) return norm(pt.offset);
    return dist(pt.x, f.bubbles[static_cast<std::size_t>(j)].center);
}

// De-peaked bubble profile inside a cap.  For r < radius the true profile
// B(t) = alpha lambda^m (lambda^2 + t)^{-m}, t = r^2, is replaced by its
// quintic Taylor polynomial about t0 = radius^2.  The replacement joins the
// true profile with five continuous t-derivatives (rays grazing the cap
// sphere then leave only a C^5 seam in the angular integrand, which keeps
// the outer quadrature spectral down to tight tolerances), stays positive
// and bounded (all Taylor terms have positive sign for t < t0), and is a
// polynomial in |x - c|^2, hence smooth across the center.
struct CappedTerm {
    double value;
    double grad_coef;  // gradient = grad_coef * (x - c)
    double laplacian;
};

CappedTerm capped_bubble(const DimensionContext& ctx, double lambda, double r, double radius) {
    const double m = ctx.bubble_exp();
    const double t = r * r;
    const double t0 = radius * radius;
    const double s0 = lambda * lambda + t0;
    const double b0 = bubble_value(ctx, lambda, radius);
    const double c1 = m / s0;
    const double c2 = 0.5 * m * (m + 1.0) / (s0 * s0);
    const double c3 = m * (m + 1.0) * (m + 2.0) / (6.0 * s0 * s0 * s0);
    const double c4 = m * (m + 1.0) * (m + 2.0) * (m + 3.0) / (24.0 * s0 * s0 * s0 * s0);
    const double c5 =
        m * (m + 1.0) * (m + 2.0) * (m + 3.0) * (m + 4.0) / (120.0 * std::pow(s0, 5.0));
    const double d = t - t0;  // <= 0
    const double d2 = d * d;
    CappedTerm out;
    out.value = b0 * (1.0 - c1 * d + c2 * d2 - c3 * d2 * d + c4 * d2 * d2 - c5 * d2 * d2 * d);
    const double db =
        b0 * (-c1 + 2.0 * c2 * d - 3.0 * c3 * d2 + 4.0 * c4 * d2 * d - 5.0 * c5 * d2 * d2);
    const double d2b = b0 * (2.0 * c2 - 6.0 * c3 * d + 12.0 * c4 * d2 - 20.0 * c5 * d2 * d);
    out.grad_coef = 2.0 * db;
    out.laplacian = 4.0 * t * d2b + 2.0 * ctx.n * db;
    return out;
}

double capped_bubble_value(const DimensionContext& ctx, double lambda, double r, double radius) {
    return capped_bubble(ctx, lambda, r, radius).value;
}

}  // namespace

EvalResult eval(const SolutionField& f, const FieldPoint& pt, const CapSet* caps) {
    const DimensionContext& ctx = f.ctx;
    EvalResult out;
    out.gradient = zero_vec(ctx.n);
    const double rho = norm(pt.x);

    if (f.flat) {
        const double b = f.flat->b;
        out.value += flat_value(ctx, b, rho);
        out.laplacian += flat_laplacian(ctx, b, rho);
        axpy(out.gradient, flat_gradient_coefficient(ctx, b, rho), pt.x);
    }
    if (f.baseline) {
        out.value += bubble_value(ctx, 1.0, rho);
        out.laplacian += bubble_laplacian(ctx, 1.0, rho);
        axpy(out.gradient, bubble_gradient_coefficient(ctx, 1.0, rho), pt.x);
    }
    for (int j = 0; j < static_cast<int>(f.bubbles.size()); ++j) {
        const BubbleTerm& bt = f.bubbles[static_cast<std::size_t>(j)];
        const double r = bubble_distance(f, pt, j);
        double coef;
        if (const Cap* cap = find_cap(caps, j); cap && r < cap->radius) {
            const CappedTerm ct = capped_bubble(ctx, bt.lambda, r, cap->radius);
            out.value += ct.value;
            out.laplacian += ct.laplacian;
            coef = ct.grad_coef;
        } else {
            out.value += bubble_value(ctx, bt.lambda, r);
            out.laplacian += bubble_laplacian(ctx, bt.lambda, r);
            coef = bubble_gradient_coefficient(ctx, bt.lambda, r);
        }
        if (coef != 0.0) {
            if (pt.anchor == j) {
                axpy(out.gradient, coef, pt.offset);
            } else {
                for (int i = 0; i < ctx.n; ++i)
                    out.gradient[static_cast<std::size_t>(i)] +=
                        coef * (pt.x[static_cast<std::size_t>(i)] -
                                bt.center[static_cast<std::size_t>(i)]);
            }
        }
    }
    return out;
}

double value(const SolutionField& f, const FieldPoint& pt, const CapSet* caps) {
    const DimensionContext& ctx = f.ctx;
    double v = 0.0;
    const double rho = norm(pt.x);
    if (f.flat) v += flat_value(ctx, f.flat->b, rho);
    if (f.baseline) v += bubble_value(ctx, 1.0, rho);
    for (int j = 0; j < static_cast<int>(f.bubbles.size()); ++j) {
        const BubbleTerm& bt = f.bubbles[static_cast<std::size_t>(j)];
        const double r = bubble_distance(f, pt, j);
        if (const Cap* cap = find_cap(caps, j); cap && r < cap->radius) {
            v += capped_bubble_value(ctx, bt.lambda, r, cap->radius);
        } else {
            v += bubble_value(ctx, bt.lambda, r);
        }
    }
    return v;
}

double induced_curvature(const SolutionField& f, const FieldPoint& pt, const CapSet* caps) {
    const EvalResult e = eval(f, pt, caps);
    const double denom = std::pow(e.value, f.ctx.p);
    const double k = -e.laplacian / denom;
    if (std::isfinite(k) && denom > 0.0) return k;
    // Capped terms are bounded by construction, and their laplacians are
    // sign-indefinite, so the termwise log fallback below only applies to
    // uncapped evaluation.
    if (caps) return k;

    // Extreme-scale fallback: recompute both logs termwise.
    const DimensionContext& ctx = f.ctx;
    const double rho = norm(pt.x);
    std::vector<double> log_vals, log_laps;
    if (f.flat) {
        const double b = f.flat->b;
        const double mu = 0.25 * (ctx.n - 2);
        const double ls = log_sq_sum(b, rho);
        log_vals.push_back(-mu * ls);
        const double poly = std::log(ctx.n * b * b + 0.5 * (ctx.n - 2) * rho * rho);
        log_laps.push_back(std::log(0.5 * (ctx.n - 2)) + poly - (mu + 2.0) * ls);
    }
    auto push_bubble = [&](double lambda, double r) {
        const double lv = log_bubble_value(ctx, lambda, r);
        log_vals.push_back(lv);
        log_laps.push_back(ctx.p * lv);
    };
    if (f.baseline) push_bubble(1.0, rho);
    for (int j = 0; j < static_cast<int>(f.bubbles.size()); ++j)
        push_bubble(f.bubbles[static_cast<std::size_t>(j)].lambda, bubble_distance(f, pt, j));
    return std::exp(log_sum_exp(log_laps) - ctx.p * log_sum_exp(log_vals));
}

// ---- sampling --------------------------------------------------------------

namespace {

void append_center_shells(const SolutionField& f, const Vec& center, double lambda,
                          const SamplingPlan& plan, std::vector<Vec>& pts) {
    const int n = f.n();
    pts.push_back(center);
    const double rho_max = 0.25;
    const double rho_min = std::min(0.25 * lambda, rho_max);
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
        dirs.push_back(basis_vec(n, i, 1.0));
        dirs.push_back(basis_vec(n, i, -1.0));
    }
    Vec diag(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
    dirs.push_back(diag);
    const double cn = norm(center);
    if (cn > 0.0) dirs.push_back(scaled(center, -1.0 / cn));  // toward the origin

    const int shells = std::max(2, plan.center_shells);
    for (int i = 0; i < shells; ++i) {
        const double t = static_cast<double>(i) / (shells - 1);
        const double rho = rho_min * std::pow(rho_max / rho_min, t);
        for (const Vec& d : dirs) {
            Vec x = center;
            axpy(x, rho, d);
            pts.push_back(std::move(x));
        }
    }
}

}  // namespace

std::vector<Vec> sample_points(const SolutionField& f, const SamplingPlan& plan) {
    const int n = f.n();
    std::vector<Vec> pts;

    // (i) lattice on the ball
    int m = plan.grid_per_axis;
    if (m <= 0) {
        const double frac =
            unit_sphere_area(n) / n / std::pow(2.0, n);  // ball volume / cube volume
        m = static_cast<int>(std::llround(std::pow(plan.target_points / frac, 1.0 / n)));
        m = std::max(m, 3);
        if (m % 2 == 0) ++m;
    }
    const double R = plan.ball_radius;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Vec x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] =
                -R + 2.0 * R * idx[static_cast<std::size_t>(i)] / (m - 1);
        if (norm2(x) <= R * R) pts.push_back(std::move(x));
        int d = 0;
        while (d < n && ++idx[static_cast<std::size_t>(d)] == m) {
            idx[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == n) break;
    }

    // (ii) rays: coordinate axes plus the direction of every off-origin center
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) {
        dirs.push_back(basis_vec(n, i, 1.0));
        dirs.push_back(basis_vec(n, i, -1.0));
    }
    for (const BubbleTerm& b : f.bubbles) {
        const double cn = norm(b.center);
        if (cn > 0.0) dirs.push_back(scaled(b.center, 1.0 / cn));
    }
    const double r_lo = 0.05;
    for (const Vec& d : dirs) {
        for (int j = 0; j < plan.ray_points; ++j) {
            const double t = static_cast<double>(j) / (plan.ray_points - 1);
            const double r = r_lo * std::pow(plan.ray_extent / r_lo, t);
            pts.push_back(scaled(d, r));
        }
    }

    // (iii) dense shells near every bubble core
    if (f.baseline) append_center_shells(f, zero_vec(n), 1.0, plan, pts);
    for (const BubbleTerm& b : f.bubbles) append_center_shells(f, b.center, b.lambda, plan, pts);

    return pts;
}

CurvatureScan curvature_bounds(const SolutionField& f, const std::vector<Vec>& pts) {
    CurvatureScan scan;
    scan.chain_c1 = std::pow(3.0, f.ctx.p - 1.0);
    bool first = true;
    for (const Vec& x : pts) {
        const double k = induced_curvature(f, at_point(x));
        if (!(k > 0.0) || !std::isfinite(k)) scan.all_positive = false;
        if (first || k < scan.min_value) {
            scan.min_value = k;
            scan.argmin = x;
        }
        if (first || k > scan.max_value) {
            scan.max_value = k;
            scan.argmax = x;
        }
        if (k > 0.0) scan.chain_c2_empirical = std::max(scan.chain_c2_empirical, 1.0 / k);
        first = false;
        ++scan.count;
    }
    return scan;
}

// ---- serialization ---------------------------------------------------------

nlohmann::ordered_json field_to_json(const SolutionField& f) {
    nlohmann::ordered_json j;
    j["n"] = f.n();
    if (f.flat) j["flat"] = nlohmann::ordered_json{{"b", f.flat->b}};
    j["baseline"] = f.baseline;
    auto arr = nlohmann::ordered_json::array();
    for (const BubbleTerm& b : f.bubbles) {
        arr.push_back(nlohmann::ordered_json{{"center", b.center}, {"lambda", b.lambda}});
    }
    j["bubbles"] = std::move(arr);
    j["tail_bound_coeff"] = f.tail_bound_coeff;
    return j;
}

namespace {

[[noreturn]] void reject(const std::string& what) {
    throw std::invalid_argument("field: " + what);
}

}  // namespace

SolutionField field_from_json(const nlohmann::json& j) {
    if (!j.is_object()) reject("document must be a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer()) reject("\"n\" must be an integer");
    const int n = j["n"].get<int>();
    if (n < 3) reject("\"n\" must be >= 3");

    SolutionField f;
    f.ctx = make_context(n);

    if (j.contains("flat") && !j["flat"].is_null()) {
        if (!j["flat"].is_object() || !j["flat"].contains("b") || !j["flat"]["b"].is_number())
            reject("\"flat\" must be an object with numeric \"b\"");
        const double b = j["flat"]["b"].get<double>();
        if (!(b > 0.0) || !std::isfinite(b)) reject("\"flat.b\" must be finite and > 0");
        f.flat = FlatBubbleTerm{b};
    }
    if (j.contains("baseline")) {
        if (!j["baseline"].is_boolean()) reject("\"baseline\" must be a boolean");
        f.baseline = j["baseline"].get<bool>();
    }
    if (j.contains("bubbles")) {
        if (!j["bubbles"].is_array()) reject("\"bubbles\" must be an array");
        int k = 0;
        for (const auto& bj : j["bubbles"]) {
            std::ostringstream at;
            at << "\"bubbles[" << k << "]\"";
            if (!bj.is_object() || !bj.contains("center") || !bj.contains("lambda"))
                reject(at.str() + " must have \"center\" and \"lambda\"");
            if (!bj["center"].is_array() || static_cast<int>(bj["center"].size()) != n)
                reject(at.str() + ".center must be an array of length n");
            BubbleTerm b;
            for (const auto& c : bj["center"]) {
                if (!c.is_number()) reject(at.str() + ".center entries must be numbers");
                b.center.push_back(c.get<double>());
            }
            if (!bj["lambda"].is_number()) reject(at.str() + ".lambda must be a number");
            b.lambda = bj["lambda"].get<double>();
            if (!(b.lambda > 0.0) || !std::isfinite(b.lambda))
                reject(at.str() + ".lambda must be finite and > 0");
            f.bubbles.push_back(std::move(b));
            ++k;
        }
    }
    if (j.contains("tail_bound_coeff")) {
        if (!j["tail_bound_coeff"].is_number()) reject("\"tail_bound_coeff\" must be a number");
        f.tail_bound_coeff = j["tail_bound_coeff"].get<double>();
        if (f.tail_bound_coeff < 0.0 || !std::isfinite(f.tail_bound_coeff))
            reject("\"tail_bound_coeff\" must be finite and >= 0");
    }
    return f;
}

void save_field(const SolutionField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << field_to_json(f).dump(2) << "\n";
}

SolutionField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("field: invalid JSON: ") + e.what());
    }
    return field_from_json(j);
}

// ---- factories -------------------------------------------------------------

SolutionField single_bubble_field(int n, Vec center, double lambda) {
    SolutionField f;
    f.ctx = make_context(n);
    f.bubbles.push_back(BubbleTerm{std::move(center), lambda});
    return f;
}

SolutionField flat_bubble_field(int n, double b) {
    SolutionField f;
    f.ctx = make_context(n);
    f.flat = FlatBubbleTerm{b};
    return f;
}

SolutionField baseline_field(int n) {
    SolutionField f;
    f.ctx = make_context(n);
    f.baseline = true;
    return f;
}

}  // namespace csc
