#include "csc/gauss.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace csc::gauss {

namespace {

Rule build_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss: order must be >= 1");
    Rule r;
    r.nodes.resize(m);
    r.weights.resize(m);
    // Roots come in +/- pairs; iterate on the upper half.
    const int half = (m + 1) / 2;
    for (int k = 0; k < half; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Recurrence for P_m(x) and P'_m(x).
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= m; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step
                p0 = 1.0;
                p1 = x;
                for (int j = 2; j <= m; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m * (x * p1 - p0) / (x * x - 1.0);
                x -= p1 / dp;
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[k] = -x;
        r.weights[k] = w;
        r.nodes[m - 1 - k] = x;
        r.weights[m - 1 - k] = w;
    }
    if (m % 2 == 1) r.nodes[m / 2] = 0.0;
    return r;
}

std::map<int, Rule>& rule_cache() {
    static std::map<int, Rule> cache;
    return cache;
}

std::mutex cache_mutex;

}  // namespace

const Rule& legendre(int m) {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& cache = rule_cache();
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, build_legendre(m)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int order) {
    const Rule& r = legendre(order);
    const double mid = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + hl * r.nodes[i]);
    return s * hl;
}

namespace {

struct Panel {
    double a, b, value;
    int depth;
};

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double rtol, double atol, int max_depth, int max_panels) {
    constexpr int kOrder = 15;
    AdaptiveResult out;
    if (a == b) return out;

    double whole = integrate(f, a, b, kOrder);
    std::vector<Panel> stack{{a, b, whole, 0}};
    double total = 0.0, err = 0.0, scale = std::abs(whole);
    int panels = 0;

    while (!stack.empty()) {
        Panel p = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        const double left = integrate(f, p.a, mid, kOrder);
        const double right = integrate(f, mid, p.b, kOrder);
        const double refined = left + right;
        const double e = std::abs(refined - p.value);
        scale = std::max(scale, std::abs(total) + std::abs(refined));
        const double tol_here =
            std::max(atol, rtol * scale) * std::abs(p.b - p.a) / std::abs(b - a);
        const bool out_of_budget = panels + static_cast<int>(stack.size()) >= max_panels;
        if (e <= tol_here || p.depth >= max_depth || out_of_budget) {
            total += refined;
            err += e;
            ++panels;
            if (e > tol_here) out.converged = false;
        } else {
            stack.push_back({p.a, mid, left, p.depth + 1});
            stack.push_back({mid, p.b, right, p.depth + 1});
        }
    }
    out.value = total;
    out.err_est = err;
    out.panels = panels;
    return out;
}

}  // namespace csc::gauss
