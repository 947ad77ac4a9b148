#include "oband/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "oband/system_model.hpp"

namespace oband {

const GaussRule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged root
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.x[static_cast<std::size_t>(i)] = -x;
        r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

namespace {

// Kronrod 15 / Gauss 7 abscissae and weights on [-1, 1].
constexpr double kXk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
};

Interval gk15(const std::function<double(double)>& f, double a, double b)
{
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double rk = fc * kWk[7];
    double rg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * kXk[j];
        double f1 = f(c - dx), f2 = f(c + dx);
        rk += kWk[j] * (f1 + f2);
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const std::vector<double>& breakpoints, double rel_tol,
                                  double abs_tol, int max_intervals)
{
    AdaptiveResult res;
    if (a == b) return res;
    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > std::min(a, b) && p < std::max(a, b)) edges.push_back(p);
    std::sort(edges.begin() + 1, edges.end());
    if (b < a) std::reverse(edges.begin() + 1, edges.end());
    edges.push_back(b);

    auto cmp = [](const Interval& x, const Interval& y) {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    };
    std::priority_queue<Interval, std::vector<Interval>, decltype(cmp)> heap(cmp);
    double total = 0.0, err = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        if (edges[k] == edges[k + 1]) continue;
        Interval iv = gk15(f, edges[k], edges[k + 1]);
        res.evaluations += 15;
        total += iv.value;
        err += iv.error;
        heap.push(iv);
    }
    while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (static_cast<int>(heap.size()) >= max_intervals) {
            res.converged = false;
            break;
        }
        Interval worst = heap.top();
        heap.pop();
        double mid = 0.5 * (worst.a + worst.b);
        if (mid == worst.a || mid == worst.b) {
            res.converged = false;
            heap.push(worst);
            break;
        }
        Interval l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
        res.evaluations += 30;
        heap.push(l);
        heap.push(r);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
    }
    // final sum in a deterministic order
    std::vector<Interval> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    total = 0.0;
    err = 0.0;
    for (const auto& iv : all) {
        total += iv.value;
        err += iv.error;
    }
    res.value = total;
    res.error = err;
    return res;
}

}  // namespace oband
