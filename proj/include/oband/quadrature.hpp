#pragma once

#include <functional>
#include <vector>

namespace oband {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// n-point Gauss-Legendre rule (Newton on P_n); cached per n.
const GaussRule& gauss_legendre(int n);

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod 7/15 on [a, b], split first at the given interior
// breakpoints. Deterministic: intervals are bisected in a fixed order.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const std::vector<double>& breakpoints, double rel_tol,
                                  double abs_tol = 0.0, int max_intervals = 4000);

}  // namespace oband
