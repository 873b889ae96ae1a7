#pragma once

// Plain tensor Gauss-Legendre rules used as independent oracles in tests.

#include <cmath>
#include <numbers>
#include <vector>

namespace testq {

struct Rule {
    std::vector<double> x, w;
};

inline Rule gauss_legendre(int n) {
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 60; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            z -= p1 / dp;
        }
        r.x[i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

/// `panels` equal panels on [lo, hi], n-point Gauss-Legendre on each.
inline Rule composite(double lo, double hi, int panels, int n) {
    const Rule g = gauss_legendre(n);
    Rule r;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p)
        for (int i = 0; i < n; ++i) {
            r.x.push_back(lo + h * (p + 0.5 * (g.x[i] + 1.0)));
            r.w.push_back(0.5 * h * g.w[i]);
        }
    return r;
}

} // namespace testq
